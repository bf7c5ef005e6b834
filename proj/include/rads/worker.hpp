#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rads/embedding_trie.hpp"
#include "rads/graph.hpp"
#include "rads/pattern.hpp"
#include "rads/planner.hpp"
#include "rads/region_grouping.hpp"
#include "rads/sm_e.hpp"
#include "rads/transport.hpp"
#include "rads/types.hpp"

namespace rads {

struct WorkerConfig {
  double rho = 1.0;
  std::uint64_t memory_budget = 0;  // bytes, 0 = unbounded (single region group)
  std::uint64_t cache_budget = 0;   // bytes, 0 = unbounded
  bool collect_results = false;

  // test hooks
  std::size_t demote_c1 = 0;   // process this many C1 candidates distributed instead
  bool skip_verify = false;    // fault injection: trust every undetermined edge
  int defer_start_ms = 0;      // sleep after publishing groups, before claiming
};

struct WorkerReport {
  MachineId machine = 0;
  std::uint64_t sm_e_count = 0;
  std::uint64_t rmeef_count = 0;
  std::vector<std::vector<VertexId>> results;  // query-vertex order, when collected
  TrafficCounters traffic;
  std::size_t c1_size = 0;
  std::size_t c2_size = 0;
  std::size_t groups_created = 0;
  std::uint64_t groups_processed = 0;  // own claims plus stolen ones
  std::size_t peak_trie_nodes = 0;
  std::uint64_t max_group_estimate = 0;
  LocalStats stats;

  std::uint64_t total() const { return sm_e_count + rmeef_count; }
};

/// Pivot images of the frontier, deduplicated: the vertices whose adjacency
/// round i expands from.
std::vector<VertexId> collect_pivot_targets(const EmbeddingTrie& trie,
                                            const std::vector<ResultId>& frontier,
                                            const ExecutionPlan& plan, std::size_t unit_index);

/// One worker's full R-Meef life cycle: SM-E over C1, region groups over C2,
/// the multi-round expand/verify/filter loop per group, then work stealing
/// until the cluster is drained.
class Worker {
 public:
  Worker(PartitionView& pv, const QueryPattern& p, const ExecutionPlan& plan,
         const OrderConstraints& constraints, const WorkerConfig& cfg, Transport& transport,
         GroupTable& table)
      : pv_(pv), p_(p), plan_(plan), cons_(constraints), cfg_(cfg), transport_(transport),
        table_(table) {}

  WorkerReport run();

  /// Spec-level region-group driver, also used directly by tests.
  void run_region_group(const std::vector<VertexId>& seeds, WorkerReport& rep);

 private:
  void verify_and_filter(EmbeddingTrie& trie, EdgeVerificationIndex& evi, WorkerReport& rep);

  PartitionView& pv_;
  const QueryPattern& p_;
  const ExecutionPlan& plan_;
  const OrderConstraints& cons_;
  WorkerConfig cfg_;
  Transport& transport_;
  GroupTable& table_;
  VerdictCache verdicts_;
};

struct RunSummary {
  std::uint64_t total = 0;
  std::vector<WorkerReport> workers;

  std::vector<std::vector<VertexId>> all_results() const {
    std::vector<std::vector<VertexId>> out;
    for (const auto& w : workers) out.insert(out.end(), w.results.begin(), w.results.end());
    return out;
  }
};

/// Spawn one enumeration thread and one daemon thread per worker over the
/// in-process loopback fabric; returns once every worker drained the cluster.
RunSummary run_loopback(std::vector<PartitionView>& views, const QueryPattern& p,
                        const std::vector<WorkerConfig>& configs);

RunSummary run_loopback(std::vector<PartitionView>& views, const QueryPattern& p,
                        const WorkerConfig& cfg);

}  // namespace rads
