#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rads/graph.hpp"
#include "rads/pattern.hpp"
#include "rads/planner.hpp"
#include "rads/types.hpp"

namespace rads {

/// Per-seed backtracking-node counts from SM-E, feeding the region-group
/// space estimate.
struct LocalStats {
  std::unordered_map<VertexId, std::uint64_t> nodes_per_candidate;

  double average_bytes_per_candidate() const {
    if (nodes_per_candidate.empty()) return static_cast<double>(kDefaultCandidateBytes);
    std::uint64_t total = 0;
    for (auto& [v, n] : nodes_per_candidate) total += n;
    return static_cast<double>(total) * kTrieNodeBytes /
           static_cast<double>(nodes_per_candidate.size());
  }
};

struct CandidateSplit {
  std::vector<VertexId> local_only;   // C1: border distance >= span(u_start)
  std::vector<VertexId> distributed;  // C2
};

/// C = owned vertices with deg >= deg(u_start); C1 those provably local.
CandidateSplit split_candidates(const PartitionView& pv, const QueryPattern& p,
                                QueryVertex u_start);

/// Backtracking over the plan's matching order, restricted to owned
/// adjacency, recording per-seed node counts. Complete for C1 seeds.
std::vector<std::vector<VertexId>> local_enumerate(const PartitionView& pv,
                                                   const QueryPattern& p,
                                                   const ExecutionPlan& plan,
                                                   const OrderConstraints& constraints,
                                                   const std::vector<VertexId>& c1,
                                                   LocalStats& stats);

/// Independent whole-graph brute force with symmetry constraints; the
/// reference answer for every end-to-end check. Embeddings are returned in
/// query-vertex order (index = query vertex).
std::vector<std::vector<VertexId>> oracle_enumerate(const Graph& g, const QueryPattern& p);

std::vector<std::vector<VertexId>> oracle_enumerate(const Graph& g, const QueryPattern& p,
                                                    const OrderConstraints& constraints);

}  // namespace rads
