#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rads/graph.hpp"
#include "rads/pattern.hpp"
#include "rads/planner.hpp"
#include "rads/types.hpp"

namespace rads {

/// Stable, generation-tagged handle to a stored result (a trie leaf).
struct ResultId {
  std::uint32_t slot = 0xffffffffu;
  std::uint32_t generation = 0;

  bool valid() const { return slot != 0xffffffffu; }
  friend bool operator==(const ResultId&, const ResultId&) = default;
};

struct ResultIdHash {
  std::size_t operator()(const ResultId& r) const {
    return (static_cast<std::size_t>(r.slot) << 20) ^ r.generation;
  }
};

/// Map from an undetermined data edge to the ids of the results sharing it.
class EdgeVerificationIndex {
 public:
  void add(EdgeKey e, ResultId id) { entries_[e].push_back(id); }
  void clear() { entries_.clear(); }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<EdgeKey, std::vector<ResultId>, EdgeKeyHash>& entries() const {
    return entries_;
  }

 private:
  std::unordered_map<EdgeKey, std::vector<ResultId>, EdgeKeyHash> entries_;
};

/// Multi-tree compressed store of intermediate results. Nodes at level j
/// hold the data vertices matched to the j-th query vertex in matching
/// order; every live leaf-to-root path is one stored result.
class EmbeddingTrie {
 public:
  explicit EmbeddingTrie(std::size_t levels = 0)
      : levels_(levels), level_index_(levels), live_per_level_(levels, 0) {}

  static constexpr std::int32_t kNoParent = -1;

  /// Root node for v, reused if already present.
  ResultId insert_root(VertexId v);

  /// Extend a stored result by a suffix, reusing shared nodes so that
  /// siblings stay distinct. Returns the id of the new leaf.
  ResultId insert_path(ResultId parent, std::span<const VertexId> suffix);

  /// Seed-from-root convenience: root v (created or reused) plus suffix.
  ResultId insert_path(VertexId root, std::span<const VertexId> suffix);

  /// Root-to-leaf vertices of a live result. Throws StaleId otherwise.
  std::vector<VertexId> result_vertices(ResultId id) const;

  bool is_live(ResultId id) const;

  /// Remove a result; ancestors whose child count drops to zero go with it.
  /// Stale ids are a no-op.
  void remove_result(ResultId id);

  /// Live results whose leaf sits at the given level. Compacts the level
  /// index as a side effect.
  std::vector<ResultId> level_results(std::size_t level);

  std::size_t live_count(std::size_t level) const { return live_per_level_[level]; }
  std::size_t node_count() const { return live_nodes_; }
  std::size_t peak_node_count() const { return peak_nodes_; }
  std::size_t level_count() const { return levels_; }

  void clear();

  /// Recompute child counts and sibling distinctness from scratch;
  /// throws on any mismatch. Test support.
  void audit() const;

  // Expansion support: nodes are allocated provisionally and only become
  // part of the trie when committed; a released node never existed.
  std::uint32_t alloc_node(VertexId v, std::int32_t parent, std::uint16_t level);
  void commit_node(std::uint32_t slot);
  void release_node(std::uint32_t slot);
  ResultId id_of(std::uint32_t slot) const {
    return {slot, nodes_[slot].generation};
  }
  std::int32_t slot_of(ResultId id) const {
    return is_live(id) ? static_cast<std::int32_t>(id.slot) : kNoParent;
  }
  VertexId vertex_of(std::uint32_t slot) const { return nodes_[slot].v; }

 private:
  struct Node {
    VertexId v = 0;
    std::int32_t parent = kNoParent;
    std::uint32_t child_count = 0;
    std::uint32_t generation = 0;
    std::uint16_t level = 0;
    bool live = false;       // committed and not removed
    bool allocated = false;  // slot in use (provisional or live)
  };

  struct ChildKey {
    std::int32_t parent;
    VertexId v;
    friend bool operator==(const ChildKey&, const ChildKey&) = default;
  };
  struct ChildKeyHash {
    std::size_t operator()(const ChildKey& k) const {
      return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(k.parent) << 32) ^
                                        (k.v * 0x9e3779b97f4a7c15ULL));
    }
  };

  std::uint32_t find_child(std::int32_t parent, VertexId v) const;

  std::size_t levels_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_slots_;
  std::unordered_map<ChildKey, std::uint32_t, ChildKeyHash> children_;
  std::vector<std::vector<ResultId>> level_index_;
  std::vector<std::size_t> live_per_level_;
  std::size_t live_nodes_ = 0;
  std::size_t peak_nodes_ = 0;
};

/// Shared edge-verdict memory: a verified edge is graph truth for the whole
/// run, even though the EVI itself is cleared every round.
using VerdictCache = std::unordered_map<EdgeKey, bool, EdgeKeyHash>;

struct ExpandCounters {
  std::uint64_t candidates_admitted = 0;
  std::uint64_t results_completed = 0;
  std::uint64_t frontier_removed = 0;
};

/// expandEmbedTrie/adjEnum: grows the trie with every embedding candidate of
/// the accumulated subpattern reachable from one frontier result, registering
/// undetermined edges in the EVI. Removes the frontier result when nothing
/// extends it.
class Expander {
 public:
  Expander(const PartitionView& pv, const QueryPattern& p, const ExecutionPlan& plan,
           const OrderConstraints& constraints, EmbeddingTrie& trie, EdgeVerificationIndex& evi,
           VerdictCache& verdicts)
      : pv_(pv), p_(p), plan_(plan), cons_(constraints), trie_(trie), evi_(evi),
        verdicts_(verdicts) {}

  /// Hook used by the worker to fetch a missing pivot adjacency on demand.
  /// Without it a foreign uncached pivot raises MissingAdjacency.
  void set_adjacency_provider(std::function<void(VertexId)> ensure) {
    ensure_adjacency_ = std::move(ensure);
  }

  /// Round 0 entry: seed one candidate of dp_0.piv and expand unit 0.
  void expand_seed(VertexId seed);

  /// Round i entry: expand one frontier result of P_{i-1} by unit i.
  void expand(ResultId frontier, std::size_t unit_index);

  const ExpandCounters& counters() const { return counters_; }

 private:
  EdgePresence resolve(VertexId a, VertexId b) const;
  bool admit(QueryVertex u, VertexId v) const;
  bool adj_enum(std::int32_t parent_slot, std::size_t leaf_index);
  void run_unit(std::int32_t start_slot, ResultId frontier, bool seeded);
  void prepare_unit(std::size_t unit_index);

  const PartitionView& pv_;
  const QueryPattern& p_;
  const ExecutionPlan& plan_;
  const OrderConstraints& cons_;
  EmbeddingTrie& trie_;
  EdgeVerificationIndex& evi_;
  VerdictCache& verdicts_;
  std::function<void(VertexId)> ensure_adjacency_;
  ExpandCounters counters_;

  // per-unit working state
  const DecompositionUnit* unit_ = nullptr;
  std::size_t unit_index_ = 0;
  std::size_t level_base_ = 0;
  std::vector<VertexId> f_;                               // query vertex -> data vertex
  std::vector<std::vector<VertexId>> base_cands_;         // per leaf
  std::vector<std::vector<QueryVertex>> check_peers_;     // per leaf: mapped sib/cro peers
  std::vector<std::vector<QueryVertex>> sib_refine_;      // per leaf: earlier-leaf sib peers
  std::vector<std::vector<QueryVertex>> cro_peers_;       // per leaf: earlier-unit peers
};

/// filterFailedEmbed: drop every result indicted by a false verdict, then
/// clear the index. Verdicts must cover every key.
void filter_failed(EdgeVerificationIndex& evi,
                   const std::unordered_map<EdgeKey, bool, EdgeKeyHash>& verdicts,
                   EmbeddingTrie& trie);

}  // namespace rads
