#include "rads/region_grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace rads {

double proximity(VertexId v, const RegionGroup& rg, const PartitionView& pv) {
  const auto& adj = pv.adjacency(v);
  if (adj.empty()) throw Error(Errc::ZeroDegree, "vertex " + std::to_string(v));
  std::unordered_set<VertexId> group_nbrs;
  for (VertexId m : rg.members)
    for (VertexId n : pv.adjacency(m)) group_nbrs.insert(n);
  std::size_t hits = 0;
  for (VertexId n : adj)
    if (group_nbrs.count(n)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(adj.size());
}

std::uint64_t estimate_group_bytes(const RegionGroup& rg, const LocalStats& stats) {
  return static_cast<std::uint64_t>(
      std::llround(static_cast<double>(rg.members.size()) * stats.average_bytes_per_candidate()));
}

std::vector<RegionGroup> find_region_groups(const std::vector<VertexId>& c2,
                                            std::uint64_t budget_bytes, const LocalStats& stats,
                                            const PartitionView& pv) {
  std::vector<RegionGroup> groups;
  std::vector<VertexId> pool = c2;
  std::sort(pool.begin(), pool.end());
  const std::uint64_t budget =
      budget_bytes == 0 ? std::numeric_limits<std::uint64_t>::max() : budget_bytes;

  while (!pool.empty()) {
    RegionGroup rg;
    rg.members.push_back(pool.front());
    pool.erase(pool.begin());
    rg.estimated_bytes = estimate_group_bytes(rg, stats);

    // incremental group neighborhood keeps the greedy loop near-linear
    std::unordered_set<VertexId> group_nbrs;
    for (VertexId n : pv.adjacency(rg.members.front())) group_nbrs.insert(n);

    while (!pool.empty() && rg.estimated_bytes < budget) {
      std::size_t best = 0;
      double best_prox = -1.0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& adj = pv.adjacency(pool[i]);
        std::size_t hits = 0;
        for (VertexId n : adj)
          if (group_nbrs.count(n)) ++hits;
        double prox = adj.empty() ? 0.0
                                  : static_cast<double>(hits) / static_cast<double>(adj.size());
        if (prox > best_prox) {  // ties keep the earlier (smaller) id
          best_prox = prox;
          best = i;
        }
      }
      VertexId v = pool[best];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
      rg.members.push_back(v);
      rg.estimated_bytes = estimate_group_bytes(rg, stats);
      if (rg.estimated_bytes > budget) {
        // overshoot: the last added vertex goes back to the pool
        rg.members.pop_back();
        pool.insert(std::lower_bound(pool.begin(), pool.end(), v), v);
        rg.estimated_bytes = estimate_group_bytes(rg, stats);
        break;
      }
      for (VertexId n : pv.adjacency(v)) group_nbrs.insert(n);
    }
    groups.push_back(std::move(rg));
  }
  return groups;
}

}  // namespace rads
