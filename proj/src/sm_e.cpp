#include "rads/sm_e.hpp"

#include <algorithm>

namespace rads {

CandidateSplit split_candidates(const PartitionView& pv, const QueryPattern& p,
                                QueryVertex u_start) {
  CandidateSplit out;
  const std::size_t min_deg = p.degree(u_start);
  const std::uint32_t span = p.span(u_start);
  std::vector<VertexId> owned;
  for (auto& [v, nbrs] : pv.local_adj())
    if (nbrs.size() >= min_deg) owned.push_back(v);
  std::sort(owned.begin(), owned.end());
  for (VertexId v : owned) {
    if (span <= pv.border_distance(v))
      out.local_only.push_back(v);
    else
      out.distributed.push_back(v);
  }
  return out;
}

std::vector<std::vector<VertexId>> local_enumerate(const PartitionView& pv,
                                                   const QueryPattern& p,
                                                   const ExecutionPlan& plan,
                                                   const OrderConstraints& constraints,
                                                   const std::vector<VertexId>& c1,
                                                   LocalStats& stats) {
  std::vector<std::vector<VertexId>> results;
  const auto& order = plan.matching_order;
  std::vector<VertexId> f(p.size(), kNoVertex);

  // earlier-mapped pattern neighbors of each query vertex, by order position
  std::vector<std::vector<QueryVertex>> mapped_nbrs(p.size());
  for (std::size_t pos = 1; pos < order.size(); ++pos) {
    for (QueryVertex w : p.neighbors(order[pos]))
      if (plan.position[w] < pos) mapped_nbrs[pos].push_back(w);
  }

  std::uint64_t steps = 0;
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == order.size()) {
      results.push_back(f);
      return;
    }
    QueryVertex u = order[pos];
    // candidates: owned neighbors of the first mapped pattern neighbor,
    // filtered by the rest
    const std::vector<QueryVertex>& anchors = mapped_nbrs[pos];
    const std::vector<VertexId>* pool = nullptr;
    for (QueryVertex w : anchors) {
      if (pv.owns(f[w])) {
        pool = &pv.local_adj().at(f[w]);
        break;
      }
    }
    if (pool == nullptr) return;  // C1 seeds stay local; a foreign image ends the branch
    for (VertexId v : *pool) {
      if (!pv.owns(v) || pv.local_adj().at(v).size() < p.degree(u)) continue;
      bool used = false;
      for (VertexId m : f)
        if (m == v) {
          used = true;
          break;
        }
      if (used) continue;
      if (!constraints.admits(u, v, f, kNoVertex)) continue;
      bool ok = true;
      for (QueryVertex w : anchors) {
        if (f[w] == v || !pv.owns(f[w]) ||
            !std::binary_search(pv.local_adj().at(f[w]).begin(),
                                pv.local_adj().at(f[w]).end(), v)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      ++steps;
      f[u] = v;
      self(self, pos + 1);
      f[u] = kNoVertex;
    }
  };

  for (VertexId seed : c1) {
    steps = 1;  // the root is always created
    f.assign(p.size(), kNoVertex);
    f[order[0]] = seed;
    rec(rec, 1);
    stats.nodes_per_candidate[seed] = steps;
  }
  return results;
}

namespace {

std::vector<std::vector<VertexId>> oracle_impl(const Graph& g, const QueryPattern& p,
                                               const OrderConstraints& constraints) {
  std::vector<std::vector<VertexId>> results;
  const std::size_t k = p.size();

  // BFS order from query vertex 0 so every later vertex has a mapped neighbor
  std::vector<QueryVertex> order;
  std::vector<bool> seen(k, false);
  order.push_back(0);
  seen[0] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (QueryVertex w : p.neighbors(order[i])) {
      if (!seen[w]) {
        seen[w] = true;
        order.push_back(w);
      }
    }
  }
  std::vector<std::uint32_t> pos(k, 0);
  for (std::uint32_t i = 0; i < k; ++i) pos[order[i]] = i;
  std::vector<std::vector<QueryVertex>> mapped_nbrs(k);
  for (std::size_t i = 1; i < k; ++i) {
    for (QueryVertex w : p.neighbors(order[i]))
      if (pos[w] < i) mapped_nbrs[i].push_back(w);
  }

  std::vector<VertexId> f(k, kNoVertex);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == k) {
      results.push_back(f);
      return;
    }
    QueryVertex u = order[i];
    const auto& anchors = mapped_nbrs[i];
    for (VertexId v : g.neighbors(f[anchors.front()])) {
      if (g.degree(v) < p.degree(u)) continue;
      bool used = false;
      for (VertexId m : f)
        if (m == v) {
          used = true;
          break;
        }
      if (used) continue;
      if (!constraints.admits(u, v, f, kNoVertex)) continue;
      bool ok = true;
      for (std::size_t a = 1; a < anchors.size(); ++a) {
        if (!g.has_edge(v, f[anchors[a]])) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      f[u] = v;
      self(self, i + 1);
      f[u] = kNoVertex;
    }
  };

  for (VertexId v0 : g.vertices_sorted()) {
    if (g.degree(v0) < p.degree(0)) continue;
    if (!constraints.admits(0, v0, f, kNoVertex)) continue;
    f[0] = v0;
    rec(rec, 1);
    f[0] = kNoVertex;
  }
  return results;
}

}  // namespace

std::vector<std::vector<VertexId>> oracle_enumerate(const Graph& g, const QueryPattern& p,
                                                    const OrderConstraints& constraints) {
  if (p.size() > g.vertex_count()) return {};
  return oracle_impl(g, p, constraints);
}

std::vector<std::vector<VertexId>> oracle_enumerate(const Graph& g, const QueryPattern& p) {
  return oracle_enumerate(g, p, symmetry_constraints(p));
}

}  // namespace rads
