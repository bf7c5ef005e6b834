#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rads/graph.hpp"
#include "rads/partition_io.hpp"
#include "rads/pattern.hpp"
#include "rads/types.hpp"

namespace rads::test {

inline Graph path_graph(std::size_t n) {
  Graph g;
  for (VertexId v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  g.finalize();
  return g;
}

inline Graph complete_graph(std::size_t n) {
  Graph g;
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b) g.add_edge(a, b);
  g.finalize();
  return g;
}

inline Graph star_graph(std::size_t leaves) {
  Graph g;
  for (VertexId v = 1; v <= leaves; ++v) g.add_edge(0, v);
  g.finalize();
  return g;
}

/// The reconstruction of the paper-style 12-vertex example graph: worker 0
/// owns {0,2,3,4,5,7,11}, worker 1 owns {1,6,8,9,10}; candidate vertices of
/// the benchmark pattern's first pivot are exactly {0,1,2,10}.
inline Graph example_graph() {
  Graph g;
  auto edges = std::vector<std::pair<VertexId, VertexId>>{
      {0, 1}, {0, 2}, {0, 7}, {0, 9}, {0, 11}, {1, 2},  {1, 3},  {1, 4},
      {1, 10}, {2, 5}, {2, 6}, {2, 10}, {3, 4}, {4, 5},  {5, 6},  {8, 9},
      {8, 10}, {8, 11}, {9, 10}, {9, 11}, {10, 11}};
  for (auto [a, b] : edges) g.add_edge(a, b);
  g.finalize();
  return g;
}

inline std::unordered_map<VertexId, MachineId> example_ownership() {
  std::unordered_map<VertexId, MachineId> owners;
  for (VertexId v : {0, 2, 3, 4, 5, 7, 11}) owners[v] = 0;
  for (VertexId v : {1, 6, 8, 9, 10}) owners[v] = 1;
  return owners;
}

inline QueryPattern triangle() { return QueryPattern(3, {{0, 1}, {1, 2}, {0, 2}}); }
inline QueryPattern wedge() { return QueryPattern(3, {{0, 1}, {1, 2}}); }
inline QueryPattern square() { return QueryPattern(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }
inline QueryPattern edge_pattern() { return QueryPattern(2, {{0, 1}}); }
inline QueryPattern clique4() {
  return QueryPattern(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}
inline QueryPattern path5() { return QueryPattern(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}); }

/// Random connected pattern on n vertices: a random spanning tree plus a few
/// extra edges.
inline QueryPattern random_pattern(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::pair<QueryVertex, QueryVertex>> edges;
  std::set<std::pair<QueryVertex, QueryVertex>> seen;
  for (QueryVertex v = 1; v < n; ++v) {
    QueryVertex parent = static_cast<QueryVertex>(rng() % v);
    edges.push_back({parent, v});
    seen.insert({parent, v});
  }
  std::size_t extra = rng() % (n);
  for (std::size_t i = 0; i < extra; ++i) {
    auto a = static_cast<QueryVertex>(rng() % n);
    auto b = static_cast<QueryVertex>(rng() % n);
    if (a == b) continue;
    auto e = std::minmax(a, b);
    if (seen.insert({e.first, e.second}).second) edges.push_back({e.first, e.second});
  }
  return QueryPattern(n, std::move(edges));
}

/// BFS distances inside one graph, for independent cross-checks.
inline std::map<VertexId, std::uint32_t> bfs_distances(const Graph& g, VertexId src) {
  std::map<VertexId, std::uint32_t> dist;
  std::queue<VertexId> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (VertexId w : g.neighbors(v)) {
      if (!dist.count(w)) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

inline std::set<std::vector<VertexId>> as_set(const std::vector<std::vector<VertexId>>& xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace rads::test
