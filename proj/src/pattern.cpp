#include "rads/pattern.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace rads {

QueryPattern::QueryPattern(std::size_t n, std::vector<std::pair<QueryVertex, QueryVertex>> edges)
    : adj_(n), edges_(std::move(edges)) {
  for (auto& [a, b] : edges_) {
    if (a > b) std::swap(a, b);
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  std::sort(edges_.begin(), edges_.end());
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());

  // connectivity
  if (n == 0) throw Error(Errc::Disconnected, "empty pattern");
  std::vector<bool> seen(n, false);
  std::queue<QueryVertex> q;
  q.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!q.empty()) {
    QueryVertex u = q.front();
    q.pop();
    for (QueryVertex w : adj_[u]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        q.push(w);
      }
    }
  }
  if (reached != n) throw Error(Errc::Disconnected, "pattern is not connected");
}

bool QueryPattern::has_edge(QueryVertex a, QueryVertex b) const {
  return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
}

std::uint32_t QueryPattern::span(QueryVertex u) const {
  std::vector<std::uint32_t> dist(size(), kInfDistance);
  std::queue<QueryVertex> q;
  dist[u] = 0;
  q.push(u);
  std::uint32_t ecc = 0;
  while (!q.empty()) {
    QueryVertex x = q.front();
    q.pop();
    ecc = std::max(ecc, dist[x]);
    for (QueryVertex w : adj_[x]) {
      if (dist[w] == kInfDistance) {
        dist[w] = dist[x] + 1;
        q.push(w);
      }
    }
  }
  return ecc;
}

QueryPattern parse_pattern(const std::string& text) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> edge_set;
  std::set<std::uint64_t> verts;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::uint64_t a, b;
    if (!(ls >> a)) continue;  // blank
    if (!(ls >> b))
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected two ids");
    std::uint64_t extra;
    if (ls >> extra)
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": trailing tokens");
    if (a == b) throw Error(Errc::SelfLoop, "line " + std::to_string(lineno));
    auto e = std::minmax(a, b);
    if (!edge_set.insert({e.first, e.second}).second)
      throw Error(Errc::DuplicateEdge, "line " + std::to_string(lineno));
    verts.insert(a);
    verts.insert(b);
  }
  if (edge_set.empty()) throw Error(Errc::ParseError, "no edges");

  // dense renumbering, order-preserving
  std::map<std::uint64_t, QueryVertex> id;
  for (std::uint64_t v : verts) id.emplace(v, static_cast<QueryVertex>(id.size()));
  std::vector<std::pair<QueryVertex, QueryVertex>> edges;
  edges.reserve(edge_set.size());
  for (auto [a, b] : edge_set) edges.push_back({id[a], id[b]});
  return QueryPattern(verts.size(), std::move(edges));
}

std::vector<std::vector<QueryVertex>> automorphisms(const QueryPattern& p) {
  const std::size_t n = p.size();
  if (n > 16) throw Error(Errc::PatternTooLarge, std::to_string(n) + " vertices");
  std::vector<std::vector<QueryVertex>> out;
  std::vector<QueryVertex> img(n, static_cast<QueryVertex>(n));
  std::vector<bool> used(n, false);

  auto consistent = [&](QueryVertex u, QueryVertex v) {
    if (p.degree(u) != p.degree(v)) return false;
    for (QueryVertex w : p.neighbors(u)) {
      if (img[w] != n && !p.has_edge(v, img[w])) return false;
    }
    // non-edges to already-mapped vertices must stay non-edges
    for (QueryVertex w = 0; w < n; ++w) {
      if (w != u && img[w] != n && !p.has_edge(u, w) && p.has_edge(v, img[w])) return false;
    }
    return true;
  };

  auto rec = [&](auto&& self, QueryVertex u) -> void {
    if (u == n) {
      out.push_back(img);
      return;
    }
    for (QueryVertex v = 0; v < n; ++v) {
      if (used[v] || !consistent(u, v)) continue;
      img[u] = v;
      used[v] = true;
      self(self, u + 1);
      img[u] = static_cast<QueryVertex>(n);
      used[v] = false;
    }
  };
  rec(rec, 0);
  return out;
}

OrderConstraints symmetry_constraints(const QueryPattern& p) {
  auto group = automorphisms(p);
  const std::size_t n = p.size();
  OrderConstraints out;
  // Grochow-Kellis: repeatedly fix the smallest vertex with a nontrivial
  // orbit, emitting "u < v" for every other orbit member, and shrink the
  // group to the stabilizer of that vertex.
  while (group.size() > 1) {
    QueryVertex anchor = static_cast<QueryVertex>(n);
    std::set<QueryVertex> orbit;
    for (QueryVertex u = 0; u < n && anchor == n; ++u) {
      orbit.clear();
      for (auto& g : group) orbit.insert(g[u]);
      if (orbit.size() > 1) anchor = u;
    }
    if (anchor == n) break;
    for (QueryVertex v : orbit) {
      if (v != anchor) out.pairs.push_back({anchor, v});
    }
    std::vector<std::vector<QueryVertex>> stab;
    for (auto& g : group) {
      if (g[anchor] == anchor) stab.push_back(g);
    }
    group = std::move(stab);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

QueryPattern benchmark_pattern() {
  return QueryPattern(10, {{0, 1},
                           {0, 2},
                           {0, 7},
                           {0, 8},
                           {0, 9},
                           {1, 3},
                           {1, 4},
                           {2, 5},
                           {2, 6},
                           {1, 2},
                           {3, 4},
                           {4, 5},
                           {5, 6},
                           {8, 9}});
}

}  // namespace rads
