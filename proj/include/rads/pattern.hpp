#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rads/types.hpp"

namespace rads {

/// Connected, undirected, simple query pattern over dense vertex ids 0..k-1.
class QueryPattern {
 public:
  QueryPattern() = default;
  QueryPattern(std::size_t n, std::vector<std::pair<QueryVertex, QueryVertex>> edges);

  std::size_t size() const { return adj_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::pair<QueryVertex, QueryVertex>>& edges() const { return edges_; }
  const std::vector<QueryVertex>& neighbors(QueryVertex u) const { return adj_[u]; }
  std::size_t degree(QueryVertex u) const { return adj_[u].size(); }
  bool has_edge(QueryVertex a, QueryVertex b) const;

  /// Eccentricity of u in the pattern.
  std::uint32_t span(QueryVertex u) const;

 private:
  std::vector<std::vector<QueryVertex>> adj_;
  std::vector<std::pair<QueryVertex, QueryVertex>> edges_;
};

/// "u must map to a smaller data vertex than u'" pairs, from automorphism
/// symmetry breaking. Exactly one member of each automorphism class of
/// embeddings satisfies all pairs.
struct OrderConstraints {
  std::vector<std::pair<QueryVertex, QueryVertex>> pairs;  // (smaller, larger)

  bool admits(QueryVertex u, VertexId v,
              const std::vector<VertexId>& mapping, VertexId unmapped) const {
    for (auto [lo, hi] : pairs) {
      if (lo == u && mapping[hi] != unmapped && !(v < mapping[hi])) return false;
      if (hi == u && mapping[lo] != unmapped && !(mapping[lo] < v)) return false;
    }
    return true;
  }
};

/// Parse the edge-list pattern format: one "u v" per line, '#' comments.
QueryPattern parse_pattern(const std::string& text);

/// All automorphisms of p, each as an image vector. Brute-force with degree
/// pruning; patterns beyond 16 vertices are rejected.
std::vector<std::vector<QueryVertex>> automorphisms(const QueryPattern& p);

/// Grochow-Kellis symmetry-breaking constraints from Aut(p).
OrderConstraints symmetry_constraints(const QueryPattern& p);

/// The canonical 10-vertex, 14-edge benchmark pattern used across tests.
QueryPattern benchmark_pattern();

}  // namespace rads
