#pragma once

#include <random>

#include "rads/graph.hpp"

namespace rads {

/// Seeded random graph with roughly the requested average degree.
inline Graph generate_graph(std::size_t n, double avg_degree, std::uint64_t seed) {
  Graph g;
  std::mt19937_64 rng(seed);
  for (VertexId v = 0; v < n; ++v) g.touch(v);
  if (n >= 2) {
    auto target_edges = static_cast<std::size_t>(static_cast<double>(n) * avg_degree / 2.0);
    std::uniform_int_distribution<VertexId> pick(0, n - 1);
    for (std::size_t i = 0; i < target_edges; ++i) {
      VertexId a = pick(rng);
      VertexId b = pick(rng);
      if (a != b) g.add_edge(a, b);
    }
  }
  g.finalize();
  return g;
}

}  // namespace rads
