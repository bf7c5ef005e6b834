#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rads/pattern.hpp"
#include "rads/types.hpp"

namespace rads {

using QueryEdge = std::pair<QueryVertex, QueryVertex>;

/// One star-shaped decomposition unit: a pivot, its leaves, and the edge
/// classes filled in by classify_edges.
struct DecompositionUnit {
  QueryVertex piv = 0;
  std::vector<QueryVertex> leaves;      // ordered by matching order once finalized
  std::vector<QueryEdge> e_star;        // pivot-leaf
  std::vector<QueryEdge> e_sib;         // leaf-leaf within the unit
  std::vector<QueryEdge> e_cro;         // leaf-earlier vertex (i >= 1)
};

struct ExecutionPlan {
  std::vector<DecompositionUnit> units;
  double rho = 1.0;
  std::vector<QueryVertex> matching_order;

  /// Matching-order position of each query vertex.
  std::vector<std::uint32_t> position;

  std::size_t prefix_size(std::size_t unit_index) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i <= unit_index; ++i) n += (i == 0 ? 1 : 0) + units[i].leaves.size();
    return n;
  }
};

struct McdsResult {
  std::uint32_t c_p = 0;
  std::vector<std::vector<QueryVertex>> mcds_list;
};

/// Exact connected domination number and the complete list of MCDSs, with
/// |V_P| = c_P + l_P cross-checked against a spanning tree built from one.
McdsResult connected_dominating_number(const QueryPattern& p);

/// All minimum-round execution plans: for every MCDS, every rooted
/// arrangement of its vertices (each later pivot joins one earlier adjacent
/// unit as a leaf), non-MCDS vertices attached to the earliest adjacent unit.
std::vector<ExecutionPlan> enumerate_min_plans(const QueryPattern& p);

/// Fill e_star/e_sib/e_cro; every pattern edge lands in exactly one class of
/// exactly one unit. Throws NotAPlan when a later pivot is not in the prefix.
void classify_edges(ExecutionPlan& plan, const QueryPattern& p);

/// Verification-edge score: sum over units of (|sib|+|cro|) / (i+1)^rho.
double score_plan(const ExecutionPlan& plan, double rho);

/// Tie-break score: score_plan plus sum of deg(piv_i) / (i+1).
double score_plan_with_degree(const ExecutionPlan& plan, const QueryPattern& p, double rho);

/// Heuristic cascade: min rounds, then min span of dp_0.piv, then max score,
/// then max degree score, then lexicographic pivots. Deterministic.
ExecutionPlan select_plan(const QueryPattern& p, double rho = 1.0);

/// Total order per the matching-order definition; fills matching_order,
/// position, and sorts each unit's leaves accordingly.
void compute_matching_order(ExecutionPlan& plan, const QueryPattern& p);

/// Stable one-unit-per-line rendering for the CLI and tests.
std::string format_plan(const ExecutionPlan& plan, const QueryPattern& p);

}  // namespace rads
