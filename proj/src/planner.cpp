#include "rads/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace rads {

namespace {

bool mask_connected(const QueryPattern& p, std::uint32_t mask) {
  if (mask == 0) return false;
  std::uint32_t start = 0;
  while (!(mask & (1u << start))) ++start;
  std::uint32_t seen = 1u << start;
  std::queue<QueryVertex> q;
  q.push(start);
  while (!q.empty()) {
    QueryVertex u = q.front();
    q.pop();
    for (QueryVertex w : p.neighbors(u)) {
      std::uint32_t bit = 1u << w;
      if ((mask & bit) && !(seen & bit)) {
        seen |= bit;
        q.push(w);
      }
    }
  }
  return seen == mask;
}

bool mask_dominating(const QueryPattern& p, std::uint32_t mask) {
  const std::uint32_t all = (p.size() == 32) ? ~0u : ((1u << p.size()) - 1);
  std::uint32_t covered = mask;
  for (QueryVertex u = 0; u < p.size(); ++u) {
    if (mask & (1u << u)) {
      for (QueryVertex w : p.neighbors(u)) covered |= 1u << w;
    }
  }
  return covered == all;
}

}  // namespace

McdsResult connected_dominating_number(const QueryPattern& p) {
  const std::size_t n = p.size();
  if (n > 16) throw Error(Errc::PatternTooLarge, std::to_string(n) + " vertices");
  McdsResult res;
  for (std::uint32_t size = 1; size <= n && res.mcds_list.empty(); ++size) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != size) continue;
      if (mask_dominating(p, mask) && mask_connected(p, mask)) {
        std::vector<QueryVertex> set;
        for (QueryVertex u = 0; u < n; ++u)
          if (mask & (1u << u)) set.push_back(u);
        res.mcds_list.push_back(std::move(set));
      }
    }
    if (!res.mcds_list.empty()) res.c_p = size;
  }

  // Sanity check |V_P| = c_P + l_P: a spanning tree whose internal vertices
  // are exactly one MCDS must have |V_P| - c_P leaves.
  if (n >= 2 && !res.mcds_list.empty()) {
    const auto& d = res.mcds_list.front();
    std::set<QueryVertex> in_d(d.begin(), d.end());
    std::set<QueryVertex> in_tree;
    std::vector<std::uint32_t> tree_deg(n, 0);
    in_tree.insert(d.front());
    // span the MCDS first, then hang every other vertex off an MCDS member
    while (in_tree.size() < in_d.size()) {
      for (QueryVertex u : d) {
        if (in_tree.count(u)) continue;
        for (QueryVertex w : p.neighbors(u)) {
          if (in_d.count(w) && in_tree.count(w)) {
            ++tree_deg[u];
            ++tree_deg[w];
            in_tree.insert(u);
            break;
          }
        }
      }
    }
    for (QueryVertex u = 0; u < n; ++u) {
      if (in_d.count(u)) continue;
      for (QueryVertex w : p.neighbors(u)) {
        if (in_d.count(w)) {
          ++tree_deg[u];
          ++tree_deg[w];
          break;
        }
      }
    }
    std::uint32_t leaves = 0;
    for (QueryVertex u = 0; u < n; ++u)
      if (tree_deg[u] == 1) ++leaves;
    // With |V_P| >= 3 every MCDS member is internal in this tree.
    if (n >= 3 && leaves != n - res.c_p)
      throw Error(Errc::NotAPlan, "MCDS/MLST consistency check failed");
  }
  return res;
}

namespace {

struct PlanSignature {
  std::vector<std::pair<QueryVertex, std::vector<QueryVertex>>> units;
  bool operator<(const PlanSignature& o) const { return units < o.units; }
};

PlanSignature signature(const ExecutionPlan& plan) {
  PlanSignature s;
  for (const auto& u : plan.units) {
    auto lf = u.leaves;
    std::sort(lf.begin(), lf.end());
    s.units.push_back({u.piv, std::move(lf)});
  }
  return s;
}

}  // namespace

void classify_edges(ExecutionPlan& plan, const QueryPattern& p) {
  const std::size_t n = p.size();
  std::vector<bool> in_prefix(n, false);
  std::vector<std::set<QueryVertex>> leaf_sets;
  for (auto& u : plan.units) {
    u.e_star.clear();
    u.e_sib.clear();
    u.e_cro.clear();
    leaf_sets.push_back(std::set<QueryVertex>(u.leaves.begin(), u.leaves.end()));
  }
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    auto& unit = plan.units[i];
    if (i > 0 && !in_prefix[unit.piv])
      throw Error(Errc::NotAPlan,
                  "unit " + std::to_string(i) + " pivot not in the accumulated subpattern");
    for (QueryVertex lf : unit.leaves) {
      if (!p.has_edge(unit.piv, lf))
        throw Error(Errc::NotAPlan, "leaf not adjacent to pivot");
      unit.e_star.push_back({unit.piv, lf});
      for (QueryVertex w : p.neighbors(lf)) {
        if (w == unit.piv) continue;
        if (leaf_sets[i].count(w)) {
          if (lf < w) unit.e_sib.push_back({lf, w});
        } else if (in_prefix[w]) {
          unit.e_cro.push_back({w, lf});
        }
      }
    }
    in_prefix[unit.piv] = true;
    for (QueryVertex lf : unit.leaves) in_prefix[lf] = true;
  }
  for (QueryVertex u = 0; u < n; ++u)
    if (!in_prefix[u]) throw Error(Errc::NotAPlan, "pattern vertex missing from plan");
}

void compute_matching_order(ExecutionPlan& plan, const QueryPattern& p) {
  const std::size_t n = p.size();
  std::vector<std::uint32_t> pivot_unit(n, kInfDistance);
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    if (pivot_unit[plan.units[i].piv] == kInfDistance)
      pivot_unit[plan.units[i].piv] = static_cast<std::uint32_t>(i);
  }

  plan.matching_order.clear();
  std::vector<bool> placed(n, false);
  std::vector<bool> in_sub(n, false);  // accumulated subpattern P_i membership
  auto place = [&](QueryVertex u) {
    if (!placed[u]) {
      placed[u] = true;
      plan.matching_order.push_back(u);
    }
  };

  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    auto& unit = plan.units[i];
    in_sub[unit.piv] = true;
    for (QueryVertex lf : unit.leaves) in_sub[lf] = true;
    place(unit.piv);

    auto deg_in_sub = [&](QueryVertex u) {
      std::size_t d = 0;
      for (QueryVertex w : p.neighbors(u))
        if (in_sub[w]) ++d;
      return d;
    };

    std::vector<QueryVertex> pivots, plain;
    for (QueryVertex lf : unit.leaves)
      (pivot_unit[lf] != kInfDistance ? pivots : plain).push_back(lf);
    std::sort(pivots.begin(), pivots.end(),
              [&](QueryVertex a, QueryVertex b) { return pivot_unit[a] < pivot_unit[b]; });
    std::sort(plain.begin(), plain.end(), [&](QueryVertex a, QueryVertex b) {
      std::size_t da = deg_in_sub(a), db = deg_in_sub(b);
      if (da != db) return da > db;
      return a < b;
    });
    unit.leaves.clear();
    for (QueryVertex u : pivots) {
      unit.leaves.push_back(u);
      place(u);
    }
    for (QueryVertex u : plain) {
      unit.leaves.push_back(u);
      place(u);
    }
  }

  plan.position.assign(n, 0);
  for (std::uint32_t i = 0; i < plan.matching_order.size(); ++i)
    plan.position[plan.matching_order[i]] = i;
}

namespace {

/// Lexicographically smallest spanning tree of the subgraph induced by the
/// MCDS: the canonical maximum-leaf spanning tree the plans are built from.
std::vector<QueryEdge> canonical_mcds_tree(const QueryPattern& p,
                                           const std::vector<QueryVertex>& d) {
  std::vector<QueryEdge> edges;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (p.has_edge(d[i], d[j])) edges.push_back({std::min(d[i], d[j]), std::max(d[i], d[j])});
  std::sort(edges.begin(), edges.end());

  // greedy matroid basis: smallest edges first, skipping cycles
  std::map<QueryVertex, QueryVertex> root;
  for (QueryVertex u : d) root[u] = u;
  auto find = [&](QueryVertex u) {
    while (root[u] != u) u = root[u] = root[root[u]];
    return u;
  };
  std::vector<QueryEdge> tree;
  for (auto [a, b] : edges) {
    QueryVertex ra = find(a), rb = find(b);
    if (ra != rb) {
      root[ra] = rb;
      tree.push_back({a, b});
    }
  }
  return tree;
}

}  // namespace

std::vector<ExecutionPlan> enumerate_min_plans(const QueryPattern& p) {
  auto mcds = connected_dominating_number(p);
  std::vector<ExecutionPlan> out;
  std::set<PlanSignature> seen;

  for (const auto& d : mcds.mcds_list) {
    std::set<QueryVertex> in_d(d.begin(), d.end());
    auto tree = canonical_mcds_tree(p, d);

    for (QueryVertex r : d) {
      // orient the tree away from the root
      std::map<QueryVertex, std::vector<QueryVertex>> children;
      {
        std::map<QueryVertex, std::vector<QueryVertex>> adj_map;
        for (auto [a, b] : tree) {
          adj_map[a].push_back(b);
          adj_map[b].push_back(a);
        }
        std::vector<QueryVertex> stack{r};
        std::set<QueryVertex> visited{r};
        while (!stack.empty()) {
          QueryVertex u = stack.back();
          stack.pop_back();
          for (QueryVertex w : adj_map[u]) {
            if (visited.insert(w).second) {
              children[u].push_back(w);
              stack.push_back(w);
            }
          }
        }
      }

      // every linear extension of the rooted tree is a valid unit ordering
      std::vector<QueryVertex> pivots{r};
      std::vector<QueryVertex> avail = children[r];
      auto finish = [&]() {
        ExecutionPlan plan;
        std::map<QueryVertex, std::size_t> unit_of;
        for (std::size_t i = 0; i < pivots.size(); ++i) {
          DecompositionUnit u;
          u.piv = pivots[i];
          unit_of[pivots[i]] = i;
          plan.units.push_back(std::move(u));
        }
        for (auto& [parent, kids] : children)
          for (QueryVertex kid : kids) plan.units[unit_of[parent]].leaves.push_back(kid);
        // non-MCDS vertices join the earliest unit with an adjacent pivot
        for (QueryVertex u = 0; u < p.size(); ++u) {
          if (in_d.count(u)) continue;
          for (std::size_t i = 0; i < pivots.size(); ++i) {
            if (p.has_edge(pivots[i], u)) {
              plan.units[i].leaves.push_back(u);
              break;
            }
          }
        }
        for (auto& unit : plan.units)
          if (unit.leaves.empty()) return;  // degenerate arrangement
        classify_edges(plan, p);
        compute_matching_order(plan, p);
        auto sig = signature(plan);
        if (seen.insert(sig).second) out.push_back(std::move(plan));
      };

      auto rec = [&](auto&& self) -> void {
        if (pivots.size() == d.size()) {
          finish();
          return;
        }
        for (std::size_t i = 0; i < avail.size(); ++i) {
          QueryVertex next = avail[i];
          auto saved = avail;
          avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(i));
          avail.insert(avail.end(), children[next].begin(), children[next].end());
          pivots.push_back(next);
          self(self);
          pivots.pop_back();
          avail = saved;
        }
      };
      rec(rec);
    }
  }
  return out;
}

double score_plan(const ExecutionPlan& plan, double rho) {
  double score = 0.0;
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    const auto& u = plan.units[i];
    score += static_cast<double>(u.e_sib.size() + u.e_cro.size()) /
             std::pow(static_cast<double>(i + 1), rho);
  }
  return score;
}

double score_plan_with_degree(const ExecutionPlan& plan, const QueryPattern& p, double rho) {
  double score = score_plan(plan, rho);
  for (std::size_t i = 0; i < plan.units.size(); ++i)
    score += static_cast<double>(p.degree(plan.units[i].piv)) / static_cast<double>(i + 1);
  return score;
}

ExecutionPlan select_plan(const QueryPattern& p, double rho) {
  auto plans = enumerate_min_plans(p);
  if (plans.empty()) throw Error(Errc::NotAPlan, "no execution plan found");
  for (auto& pl : plans) pl.rho = rho;

  constexpr double kEps = 1e-9;
  std::uint32_t best_span = kInfDistance;
  for (const auto& pl : plans) best_span = std::min(best_span, p.span(pl.units[0].piv));

  std::vector<const ExecutionPlan*> pool;
  for (const auto& pl : plans)
    if (p.span(pl.units[0].piv) == best_span) pool.push_back(&pl);

  double best = -1.0;
  for (auto* pl : pool) best = std::max(best, score_plan(*pl, rho));
  std::erase_if(pool, [&](const ExecutionPlan* pl) { return score_plan(*pl, rho) < best - kEps; });

  double best_deg = -1.0;
  for (auto* pl : pool) best_deg = std::max(best_deg, score_plan_with_degree(*pl, p, rho));
  std::erase_if(pool, [&](const ExecutionPlan* pl) {
    return score_plan_with_degree(*pl, p, rho) < best_deg - kEps;
  });

  auto lex_key = [](const ExecutionPlan& pl) {
    std::vector<std::vector<QueryVertex>> key;
    for (const auto& u : pl.units) {
      std::vector<QueryVertex> row{u.piv};
      row.insert(row.end(), u.leaves.begin(), u.leaves.end());
      key.push_back(std::move(row));
    }
    return key;
  };
  const ExecutionPlan* winner = pool.front();
  for (auto* pl : pool)
    if (lex_key(*pl) < lex_key(*winner)) winner = pl;
  return *winner;
}

std::string format_plan(const ExecutionPlan& plan, const QueryPattern& p) {
  std::ostringstream os;
  auto edges = [&](const std::vector<QueryEdge>& es) {
    std::ostringstream s;
    for (std::size_t i = 0; i < es.size(); ++i)
      s << (i ? " " : "") << "(" << es[i].first << "," << es[i].second << ")";
    return s.str();
  };
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    const auto& u = plan.units[i];
    os << "unit " << i << ": piv=" << u.piv << " leaves=[";
    for (std::size_t j = 0; j < u.leaves.size(); ++j) os << (j ? " " : "") << u.leaves[j];
    os << "] star=[" << edges(u.e_star) << "] sib=[" << edges(u.e_sib) << "] cro=["
       << edges(u.e_cro) << "]\n";
  }
  os << "matching order:";
  for (QueryVertex u : plan.matching_order) os << " " << u;
  os << "\nscore: " << score_plan(plan, plan.rho)
     << "\nscore+degree: " << score_plan_with_degree(plan, p, plan.rho) << "\n";
  return os.str();
}

}  // namespace rads
