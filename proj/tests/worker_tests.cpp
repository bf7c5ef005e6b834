#include <doctest.h>

#include <random>

#include "rads/partition_io.hpp"
#include "rads/random_graph.hpp"
#include "rads/worker.hpp"
#include "test_support.hpp"

using namespace rads;

namespace {

std::uint64_t oracle_count(const Graph& g, const QueryPattern& p) {
  return oracle_enumerate(g, p).size();
}

RunSummary run_cluster(const Graph& g, const QueryPattern& p, std::size_t m, WorkerConfig cfg) {
  auto views = build_views(g, hash_partition(g, m), m);
  return run_loopback(views, p, cfg);
}

}  // namespace

TEST_CASE("one worker owning everything reproduces the oracle") {
  Graph g = generate_graph(30, 5.0, 2);
  QueryPattern p = benchmark_pattern();
  WorkerConfig cfg;
  cfg.collect_results = true;
  auto summary = run_cluster(g, p, 1, cfg);
  CHECK(test::as_set(summary.all_results()) == test::as_set(oracle_enumerate(g, p)));
  // the single-machine case is pure SM-E
  CHECK(summary.workers[0].rmeef_count == 0);
  CHECK(summary.workers[0].traffic.fetch_requests == 0);
  CHECK(summary.workers[0].traffic.verify_requests == 0);
}

TEST_CASE("disjoint partitions exchange no data-plane messages") {
  // two cliques, one per machine: every candidate is provably local
  Graph g;
  for (VertexId a = 0; a < 4; ++a)
    for (VertexId b = a + 1; b < 4; ++b) {
      g.add_edge(a, b);
      g.add_edge(a + 10, b + 10);
    }
  g.finalize();
  std::unordered_map<VertexId, MachineId> owners;
  for (VertexId v = 0; v < 4; ++v) owners[v] = 0;
  for (VertexId v = 10; v < 14; ++v) owners[v] = 1;
  auto views = build_views(g, owners, 2);

  QueryPattern p = test::triangle();
  RunSummary summary = run_loopback(views, p, WorkerConfig{});
  CHECK(summary.total == 8);  // 4 triangles per K4
  for (const auto& w : summary.workers) {
    CHECK(w.c2_size == 0);
    CHECK(w.traffic.fetch_requests == 0);
    CHECK(w.traffic.verify_requests == 0);
  }
}

TEST_CASE("two workers on a random graph match the oracle for the benchmark pattern") {
  Graph g = generate_graph(60, 8.0, 14);
  QueryPattern p = benchmark_pattern();
  auto summary = run_cluster(g, p, 2, WorkerConfig{});
  CHECK(summary.total == oracle_count(g, p));
  std::uint64_t distributed = 0;
  for (const auto& w : summary.workers) distributed += w.rmeef_count;
  CHECK(distributed > 0);  // the distributed path genuinely ran
}

TEST_CASE("counts agree across machine counts and patterns") {
  std::mt19937_64 rng(4242);
  std::vector<QueryPattern> patterns{test::edge_pattern(), test::wedge(), test::triangle(),
                                     test::square()};
  for (int iter = 0; iter < 3; ++iter) {
    Graph g = generate_graph(40 + rng() % 30, 5.0, rng());
    for (const auto& p : patterns) {
      std::uint64_t expected = oracle_count(g, p);
      for (std::size_t m : {1, 2, 3}) {
        auto summary = run_cluster(g, p, m, WorkerConfig{});
        CHECK(summary.total == expected);
      }
    }
  }
}

TEST_CASE("the walk-through graph produces the paper's final embedding") {
  Graph g = test::example_graph();
  QueryPattern p = benchmark_pattern();
  auto views = build_views(g, test::example_ownership(), 2);
  WorkerConfig cfg;
  cfg.collect_results = true;
  auto summary = run_loopback(views, p, cfg);

  auto expected = test::as_set(oracle_enumerate(g, p));
  CHECK(test::as_set(summary.all_results()) == expected);
  // u0..u9 -> v0,v1,v2,v3,v4,v5,v6,v7,v9,v11
  std::vector<VertexId> pinned{0, 1, 2, 3, 4, 5, 6, 7, 9, 11};
  CHECK(expected.count(pinned) == 1);
}

TEST_CASE("the walk-through region group alone yields exactly the pinned embedding") {
  Graph g = test::example_graph();
  QueryPattern p = benchmark_pattern();
  auto views = build_views(g, test::example_ownership(), 2);

  // the walk-through's 4-unit plan, driven directly
  ExecutionPlan plan;
  {
    DecompositionUnit d0, d1, d2, d3;
    d0.piv = 0;
    d0.leaves = {1, 2, 7};
    d1.piv = 1;
    d1.leaves = {3, 4};
    d2.piv = 2;
    d2.leaves = {5, 6};
    d3.piv = 0;
    d3.leaves = {8, 9};
    plan.units = {d0, d1, d2, d3};
    classify_edges(plan, p);
    compute_matching_order(plan, p);
  }
  OrderConstraints cons = symmetry_constraints(p);

  GroupTable t0, t1;
  DaemonHandler h0(views[0], t0), h1(views[1], t1);
  LoopbackNetwork net(2);
  net.start_daemon(0, &h0);
  net.start_daemon(1, &h1);
  LoopbackTransport transport(net, 0);

  WorkerConfig cfg;
  cfg.collect_results = true;
  Worker worker(views[0], p, plan, cons, cfg, transport, t0);
  WorkerReport rep;
  rep.machine = 0;
  worker.run_region_group({0}, rep);
  net.stop_all();

  REQUIRE(rep.results.size() == 1);
  CHECK(rep.results[0] == std::vector<VertexId>{0, 1, 2, 3, 4, 5, 6, 7, 9, 11});
  // round 1 fetched the two pivot images from the peer in one request
  CHECK(rep.traffic.fetches_per_vertex.count(1) == 1);
  CHECK(rep.traffic.fetches_per_vertex.count(9) == 1);
}

TEST_CASE("collect_pivot_targets deduplicates frontier pivot images") {
  QueryPattern p5 = test::path5();
  ExecutionPlan plan5 = select_plan(p5);
  REQUIRE(plan5.units.size() == 3);

  EmbeddingTrie trie(5);
  std::size_t prefix = 1 + plan5.units[0].leaves.size();
  // two frontier results sharing the pivot image of unit 1
  const QueryVertex piv1 = plan5.units[1].piv;
  const std::uint32_t pos = plan5.position[piv1];
  std::vector<VertexId> a{100, 101, 102}, b{100, 101, 103}, c{200, 201, 202};
  // make sure the pivot image coincides for a and b regardless of position
  a[pos] = 55;
  b[pos] = 55;
  std::vector<ResultId> frontier;
  frontier.push_back(trie.insert_path(a[0], std::span<const VertexId>(a).subspan(1)));
  frontier.push_back(trie.insert_path(b[0], std::span<const VertexId>(b).subspan(1)));
  frontier.push_back(trie.insert_path(c[0], std::span<const VertexId>(c).subspan(1)));
  REQUIRE(prefix == 3);

  auto targets = collect_pivot_targets(trie, frontier, plan5, 1);
  std::set<VertexId> expect{55, c[pos]};
  CHECK(std::set<VertexId>(targets.begin(), targets.end()) == expect);

  CHECK(collect_pivot_targets(trie, {}, plan5, 1).empty());
}

TEST_CASE("one region group and singleton groups produce identical counts") {
  Graph g = generate_graph(50, 7.0, 77);
  QueryPattern p = test::square();
  std::uint64_t expected = oracle_count(g, p);

  WorkerConfig unbounded;
  auto one = run_cluster(g, p, 2, unbounded);
  CHECK(one.total == expected);

  WorkerConfig tiny;
  tiny.memory_budget = 1;  // every candidate becomes its own group
  auto many = run_cluster(g, p, 2, tiny);
  CHECK(many.total == expected);
  std::size_t groups_one = 0, groups_many = 0;
  for (const auto& w : one.workers) groups_one += w.groups_created;
  for (const auto& w : many.workers) groups_many += w.groups_created;
  CHECK(groups_many > groups_one);
}

TEST_CASE("demoting local-only candidates to the distributed path keeps the count") {
  Graph g = generate_graph(40, 5.0, 31);
  QueryPattern p = test::triangle();
  std::uint64_t expected = oracle_count(g, p);

  WorkerConfig demote;
  demote.demote_c1 = 1;
  auto summary = run_cluster(g, p, 2, demote);
  CHECK(summary.total == expected);

  WorkerConfig demote_all;
  demote_all.demote_c1 = 1000;
  auto all_distributed = run_cluster(g, p, 2, demote_all);
  CHECK(all_distributed.total == expected);
  for (const auto& w : all_distributed.workers) CHECK(w.sm_e_count == 0);
}

TEST_CASE("an unbounded cache never fetches a vertex twice") {
  Graph g = generate_graph(50, 6.0, 8);
  QueryPattern p = benchmark_pattern();
  auto summary = run_cluster(g, p, 3, WorkerConfig{});
  for (const auto& w : summary.workers) {
    CHECK(w.traffic.max_fetches_per_vertex() <= 1);
    CHECK(w.traffic.max_verifies_per_edge() <= 1);
  }
}

TEST_CASE("a starved cache still enumerates correctly") {
  Graph g = generate_graph(40, 6.0, 21);
  QueryPattern p = test::square();
  std::uint64_t expected = oracle_count(g, p);
  WorkerConfig cfg;
  cfg.cache_budget = 3 * PartitionView::entry_bytes(std::vector<VertexId>(8, 0));
  auto summary = run_cluster(g, p, 2, cfg);
  CHECK(summary.total == expected);
}

TEST_CASE("cache budget semantics on the view itself") {
  Graph g = test::path_graph(8);
  std::unordered_map<VertexId, MachineId> owners;
  for (VertexId v = 0; v < 8; ++v) owners[v] = v < 4 ? 0 : 1;
  auto views = build_views(g, owners, 2);
  auto& pv = views[0];

  pv.cache_insert(4, {3, 5});
  pv.cache_insert(5, {4, 6});
  pv.cache_evict(0);  // 0 means unbounded
  CHECK(pv.cache_entries() == 2);

  pv.cache_evict(PartitionView::entry_bytes({3, 5}));  // room for exactly one
  CHECK(pv.cache_entries() == 1);
  CHECK(pv.cached(5));  // least-recently-fetched entry was evicted first
}

TEST_CASE("work stealing moves groups and preserves the global count") {
  Graph g = generate_graph(60, 6.0, 13);
  QueryPattern p = test::triangle();
  std::uint64_t expected = oracle_count(g, p);

  auto views = build_views(g, hash_partition(g, 2), 2);
  std::vector<WorkerConfig> cfgs(2);
  cfgs[0].memory_budget = 1;      // many singleton groups on worker 0
  cfgs[0].defer_start_ms = 150;   // and a late start, so the peer must steal
  cfgs[0].demote_c1 = 1000;
  cfgs[1].demote_c1 = 1000;
  auto summary = run_loopback(views, p, cfgs);
  CHECK(summary.total == expected);
  CHECK(summary.workers[1].traffic.groups_stolen >= 1);

  // the opposite schedule reaches the same result set
  auto views2 = build_views(g, hash_partition(g, 2), 2);
  std::vector<WorkerConfig> cfgs2(2);
  cfgs2[0].memory_budget = 1;
  cfgs2[0].demote_c1 = 1000;
  cfgs2[1].demote_c1 = 1000;
  cfgs2[1].defer_start_ms = 150;
  auto summary2 = run_loopback(views2, p, cfgs2);
  CHECK(summary2.total == expected);
}

TEST_CASE("a worker processing a stolen group fetches what it needs") {
  // worker 1 owns nothing interesting; force it to steal worker 0's group
  Graph g = test::complete_graph(5);
  std::unordered_map<VertexId, MachineId> owners;
  for (VertexId v = 0; v < 5; ++v) owners[v] = 0;
  // give machine 1 a pendant vertex so it exists
  g = [] {
    Graph h = test::complete_graph(5);
    h.add_edge(0, 9);
    h.finalize();
    return h;
  }();
  owners[9] = 1;
  auto views = build_views(g, owners, 2);

  QueryPattern p = test::triangle();
  std::uint64_t expected = oracle_count(g, p);
  std::vector<WorkerConfig> cfgs(2);
  cfgs[0].defer_start_ms = 200;
  cfgs[0].demote_c1 = 1000;
  cfgs[0].memory_budget = 1;
  cfgs[1].defer_start_ms = 30;  // the victim publishes its groups well before this
  auto summary = run_loopback(views, p, cfgs);
  CHECK(summary.total == expected);
  CHECK(summary.workers[1].traffic.groups_stolen >= 1);
  CHECK(summary.workers[1].traffic.vertices_fetched >= 1);
}
