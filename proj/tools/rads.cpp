#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "rads/partition_io.hpp"
#include "rads/pattern.hpp"
#include "rads/planner.hpp"
#include "rads/random_graph.hpp"
#include "rads/sm_e.hpp"
#include "rads/transport.hpp"
#include "rads/worker.hpp"

namespace {

using nlohmann::json;

rads::QueryPattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rads::Error(rads::Errc::IoError, "cannot open pattern file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return rads::parse_pattern(text);
}

void print_results(const std::vector<std::vector<rads::VertexId>>& results,
                   const rads::ExecutionPlan& plan) {
  for (const auto& emb : results) {
    for (std::size_t j = 0; j < plan.matching_order.size(); ++j)
      std::cout << (j ? " " : "") << emb[plan.matching_order[j]];
    std::cout << '\n';
  }
}

json traffic_json(const rads::TrafficCounters& t) {
  return json{{"verify_requests", t.verify_requests},
              {"fetch_requests", t.fetch_requests},
              {"checkr_requests", t.checkr_requests},
              {"sharer_requests", t.sharer_requests},
              {"edges_verified", t.edges_verified},
              {"vertices_fetched", t.vertices_fetched},
              {"groups_stolen", t.groups_stolen},
              {"max_fetches_per_vertex", t.max_fetches_per_vertex()},
              {"max_verifies_per_edge", t.max_verifies_per_edge()}};
}

int cmd_partition(const std::string& graph_path, std::size_t machines,
                  const std::string& metis_path, const std::string& out_dir) {
  rads::Graph g = rads::load_graph(graph_path);
  std::unordered_map<rads::VertexId, rads::MachineId> owners;
  if (!metis_path.empty())
    owners = rads::load_metis_partition(metis_path, g);
  else
    owners = rads::hash_partition(g, machines);
  rads::write_partition_views(g, owners, out_dir);
  std::cout << "wrote " << rads::partition_machine_count(out_dir) << " partition views to "
            << out_dir << "\n";
  return 0;
}

int cmd_plan(const std::string& pattern_path, double rho) {
  rads::QueryPattern p = load_pattern(pattern_path);
  rads::ExecutionPlan plan = rads::select_plan(p, rho);
  std::cout << rads::format_plan(plan, p);
  return 0;
}

int cmd_oracle(const std::string& pattern_path, const std::string& graph_path,
               const std::string& emit) {
  rads::QueryPattern p = load_pattern(pattern_path);
  rads::Graph g = rads::load_graph(graph_path);
  auto results = rads::oracle_enumerate(g, p);
  if (emit == "results") {
    rads::ExecutionPlan plan = rads::select_plan(p, 1.0);
    print_results(results, plan);
  } else {
    std::cout << results.size() << "\n";
  }
  return 0;
}

int run_tcp_worker(const rads::QueryPattern& p, const std::string& parts_dir,
                   const std::string& hosts_path, int worker_id, const rads::WorkerConfig& cfg,
                   bool as_json) {
  auto hosts = rads::parse_hosts_file(hosts_path);
  if (worker_id < 0 || static_cast<std::size_t>(worker_id) >= hosts.size())
    throw rads::Error(rads::Errc::Usage, "--worker-id out of range for hosts file");
  auto self = static_cast<rads::MachineId>(worker_id);

  rads::PartitionView pv = rads::load_partition_view(parts_dir, self);
  rads::GroupTable table;
  rads::DaemonHandler handler(pv, table);
  rads::TcpDaemon daemon;
  daemon.start(hosts[worker_id].host, hosts[worker_id].port, &handler);

  rads::TcpTransport transport(hosts, self);
  rads::ExecutionPlan plan = rads::select_plan(p, cfg.rho);
  rads::OrderConstraints cons = rads::symmetry_constraints(p);
  rads::Worker worker(pv, p, plan, cons, cfg, transport, table);
  rads::WorkerReport rep = worker.run();
  transport.close_all();

  // peers may still need this daemon for verification or fetching
  while (daemon.open_connections() > 0 || daemon.idle_ms() < 500)
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  daemon.stop();

  std::ofstream count_file(parts_dir + "/count." + std::to_string(worker_id));
  count_file << rep.total() << "\n";

  if (cfg.collect_results) {
    print_results(rep.results, plan);
  } else if (as_json) {
    json j{{"worker", worker_id},
           {"count", rep.total()},
           {"sm_e", rep.sm_e_count},
           {"rmeef", rep.rmeef_count},
           {"peak_trie_nodes", rep.peak_trie_nodes},
           {"traffic", traffic_json(rep.traffic)}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << rep.total() << "\n";
  }
  return 0;
}

int cmd_run(const std::string& pattern_path, const std::string& parts_dir, std::size_t workers,
            const std::string& transport, const std::string& hosts_path, int worker_id,
            rads::WorkerConfig cfg, const std::string& emit, bool as_json) {
  rads::QueryPattern p = load_pattern(pattern_path);
  cfg.collect_results = (emit == "results");

  if (transport == "tcp") return run_tcp_worker(p, parts_dir, hosts_path, worker_id, cfg, as_json);

  std::size_t m = rads::partition_machine_count(parts_dir);
  if (m == 0) throw rads::Error(rads::Errc::IoError, "no part*.adj files in " + parts_dir);
  if (workers != 0 && workers != m)
    throw rads::Error(rads::Errc::Usage, "--workers does not match the partition directory");

  std::vector<rads::PartitionView> views;
  for (std::size_t t = 0; t < m; ++t)
    views.push_back(rads::load_partition_view(parts_dir, static_cast<rads::MachineId>(t)));

  rads::RunSummary summary = rads::run_loopback(views, p, cfg);

  if (cfg.collect_results) {
    rads::ExecutionPlan plan = rads::select_plan(p, cfg.rho);
    print_results(summary.all_results(), plan);
    return 0;
  }
  if (as_json) {
    json j;
    j["total"] = summary.total;
    std::size_t peak = 0;
    json ws = json::array();
    for (const auto& w : summary.workers) {
      peak = std::max(peak, w.peak_trie_nodes);
      ws.push_back(json{{"machine", w.machine},
                        {"count", w.total()},
                        {"sm_e", w.sm_e_count},
                        {"rmeef", w.rmeef_count},
                        {"c1", w.c1_size},
                        {"c2", w.c2_size},
                        {"groups", w.groups_created},
                        {"peak_trie_nodes", w.peak_trie_nodes},
                        {"traffic", traffic_json(w.traffic)}});
    }
    j["workers"] = ws;
    j["peak_trie_nodes"] = peak;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& w : summary.workers)
      std::cerr << "worker " << w.machine << ": " << w.total() << " (sm-e " << w.sm_e_count
                << ", r-meef " << w.rmeef_count << ")\n";
    std::cout << summary.total << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& pattern_path, const std::string& graph_path,
               std::size_t machines, std::size_t random_n, double random_avg_deg,
               std::uint64_t seed, bool fault_skip_verify) {
  rads::QueryPattern p = load_pattern(pattern_path);
  rads::Graph g;
  if (!graph_path.empty())
    g = rads::load_graph(graph_path);
  else if (random_n > 0)
    g = rads::generate_graph(random_n, random_avg_deg, seed);
  else
    throw rads::Error(rads::Errc::Usage, "verify needs --graph or --random-n");

  auto owners = rads::hash_partition(g, machines);
  auto views = rads::build_views(g, owners, machines);

  rads::WorkerConfig cfg;
  cfg.collect_results = true;
  cfg.skip_verify = fault_skip_verify;
  rads::RunSummary summary = rads::run_loopback(views, p, cfg);

  auto expected = rads::oracle_enumerate(g, p);
  std::set<std::vector<rads::VertexId>> want(expected.begin(), expected.end());
  auto got_list = summary.all_results();
  std::set<std::vector<rads::VertexId>> got(got_list.begin(), got_list.end());

  if (want == got && got_list.size() == want.size()) {
    std::cout << "OK " << want.size() << " embeddings\n";
    return 0;
  }
  std::cout << "MISMATCH distributed=" << got_list.size() << " oracle=" << want.size() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed subgraph enumeration engine"};
  app.require_subcommand(1);

  // partition
  std::string graph_path, metis_path, out_dir, pattern_path, parts_dir, hosts_path;
  std::size_t machines = 1;
  auto* partition = app.add_subcommand("partition", "split a graph into per-machine views");
  partition->add_option("--graph", graph_path, "adjacency-list graph file")->required();
  partition->add_option("--machines", machines, "number of machines")->default_val(1);
  partition->add_option("--metis", metis_path, "METIS partition file (overrides hashing)");
  partition->add_option("--out", out_dir, "output directory")->required();

  // plan
  double rho = 1.0;
  auto* plan = app.add_subcommand("plan", "print the selected execution plan");
  plan->add_option("--pattern", pattern_path, "pattern edge-list file")->required();
  plan->add_option("--rho", rho, "score parameter")->default_val(1.0)->check(CLI::PositiveNumber);

  // run
  std::string transport = "loopback", emit = "count";
  int worker_id = -1;
  std::size_t workers = 0;
  bool as_json = false;
  rads::WorkerConfig cfg;
  auto* run = app.add_subcommand("run", "run the distributed enumeration");
  run->add_option("--pattern", pattern_path, "pattern edge-list file")->required();
  run->add_option("--parts", parts_dir, "partition directory")->required();
  run->add_option("--workers", workers, "worker count (must match the partition)");
  run->add_option("--transport", transport, "loopback|tcp")->default_val("loopback");
  run->add_option("--hosts", hosts_path, "hosts file for tcp");
  run->add_option("--worker-id", worker_id, "this worker's id (tcp)");
  run->add_option("--memory-budget", cfg.memory_budget, "region-group budget in bytes, 0=unbounded");
  run->add_option("--cache-budget", cfg.cache_budget, "foreign-cache budget in bytes, 0=unbounded");
  run->add_option("--emit", emit, "count|results")->default_val("count");
  run->add_option("--rho", cfg.rho, "score parameter")->default_val(1.0)->check(CLI::PositiveNumber);
  run->add_flag("--json", as_json, "machine-readable summary");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "single-machine brute-force reference");
  oracle->add_option("--pattern", pattern_path, "pattern edge-list file")->required();
  oracle->add_option("--graph", graph_path, "adjacency-list graph file")->required();
  oracle->add_option("--emit", emit, "count|results")->default_val("count");

  // verify
  std::size_t random_n = 0;
  double random_avg_deg = 4.0;
  std::uint64_t seed = 1;
  bool fault_skip_verify = false;
  auto* verify = app.add_subcommand("verify", "partition in-memory, run, compare to the oracle");
  verify->add_option("--pattern", pattern_path, "pattern edge-list file")->required();
  verify->add_option("--graph", graph_path, "adjacency-list graph file");
  verify->add_option("--machines", machines, "number of workers")->default_val(2);
  verify->add_option("--random-n", random_n, "generate a random graph with n vertices");
  verify->add_option("--random-avg-deg", random_avg_deg, "average degree for --random-n");
  verify->add_option("--seed", seed, "rng seed for --random-n");
  verify->add_flag("--fault-skip-verify", fault_skip_verify,
                   "test-only: skip the edge-verification phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (partition->parsed()) return cmd_partition(graph_path, machines, metis_path, out_dir);
    if (plan->parsed()) return cmd_plan(pattern_path, rho);
    if (run->parsed())
      return cmd_run(pattern_path, parts_dir, workers, transport, hosts_path, worker_id, cfg,
                     emit, as_json);
    if (oracle->parsed()) return cmd_oracle(pattern_path, graph_path, emit);
    if (verify->parsed())
      return cmd_verify(pattern_path, graph_path, machines, random_n, random_avg_deg, seed,
                        fault_skip_verify);
  } catch (const rads::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == rads::Errc::Usage || e.code() == rads::Errc::ParseError ||
            e.code() == rads::Errc::Disconnected || e.code() == rads::Errc::SelfLoop ||
            e.code() == rads::Errc::DuplicateEdge || e.code() == rads::Errc::LengthMismatch ||
            e.code() == rads::Errc::BadPartId || e.code() == rads::Errc::IoError)
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
