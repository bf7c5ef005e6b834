#include "rads/worker.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <exception>
#include <iostream>
#include <set>
#include <thread>

namespace rads {

std::vector<VertexId> collect_pivot_targets(const EmbeddingTrie& trie,
                                            const std::vector<ResultId>& frontier,
                                            const ExecutionPlan& plan, std::size_t unit_index) {
  const std::uint32_t pos = plan.position[plan.units[unit_index].piv];
  std::set<VertexId> targets;
  for (ResultId id : frontier) {
    if (!trie.is_live(id)) continue;
    targets.insert(trie.result_vertices(id)[pos]);
  }
  return {targets.begin(), targets.end()};
}

void Worker::verify_and_filter(EmbeddingTrie& trie, EdgeVerificationIndex& evi,
                               WorkerReport& rep) {
  if (evi.empty()) return;
  std::vector<EdgeKey> keys;
  keys.reserve(evi.size());
  for (const auto& [edge, ids] : evi.entries()) keys.push_back(edge);

  std::unordered_map<EdgeKey, bool, EdgeKeyHash> round_verdicts;
  if (cfg_.skip_verify) {
    for (const EdgeKey& e : keys) round_verdicts[e] = true;
  } else {
    round_verdicts = verify_edges(keys, pv_, transport_, rep.traffic);
    for (const auto& [e, ok] : round_verdicts) verdicts_[e] = ok;
  }
  filter_failed(evi, round_verdicts, trie);
}

void Worker::run_region_group(const std::vector<VertexId>& seeds, WorkerReport& rep) {
  EmbeddingTrie trie(p_.size());
  EdgeVerificationIndex evi;
  Expander ex(pv_, p_, plan_, cons_, trie, evi, verdicts_);
  ex.set_adjacency_provider([&](VertexId v) {
    if (!pv_.owns(v) && !pv_.cached(v)) {
      fetch_vertices({v}, pv_, transport_, rep.traffic);
      pv_.cache_evict(cfg_.cache_budget);
    }
  });

  // round 0: stolen groups may seed foreign candidates
  std::vector<VertexId> missing;
  for (VertexId v : seeds)
    if (!pv_.owns(v) && !pv_.cached(v)) missing.push_back(v);
  if (!missing.empty()) {
    fetch_vertices(missing, pv_, transport_, rep.traffic);
    pv_.cache_evict(cfg_.cache_budget);
  }
  const QueryVertex u_start = plan_.units[0].piv;
  for (VertexId v : seeds) {
    if (pv_.degree(v) < p_.degree(u_start)) continue;
    ex.expand_seed(v);
  }
  verify_and_filter(trie, evi, rep);

  for (std::size_t i = 1; i < plan_.units.size(); ++i) {
    const std::size_t frontier_level = plan_.prefix_size(i - 1) - 1;
    auto frontier = trie.level_results(frontier_level);
    if (frontier.empty()) break;

    auto targets = collect_pivot_targets(trie, frontier, plan_, i);
    std::vector<VertexId> to_fetch;
    for (VertexId v : targets)
      if (!pv_.owns(v) && !pv_.cached(v)) to_fetch.push_back(v);
    if (!to_fetch.empty()) {
      fetch_vertices(to_fetch, pv_, transport_, rep.traffic);
      pv_.cache_evict(cfg_.cache_budget);
    }

    for (ResultId f : frontier) {
      if (!trie.is_live(f)) continue;
      ex.expand(f, i);
    }
    verify_and_filter(trie, evi, rep);
  }

  const std::size_t final_level = p_.size() - 1;
  rep.rmeef_count += trie.live_count(final_level);
  if (cfg_.collect_results) {
    for (ResultId id : trie.level_results(final_level)) {
      auto path = trie.result_vertices(id);
      std::vector<VertexId> emb(p_.size(), kNoVertex);
      for (std::size_t j = 0; j < path.size(); ++j) emb[plan_.matching_order[j]] = path[j];
      rep.results.push_back(std::move(emb));
    }
  }
  rep.peak_trie_nodes = std::max(rep.peak_trie_nodes, trie.peak_node_count());
  ++rep.groups_processed;
}

WorkerReport Worker::run() {
  WorkerReport rep;
  rep.machine = pv_.machine_id();

  auto split = split_candidates(pv_, p_, plan_.units[0].piv);
  for (std::size_t i = 0; i < cfg_.demote_c1 && !split.local_only.empty(); ++i) {
    split.distributed.push_back(split.local_only.back());
    split.local_only.pop_back();
  }
  std::sort(split.distributed.begin(), split.distributed.end());
  rep.c1_size = split.local_only.size();
  rep.c2_size = split.distributed.size();

  // SM-E runs to completion before the distributed phase starts
  auto local = local_enumerate(pv_, p_, plan_, cons_, split.local_only, rep.stats);
  rep.sm_e_count = local.size();
  if (cfg_.collect_results)
    rep.results.insert(rep.results.end(), local.begin(), local.end());

  auto groups = find_region_groups(split.distributed, cfg_.memory_budget, rep.stats, pv_);
  rep.groups_created = groups.size();
  for (const auto& g : groups)
    rep.max_group_estimate = std::max(rep.max_group_estimate, g.estimated_bytes);
  table_.assign(std::move(groups));

  if (cfg_.defer_start_ms > 0)
    std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.defer_start_ms));

  while (auto g = table_.claim_one()) run_region_group(*g, rep);

  // work stealing until every peer reports an empty table
  while (transport_.machine_count() > 1) {
    StealOutcome outcome = steal_work(transport_, rep.traffic);
    if (outcome.group) {
      run_region_group(*outcome.group, rep);
    } else if (outcome.cluster_empty) {
      break;
    }
    // otherwise a race stole the group first; sweep again
  }

  // soft memory property: estimates are heuristic, so only warn
  const std::uint64_t peak_bytes = rep.peak_trie_nodes * kTrieNodeBytes;
  if (rep.max_group_estimate > 0 && peak_bytes > 2 * rep.max_group_estimate)
    std::cerr << "worker " << pv_.machine_id() << ": peak trie bytes " << peak_bytes
              << " exceeded twice the largest group estimate " << rep.max_group_estimate
              << "\n";
  return rep;
}

RunSummary run_loopback(std::vector<PartitionView>& views, const QueryPattern& p,
                        const std::vector<WorkerConfig>& configs) {
  const std::size_t m = views.size();
  const double rho = configs.empty() ? 1.0 : configs.front().rho;
  ExecutionPlan plan = select_plan(p, rho);
  OrderConstraints cons = symmetry_constraints(p);

  std::vector<GroupTable> tables(m);
  std::vector<DaemonHandler> handlers;
  handlers.reserve(m);
  for (std::size_t t = 0; t < m; ++t) handlers.emplace_back(views[t], tables[t]);

  LoopbackNetwork net(m);
  for (std::size_t t = 0; t < m; ++t)
    net.start_daemon(static_cast<MachineId>(t), &handlers[t]);

  std::vector<std::unique_ptr<LoopbackTransport>> transports;
  transports.reserve(m);
  for (std::size_t t = 0; t < m; ++t)
    transports.push_back(std::make_unique<LoopbackTransport>(net, static_cast<MachineId>(t)));

  RunSummary summary;
  summary.workers.resize(m);
  std::vector<std::exception_ptr> errors(m);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < m; ++t) {
    threads.emplace_back([&, t] {
      try {
        Worker w(views[t], p, plan, cons, configs[t], *transports[t], tables[t]);
        summary.workers[t] = w.run();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  net.stop_all();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::uint64_t claimed_total = 0, created_total = 0, processed_total = 0;
  for (std::size_t t = 0; t < m; ++t) {
    summary.total += summary.workers[t].total();
    claimed_total += tables[t].claimed();
    created_total += tables[t].total();
    processed_total += summary.workers[t].groups_processed;
  }
  if (claimed_total != created_total || processed_total != created_total)
    throw Error(Errc::TransportFailure, "region groups were not processed exactly once");
  return summary;
}

RunSummary run_loopback(std::vector<PartitionView>& views, const QueryPattern& p,
                        const WorkerConfig& cfg) {
  return run_loopback(views, p, std::vector<WorkerConfig>(views.size(), cfg));
}

}  // namespace rads
