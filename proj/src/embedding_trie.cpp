#include "rads/embedding_trie.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace rads {

std::uint32_t EmbeddingTrie::find_child(std::int32_t parent, VertexId v) const {
  auto it = children_.find(ChildKey{parent, v});
  return it == children_.end() ? 0xffffffffu : it->second;
}

std::uint32_t EmbeddingTrie::alloc_node(VertexId v, std::int32_t parent, std::uint16_t level) {
  if (level >= levels_) {
    levels_ = level + 1;
    level_index_.resize(levels_);
    live_per_level_.resize(levels_, 0);
  }
  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{});
  }
  Node& n = nodes_[slot];
  n.v = v;
  n.parent = parent;
  n.child_count = 0;
  n.level = level;
  n.live = false;
  n.allocated = true;
  return slot;
}

void EmbeddingTrie::commit_node(std::uint32_t slot) {
  Node& n = nodes_[slot];
  assert(n.allocated && !n.live);
  n.live = true;
  if (n.parent != kNoParent) ++nodes_[n.parent].child_count;
  children_[ChildKey{n.parent, n.v}] = slot;
  level_index_[n.level].push_back(ResultId{slot, n.generation});
  ++live_per_level_[n.level];
  ++live_nodes_;
  peak_nodes_ = std::max(peak_nodes_, live_nodes_);
}

void EmbeddingTrie::release_node(std::uint32_t slot) {
  Node& n = nodes_[slot];
  assert(n.allocated && !n.live && n.child_count == 0);
  n.allocated = false;
  ++n.generation;
  free_slots_.push_back(slot);
}

ResultId EmbeddingTrie::insert_root(VertexId v) {
  std::uint32_t existing = find_child(kNoParent, v);
  if (existing != 0xffffffffu && nodes_[existing].live) return id_of(existing);
  std::uint32_t slot = alloc_node(v, kNoParent, 0);
  commit_node(slot);
  return id_of(slot);
}

ResultId EmbeddingTrie::insert_path(ResultId parent, std::span<const VertexId> suffix) {
  if (!is_live(parent)) throw Error(Errc::StaleId, "insert_path from a removed result");
  std::int32_t cur = static_cast<std::int32_t>(parent.slot);
  std::uint16_t level = nodes_[parent.slot].level;
  for (VertexId v : suffix) {
    ++level;
    std::uint32_t child = find_child(cur, v);
    if (child != 0xffffffffu && nodes_[child].live) {
      cur = static_cast<std::int32_t>(child);
    } else {
      std::uint32_t slot = alloc_node(v, cur, level);
      commit_node(slot);
      cur = static_cast<std::int32_t>(slot);
    }
  }
  return id_of(static_cast<std::uint32_t>(cur));
}

ResultId EmbeddingTrie::insert_path(VertexId root, std::span<const VertexId> suffix) {
  ResultId r = insert_root(root);
  if (suffix.empty()) return r;
  return insert_path(r, suffix);
}

bool EmbeddingTrie::is_live(ResultId id) const {
  return id.valid() && id.slot < nodes_.size() && nodes_[id.slot].allocated &&
         nodes_[id.slot].live && nodes_[id.slot].generation == id.generation;
}

std::vector<VertexId> EmbeddingTrie::result_vertices(ResultId id) const {
  if (!is_live(id)) throw Error(Errc::StaleId, "result was removed");
  std::vector<VertexId> out;
  std::int32_t cur = static_cast<std::int32_t>(id.slot);
  while (cur != kNoParent) {
    out.push_back(nodes_[cur].v);
    cur = nodes_[cur].parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void EmbeddingTrie::remove_result(ResultId id) {
  if (!is_live(id)) return;  // several failed edges may indict one result
  std::int32_t cur = static_cast<std::int32_t>(id.slot);
  while (cur != kNoParent) {
    Node& n = nodes_[cur];
    assert(n.child_count == 0);
    children_.erase(ChildKey{n.parent, n.v});
    n.live = false;
    n.allocated = false;
    ++n.generation;
    --live_per_level_[n.level];
    --live_nodes_;
    free_slots_.push_back(static_cast<std::uint32_t>(cur));
    std::int32_t parent = n.parent;
    if (parent == kNoParent) break;
    if (--nodes_[parent].child_count > 0) break;
    cur = parent;
  }
}

std::vector<ResultId> EmbeddingTrie::level_results(std::size_t level) {
  auto& idx = level_index_[level];
  std::vector<ResultId> live;
  live.reserve(live_per_level_[level]);
  for (ResultId id : idx)
    if (is_live(id)) live.push_back(id);
  idx = live;
  return live;
}

void EmbeddingTrie::clear() {
  nodes_.clear();
  free_slots_.clear();
  children_.clear();
  for (auto& lvl : level_index_) lvl.clear();
  std::fill(live_per_level_.begin(), live_per_level_.end(), 0);
  live_nodes_ = 0;
}

void EmbeddingTrie::audit() const {
  std::vector<std::uint32_t> counts(nodes_.size(), 0);
  std::set<std::pair<std::int32_t, VertexId>> sibs;
  std::vector<std::size_t> per_level(levels_, 0);
  std::size_t live = 0;
  for (std::uint32_t s = 0; s < nodes_.size(); ++s) {
    const Node& n = nodes_[s];
    if (!n.allocated || !n.live) continue;
    ++live;
    ++per_level[n.level];
    if (!sibs.insert({n.parent, n.v}).second)
      throw Error(Errc::StaleId, "audit: sibling vertices not distinct");
    if (n.parent != kNoParent) {
      const Node& par = nodes_[n.parent];
      if (!par.live) throw Error(Errc::StaleId, "audit: live node under dead parent");
      if (par.level + 1 != n.level) throw Error(Errc::StaleId, "audit: level mismatch");
      ++counts[n.parent];
    } else if (n.level != 0) {
      throw Error(Errc::StaleId, "audit: root not at level 0");
    }
  }
  for (std::uint32_t s = 0; s < nodes_.size(); ++s) {
    if (nodes_[s].allocated && nodes_[s].live && nodes_[s].child_count != counts[s])
      throw Error(Errc::StaleId, "audit: childCount drift");
  }
  if (live != live_nodes_) throw Error(Errc::StaleId, "audit: live-node counter drift");
  for (std::size_t l = 0; l < levels_; ++l)
    if (per_level[l] != live_per_level_[l])
      throw Error(Errc::StaleId, "audit: per-level counter drift");
}

EdgePresence Expander::resolve(VertexId a, VertexId b) const {
  EdgePresence pres = pv_.edge_presence(a, b);
  if (pres != EdgePresence::Undetermined) return pres;
  auto it = verdicts_.find(EdgeKey(a, b));
  if (it != verdicts_.end()) return it->second ? EdgePresence::Present : EdgePresence::Absent;
  return EdgePresence::Undetermined;
}

void Expander::prepare_unit(std::size_t unit_index) {
  unit_ = &plan_.units[unit_index];
  unit_index_ = unit_index;
  f_.assign(p_.size(), kNoVertex);
  const std::size_t nl = unit_->leaves.size();
  base_cands_.assign(nl, {});
  check_peers_.assign(nl, {});
  sib_refine_.assign(nl, {});
  cro_peers_.assign(nl, {});
  for (std::size_t li = 0; li < nl; ++li) {
    QueryVertex u = unit_->leaves[li];
    for (auto [w, lf] : unit_->e_cro) {
      if (lf == u) cro_peers_[li].push_back(w);
    }
    for (auto [a, b] : unit_->e_sib) {
      QueryVertex other = (a == u) ? b : (b == u) ? a : u;
      if (other == u) continue;
      // mapped earlier within this unit?
      for (std::size_t lj = 0; lj < li; ++lj) {
        if (unit_->leaves[lj] == other) {
          sib_refine_[li].push_back(other);
          break;
        }
      }
    }
    check_peers_[li] = cro_peers_[li];
    check_peers_[li].insert(check_peers_[li].end(), sib_refine_[li].begin(),
                            sib_refine_[li].end());
  }
}

namespace {

std::vector<VertexId> intersect_sorted(const std::vector<VertexId>& a,
                                       const std::vector<VertexId>& b) {
  std::vector<VertexId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void Expander::run_unit(std::int32_t start_slot, ResultId frontier, bool seeded) {
  VertexId v_piv = f_[unit_->piv];
  if (!pv_.adjacency_known(v_piv) && ensure_adjacency_) ensure_adjacency_(v_piv);
  if (!pv_.adjacency_known(v_piv))
    throw Error(Errc::MissingAdjacency, "pivot image " + std::to_string(v_piv));

  const std::size_t nl = unit_->leaves.size();
  bool dead = false;
  for (std::size_t li = 0; li < nl && !dead; ++li) {
    std::vector<VertexId> cand = pv_.adjacency(v_piv);
    for (QueryVertex w : cro_peers_[li]) {
      if (f_[w] != kNoVertex && pv_.adjacency_known(f_[w]))
        cand = intersect_sorted(cand, pv_.adjacency(f_[w]));
    }
    if (cand.empty()) dead = true;
    base_cands_[li] = std::move(cand);
  }

  bool found = false;
  if (!dead) found = adj_enum(start_slot, 0);

  if (seeded) {
    if (found)
      trie_.commit_node(static_cast<std::uint32_t>(start_slot));
    else
      trie_.release_node(static_cast<std::uint32_t>(start_slot));
  } else if (!found) {
    trie_.remove_result(frontier);
    ++counters_.frontier_removed;
  }
}

void Expander::expand_seed(VertexId seed) {
  prepare_unit(0);
  f_[unit_->piv] = seed;
  std::uint32_t root = trie_.alloc_node(seed, EmbeddingTrie::kNoParent, 0);
  run_unit(static_cast<std::int32_t>(root), ResultId{}, /*seeded=*/true);
  f_[unit_->piv] = kNoVertex;
}

void Expander::expand(ResultId frontier, std::size_t unit_index) {
  prepare_unit(unit_index);
  auto path = trie_.result_vertices(frontier);
  for (std::size_t j = 0; j < path.size(); ++j) f_[plan_.matching_order[j]] = path[j];
  run_unit(trie_.slot_of(frontier), frontier, /*seeded=*/false);
  for (std::size_t j = 0; j < path.size(); ++j) f_[plan_.matching_order[j]] = kNoVertex;
}

bool Expander::adj_enum(std::int32_t parent_slot, std::size_t leaf_index) {
  QueryVertex u = unit_->leaves[leaf_index];
  std::vector<VertexId> cands = base_cands_[leaf_index];
  for (QueryVertex w : sib_refine_[leaf_index]) {
    if (f_[w] != kNoVertex && pv_.adjacency_known(f_[w]))
      cands = intersect_sorted(cands, pv_.adjacency(f_[w]));
  }

  bool found = false;
  for (VertexId v : cands) {
    bool used = false;
    for (VertexId mapped : f_)
      if (mapped == v) {
        used = true;
        break;
      }
    if (used) continue;
    if (pv_.adjacency_known(v) && pv_.degree(v) < p_.degree(u)) continue;
    if (!cons_.admits(u, v, f_, kNoVertex)) continue;

    bool ok = true;
    for (QueryVertex w : check_peers_[leaf_index]) {
      if (f_[w] == kNoVertex) continue;
      if (resolve(v, f_[w]) == EdgePresence::Absent) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    ++counters_.candidates_admitted;
    f_[u] = v;
    std::uint32_t slot =
        trie_.alloc_node(v, parent_slot, static_cast<std::uint16_t>(plan_.position[u]));
    bool success;
    if (leaf_index + 1 == unit_->leaves.size()) {
      // full EC of P_i: queue its undetermined verification edges
      for (auto [a, b] : unit_->e_sib) {
        if (resolve(f_[a], f_[b]) == EdgePresence::Undetermined)
          evi_.add(EdgeKey(f_[a], f_[b]), trie_.id_of(slot));
      }
      for (auto [a, b] : unit_->e_cro) {
        if (resolve(f_[a], f_[b]) == EdgePresence::Undetermined)
          evi_.add(EdgeKey(f_[a], f_[b]), trie_.id_of(slot));
      }
      ++counters_.results_completed;
      success = true;
    } else {
      success = adj_enum(static_cast<std::int32_t>(slot), leaf_index + 1);
    }
    if (success) {
      trie_.commit_node(slot);
      found = true;
    } else {
      trie_.release_node(slot);
    }
    f_[u] = kNoVertex;
  }
  return found;
}

void filter_failed(EdgeVerificationIndex& evi,
                   const std::unordered_map<EdgeKey, bool, EdgeKeyHash>& verdicts,
                   EmbeddingTrie& trie) {
  for (const auto& [edge, ids] : evi.entries()) {
    auto it = verdicts.find(edge);
    if (it == verdicts.end())
      throw Error(Errc::MissingVerdict,
                  "(" + std::to_string(edge.a) + "," + std::to_string(edge.b) + ")");
    if (!it->second) {
      for (ResultId id : ids) trie.remove_result(id);
    }
  }
  evi.clear();
}

}  // namespace rads
