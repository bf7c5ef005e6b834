#pragma once

#include <algorithm>
#include <cstddef>
#include <list>
#include <unordered_map>
#include <vector>

#include "rads/types.hpp"

namespace rads {

/// Whole-graph adjacency, used by the oracle, the partitioner and tests.
/// Lists are sorted ascending and duplicate-free; symmetry is enforced at load.
class Graph {
 public:
  Graph() = default;

  void add_edge(VertexId a, VertexId b) {
    if (a == b) return;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  void touch(VertexId v) { adj_[v]; }

  /// Sort and deduplicate all lists; call once after the last add_edge.
  void finalize() {
    for (auto& [v, nbrs] : adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  bool has_vertex(VertexId v) const { return adj_.count(v) != 0; }

  const std::vector<VertexId>& neighbors(VertexId v) const {
    auto it = adj_.find(v);
    if (it == adj_.end()) throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v));
    return it->second;
  }

  bool has_edge(VertexId a, VertexId b) const {
    auto it = adj_.find(a);
    if (it == adj_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), b);
  }

  std::size_t degree(VertexId v) const { return neighbors(v).size(); }
  std::size_t vertex_count() const { return adj_.size(); }

  std::size_t edge_count() const {
    std::size_t d = 0;
    for (auto& [v, nbrs] : adj_) d += nbrs.size();
    return d / 2;
  }

  std::vector<VertexId> vertices_sorted() const {
    std::vector<VertexId> out;
    out.reserve(adj_.size());
    for (auto& [v, _] : adj_) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
  }

  const std::unordered_map<VertexId, std::vector<VertexId>>& raw() const { return adj_; }

 private:
  std::unordered_map<VertexId, std::vector<VertexId>> adj_;
};

enum class EdgePresence { Present, Absent, Undetermined };

/// One machine's partition: owned adjacency, the global ownership map,
/// border distances, and the foreign-vertex cache.
///
/// Owned data is immutable after load and is read by both the enumeration
/// thread and the daemon thread. The cache is touched only by the
/// enumeration thread; the daemon answers requests from owned data alone.
class PartitionView {
 public:
  PartitionView(MachineId machine, std::unordered_map<VertexId, std::vector<VertexId>> local_adj,
                std::unordered_map<VertexId, MachineId> ownership)
      : machine_(machine), local_adj_(std::move(local_adj)), ownership_(std::move(ownership)) {
    for (auto& [v, nbrs] : local_adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    compute_border_distances();
  }

  MachineId machine_id() const { return machine_; }

  bool owns(VertexId v) const { return local_adj_.count(v) != 0; }

  MachineId owner(VertexId v) const {
    auto it = ownership_.find(v);
    if (it == ownership_.end()) throw Error(Errc::OwnerUnknown, "vertex " + std::to_string(v));
    return it->second;
  }

  bool cached(VertexId v) const { return cache_.count(v) != 0; }

  /// Adjacency of an owned or cached vertex; UnknownVertex otherwise.
  const std::vector<VertexId>& adjacency(VertexId v) const {
    auto it = local_adj_.find(v);
    if (it != local_adj_.end()) return it->second;
    auto c = cache_.find(v);
    if (c != cache_.end()) return c->second.nbrs;
    throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v) + " neither owned nor cached");
  }

  bool adjacency_known(VertexId v) const { return owns(v) || cached(v); }

  std::size_t degree(VertexId v) const { return adjacency(v).size(); }

  /// Owned vertices with at least one foreign neighbor.
  std::vector<VertexId> border_vertices() const {
    std::vector<VertexId> out;
    for (auto& [v, nbrs] : local_adj_) {
      for (VertexId n : nbrs) {
        if (owner(n) != machine_) {
          out.push_back(v);
          break;
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// BD(v) for an owned vertex; kInfDistance when the partition has no border.
  std::uint32_t border_distance(VertexId v) const {
    auto it = border_distance_.find(v);
    if (it == border_distance_.end())
      throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v) + " not owned");
    return it->second;
  }

  const std::unordered_map<VertexId, std::uint32_t>& border_distances() const {
    return border_distance_;
  }

  /// Tri-state edge test: owned endpoints decide from local lists, cached
  /// foreign endpoints decide from the cache, otherwise Undetermined.
  EdgePresence edge_presence(VertexId a, VertexId b) const {
    const std::vector<VertexId>* list = nullptr;
    VertexId other = 0;
    if (owns(a)) {
      list = &local_adj_.at(a);
      other = b;
    } else if (owns(b)) {
      list = &local_adj_.at(b);
      other = a;
    } else if (cached(a)) {
      list = &cache_.at(a).nbrs;
      other = b;
    } else if (cached(b)) {
      list = &cache_.at(b).nbrs;
      other = a;
    } else {
      return EdgePresence::Undetermined;
    }
    return std::binary_search(list->begin(), list->end(), other) ? EdgePresence::Present
                                                                 : EdgePresence::Absent;
  }

  const std::unordered_map<VertexId, std::vector<VertexId>>& local_adj() const {
    return local_adj_;
  }
  const std::unordered_map<VertexId, MachineId>& ownership() const { return ownership_; }

  /// Insert fetched adjacency. Re-inserting refreshes the entry's LRU position.
  void cache_insert(VertexId v, std::vector<VertexId> nbrs) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    auto it = cache_.find(v);
    if (it != cache_.end()) {
      cache_bytes_ -= entry_bytes(it->second.nbrs);
      lru_.erase(it->second.lru_pos);
      cache_.erase(it);
    }
    lru_.push_back(v);
    CacheEntry e;
    e.nbrs = std::move(nbrs);
    e.lru_pos = std::prev(lru_.end());
    cache_bytes_ += entry_bytes(e.nbrs);
    cache_.emplace(v, std::move(e));
  }

  /// Evict least-recently-fetched entries until the cache fits the budget.
  /// budget == 0 means unbounded.
  void cache_evict(std::size_t budget_bytes) {
    if (budget_bytes == 0) return;
    while (cache_bytes_ > budget_bytes && !lru_.empty()) {
      VertexId victim = lru_.front();
      lru_.pop_front();
      auto it = cache_.find(victim);
      cache_bytes_ -= entry_bytes(it->second.nbrs);
      cache_.erase(it);
    }
  }

  std::size_t cache_bytes() const { return cache_bytes_; }
  std::size_t cache_entries() const { return cache_.size(); }

  static std::size_t entry_bytes(const std::vector<VertexId>& nbrs) {
    return sizeof(VertexId) * (1 + nbrs.size());
  }

 private:
  void compute_border_distances() {
    // Multi-source BFS from the border set over owned edges only.
    std::vector<VertexId> frontier = border_vertices();
    for (auto& [v, _] : local_adj_) border_distance_[v] = kInfDistance;
    for (VertexId b : frontier) border_distance_[b] = 0;
    std::uint32_t dist = 0;
    while (!frontier.empty()) {
      ++dist;
      std::vector<VertexId> next;
      for (VertexId v : frontier) {
        for (VertexId n : local_adj_.at(v)) {
          auto it = border_distance_.find(n);
          if (it != border_distance_.end() && it->second == kInfDistance) {
            it->second = dist;
            next.push_back(n);
          }
        }
      }
      frontier = std::move(next);
    }
  }

  struct CacheEntry {
    std::vector<VertexId> nbrs;
    std::list<VertexId>::iterator lru_pos;
  };

  MachineId machine_;
  std::unordered_map<VertexId, std::vector<VertexId>> local_adj_;
  // total over V_G; a byte per vertex suffices for clusters up to 256
  // machines, but no hard cap is enforced here
  std::unordered_map<VertexId, MachineId> ownership_;
  std::unordered_map<VertexId, std::uint32_t> border_distance_;
  std::unordered_map<VertexId, CacheEntry> cache_;
  std::list<VertexId> lru_;
  std::size_t cache_bytes_ = 0;
};

}  // namespace rads
