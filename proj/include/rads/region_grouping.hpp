#pragma once

#include <cstdint>
#include <vector>

#include "rads/graph.hpp"
#include "rads/sm_e.hpp"
#include "rads/types.hpp"

namespace rads {

/// A batch of distributed candidates processed together under the memory
/// budget. `processed` is claimed exactly once, locally or via shareR.
struct RegionGroup {
  std::vector<VertexId> members;
  std::uint64_t estimated_bytes = 0;
  bool processed = false;
};

/// Fraction of v's neighbors that are also neighbors of some group member.
double proximity(VertexId v, const RegionGroup& rg, const PartitionView& pv);

/// |members| x average bytes-per-candidate from SM-E statistics.
std::uint64_t estimate_group_bytes(const RegionGroup& rg, const LocalStats& stats);

/// Greedy proximity grouping under the byte budget. budget == 0 means
/// unbounded (one group). Deterministic: seeds are the smallest remaining
/// id, argmax ties break toward the smaller id.
std::vector<RegionGroup> find_region_groups(const std::vector<VertexId>& c2,
                                            std::uint64_t budget_bytes, const LocalStats& stats,
                                            const PartitionView& pv);

}  // namespace rads
