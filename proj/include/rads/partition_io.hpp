#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "rads/graph.hpp"
#include "rads/types.hpp"

namespace rads {

/// Load an adjacency-list text graph ("v n1 n2 ..." per line), enforcing
/// symmetric closure and sorted duplicate-free lists.
Graph load_graph(const std::string& path);
Graph parse_graph_text(const std::string& text);

/// ownership[v] = v mod m over dense ids.
std::unordered_map<VertexId, MachineId> hash_partition(const Graph& g, std::size_t machines);

/// METIS output: one part id per line, line i = part of dense vertex i.
std::unordered_map<VertexId, MachineId> load_metis_partition(const std::string& path,
                                                             const Graph& g);

/// Order-preserving dense renumbering of the graph's vertex ids.
std::unordered_map<VertexId, VertexId> dense_renumbering(const Graph& g);

/// Write part<t>.adj (owned vertices with full adjacency), ownership.txt and
/// renumber.txt into out_dir. All files use the dense id space.
void write_partition_views(const Graph& g, const std::unordered_map<VertexId, MachineId>& owners,
                           const std::string& out_dir);

/// Number of part<t>.adj files present.
std::size_t partition_machine_count(const std::string& dir);

/// Build machine t's view from a partition directory.
PartitionView load_partition_view(const std::string& dir, MachineId t);

/// In-memory split used by verify and the tests: no files involved.
std::vector<PartitionView> build_views(const Graph& g,
                                       const std::unordered_map<VertexId, MachineId>& owners,
                                       std::size_t machines);

}  // namespace rads
