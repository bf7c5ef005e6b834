#include "rads/partition_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rads {

namespace {

Graph parse_graph_stream(std::istream& in) {
  Graph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    VertexId v;
    if (!(ls >> v)) {
      // blank or comment-only line
      std::string rest;
      if (ls.clear(), std::getline(ls, rest) && rest.find_first_not_of(" \t\r") != std::string::npos)
        throw Error(Errc::ParseError, "line " + std::to_string(lineno));
      continue;
    }
    g.touch(v);
    VertexId n;
    while (ls >> n) {
      if (n != v) g.add_edge(v, n);  // symmetric closure happens via add_edge
      g.touch(n);
    }
    if (!ls.eof())
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad token");
  }
  g.finalize();
  return g;
}

}  // namespace

Graph parse_graph_text(const std::string& text) {
  std::istringstream in(text);
  return parse_graph_stream(in);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  return parse_graph_stream(in);
}

std::unordered_map<VertexId, MachineId> hash_partition(const Graph& g, std::size_t machines) {
  if (machines == 0) throw Error(Errc::Usage, "machines must be >= 1");
  std::unordered_map<VertexId, MachineId> owners;
  for (VertexId v : g.vertices_sorted()) owners[v] = static_cast<MachineId>(v % machines);
  return owners;
}

std::unordered_map<VertexId, MachineId> load_metis_partition(const std::string& path,
                                                             const Graph& g) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::vector<MachineId> parts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    parts.push_back(static_cast<MachineId>(std::stoul(line)));
  }
  auto verts = g.vertices_sorted();
  if (parts.size() != verts.size())
    throw Error(Errc::LengthMismatch, std::to_string(parts.size()) + " lines for " +
                                          std::to_string(verts.size()) + " vertices");
  std::set<MachineId> ids(parts.begin(), parts.end());
  MachineId expect = 0;
  for (MachineId id : ids) {
    if (id != expect)
      throw Error(Errc::BadPartId, "part ids not contiguous from 0 (found " +
                                       std::to_string(id) + ")");
    ++expect;
  }
  std::unordered_map<VertexId, MachineId> owners;
  for (std::size_t i = 0; i < verts.size(); ++i) owners[verts[i]] = parts[i];
  return owners;
}

std::unordered_map<VertexId, VertexId> dense_renumbering(const Graph& g) {
  std::unordered_map<VertexId, VertexId> map;
  VertexId next = 0;
  for (VertexId v : g.vertices_sorted()) map[v] = next++;
  return map;
}

void write_partition_views(const Graph& g, const std::unordered_map<VertexId, MachineId>& owners,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  auto renum = dense_renumbering(g);
  MachineId machines = 0;
  for (auto& [v, m] : owners) machines = std::max(machines, static_cast<MachineId>(m + 1));

  std::vector<std::ofstream> parts;
  for (MachineId t = 0; t < machines; ++t) {
    parts.emplace_back(out_dir + "/part" + std::to_string(t) + ".adj");
    if (!parts.back()) throw Error(Errc::IoError, "cannot write part file " + std::to_string(t));
  }
  for (VertexId v : g.vertices_sorted()) {
    auto it = owners.find(v);
    if (it == owners.end()) throw Error(Errc::OwnerUnknown, std::to_string(v));
    std::ofstream& out = parts[it->second];
    out << renum.at(v);
    for (VertexId n : g.neighbors(v)) out << ' ' << renum.at(n);
    out << '\n';
  }

  std::ofstream own(out_dir + "/ownership.txt");
  if (!own) throw Error(Errc::IoError, "cannot write ownership file");
  for (VertexId v : g.vertices_sorted()) own << renum.at(v) << ' ' << owners.at(v) << '\n';

  std::ofstream ren(out_dir + "/renumber.txt");
  if (!ren) throw Error(Errc::IoError, "cannot write renumber file");
  for (VertexId v : g.vertices_sorted()) ren << v << ' ' << renum.at(v) << '\n';
}

std::size_t partition_machine_count(const std::string& dir) {
  std::size_t m = 0;
  while (std::filesystem::exists(dir + "/part" + std::to_string(m) + ".adj")) ++m;
  return m;
}

PartitionView load_partition_view(const std::string& dir, MachineId t) {
  std::ifstream own(dir + "/ownership.txt");
  if (!own) throw Error(Errc::IoError, "cannot open " + dir + "/ownership.txt");
  std::unordered_map<VertexId, MachineId> owners;
  VertexId v;
  MachineId m;
  while (own >> v >> m) owners[v] = m;

  Graph part = load_graph(dir + "/part" + std::to_string(t) + ".adj");
  std::unordered_map<VertexId, std::vector<VertexId>> local;
  for (auto& [u, nbrs] : part.raw()) {
    auto it = owners.find(u);
    if (it != owners.end() && it->second == t) local[u] = nbrs;
  }
  return PartitionView(t, std::move(local), std::move(owners));
}

std::vector<PartitionView> build_views(const Graph& g,
                                       const std::unordered_map<VertexId, MachineId>& owners,
                                       std::size_t machines) {
  std::vector<PartitionView> views;
  for (MachineId t = 0; t < machines; ++t) {
    std::unordered_map<VertexId, std::vector<VertexId>> local;
    for (auto& [v, nbrs] : g.raw()) {
      if (owners.at(v) == t) local[v] = nbrs;
    }
    views.emplace_back(t, std::move(local), owners);
  }
  return views;
}

}  // namespace rads
