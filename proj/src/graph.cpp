#include "fedban/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fedban {

Topology topology_from_string(const std::string& s) {
  if (s == "cycle") return Topology::cycle;
  if (s == "complete") return Topology::complete;
  if (s == "star") return Topology::star;
  if (s == "path") return Topology::path;
  if (s == "custom") return Topology::custom;
  throw ConfigError("unknown topology '" + s + "'");
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::cycle: return "cycle";
    case Topology::complete: return "complete";
    case Topology::star: return "star";
    case Topology::path: return "path";
    case Topology::custom: return "custom";
  }
  return "?";
}

Graph Graph::from_edges(int m, const std::vector<std::pair<int, int>>& edges) {
  if (m < 2) throw ConfigError("graph: need at least 2 agents");
  Graph g;
  g.m_ = m;
  g.adj_.assign(static_cast<std::size_t>(m) * m, 0);
  g.degree_.assign(static_cast<std::size_t>(m), 0);

  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= m || v < 0 || v >= m) {
      throw ConfigError("graph: edge endpoint out of range");
    }
    if (u == v) throw ConfigError("graph: self-loops are not allowed");
    auto& fwd = g.adj_[static_cast<std::size_t>(u) * m + v];
    if (fwd != 0) continue;  // duplicate edge, keep one
    fwd = 1;
    g.adj_[static_cast<std::size_t>(v) * m + u] = 1;
    ++g.degree_[static_cast<std::size_t>(u)];
    ++g.degree_[static_cast<std::size_t>(v)];
    ++g.edge_count_;
  }

  for (int u = 0; u < m; ++u) {
    if (g.degree_[static_cast<std::size_t>(u)] == 0) {
      throw ConfigError("graph: agent " + std::to_string(u) + " is isolated");
    }
  }

  // BFS connectivity check.
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (int v = 0; v < m; ++v) {
      if (g.adjacent(u, v) && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        queue.push_back(v);
      }
    }
  }
  if (static_cast<int>(queue.size()) != m) {
    throw ConfigError("graph: not connected");
  }

  g.max_degree_ = *std::max_element(g.degree_.begin(), g.degree_.end());
  return g;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < m_; ++u) {
    for (int v = u + 1; v < m_; ++v) {
      if (adjacent(u, v)) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph build_graph(Topology t, int m) {
  std::vector<std::pair<int, int>> edges;
  switch (t) {
    case Topology::cycle:
      if (m < 3) throw ConfigError("cycle topology needs M >= 3");
      for (int i = 0; i < m; ++i) edges.emplace_back(i, (i + 1) % m);
      break;
    case Topology::complete:
      if (m < 2) throw ConfigError("complete topology needs M >= 2");
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
      }
      break;
    case Topology::star:
      if (m < 2) throw ConfigError("star topology needs M >= 2");
      for (int i = 1; i < m; ++i) edges.emplace_back(0, i);
      break;
    case Topology::path:
      if (m < 2) throw ConfigError("path topology needs M >= 2");
      for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      break;
    case Topology::custom:
      throw ConfigError("custom topology requires an edge-list file");
  }
  return Graph::from_edges(m, edges);
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");

  int m = -1;
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (m < 0) {
      if (!(ls >> m) || m < 2) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected agent count >= 2");
      }
      continue;
    }
    int u, v;
    if (!(ls >> u >> v)) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'u v' edge");
    }
    edges.emplace_back(u, v);
  }
  if (m < 0) throw ConfigError(path + ": empty graph file");
  try {
    return Graph::from_edges(m, edges);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace fedban
