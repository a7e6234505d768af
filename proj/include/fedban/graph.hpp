#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fedban/errors.hpp"

namespace fedban {

enum class Topology { cycle, complete, star, path, custom };

Topology topology_from_string(const std::string& s);
std::string to_string(Topology t);

// Undirected, simple, connected communication graph over agents 0..M-1.
class Graph {
 public:
  // Builds from an explicit edge list; validates simplicity, range and
  // connectivity. Throws ConfigError on violation.
  static Graph from_edges(int m, const std::vector<std::pair<int, int>>& edges);

  int size() const { return m_; }
  bool adjacent(int u, int v) const { return adj_[static_cast<std::size_t>(u) * m_ + v] != 0; }
  int degree(int u) const { return degree_[static_cast<std::size_t>(u)]; }
  int max_degree() const { return max_degree_; }
  std::int64_t edge_count() const { return edge_count_; }
  std::vector<std::pair<int, int>> edges() const;

 private:
  Graph() = default;
  int m_ = 0;
  int max_degree_ = 0;
  std::int64_t edge_count_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<int> degree_;
};

// Standard named topologies. cycle needs M >= 3; the others need M >= 2.
Graph build_graph(Topology t, int m);

// Loads "M" on the first line then one "u v" pair per line, 0-indexed.
// Blank lines and lines starting with '#' are skipped.
Graph load_edge_list(const std::string& path);

}  // namespace fedban
