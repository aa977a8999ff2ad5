#pragma once

#include <string>
#include <utility>
#include <vector>

namespace resilib {

class Rng;

/// Undirected simple graph over node ids [0, node_count).
/// Node "removal" in the attack/failure simulations is modelled by stripping
/// all incident edges; isolated nodes never contribute motifs or walks.
class Graph {
public:
  Graph() = default;
  explicit Graph(int nodes);

  [[nodiscard]] int node_count() const { return static_cast<int>(adjacency_.size()); }
  [[nodiscard]] int edge_count() const { return edge_count_; }
  [[nodiscard]] bool has_edge(int u, int v) const;
  [[nodiscard]] int degree(int v) const;
  [[nodiscard]] const std::vector<int>& neighbors(int v) const;

  /// Adds u-v; returns false if it already exists. Throws on self-loops or
  /// out-of-range ids.
  bool add_edge(int u, int v);
  bool remove_edge(int u, int v);
  /// Strips every edge incident to v.
  void isolate(int v);

  /// All edges as (u, v) with u < v, sorted.
  [[nodiscard]] std::vector<std::pair<int, int>> edges() const;

  [[nodiscard]] std::vector<int> component_labels() const;
  [[nodiscard]] int component_count() const;
  [[nodiscard]] bool is_connected() const;

  static Graph erdos_renyi(int nodes, double p, Rng& rng);
  /// Resamples until connected.
  static Graph connected_erdos_renyi(int nodes, double p, Rng& rng);

  /// Edge-list text: one "u v" pair per line.
  static Graph read_edge_list(const std::string& path);
  void write_edge_list(const std::string& path) const;

private:
  void check_node(int v) const;

  std::vector<std::vector<int>> adjacency_;
  int edge_count_ = 0;
};

}  // namespace resilib
