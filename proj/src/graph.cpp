#include "resilib/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "resilib/rng.hpp"

namespace resilib {

Graph::Graph(int nodes) {
  if (nodes < 0) throw std::invalid_argument("Graph: negative node count");
  adjacency_.resize(static_cast<std::size_t>(nodes));
}

void Graph::check_node(int v) const {
  if (v < 0 || v >= node_count()) throw std::out_of_range("Graph: node id out of range");
}

bool Graph::has_edge(int u, int v) const {
  check_node(u);
  check_node(v);
  const auto& adj = adjacency_[static_cast<std::size_t>(u)];
  return std::binary_search(adj.begin(), adj.end(), v);
}

int Graph::degree(int v) const {
  check_node(v);
  return static_cast<int>(adjacency_[static_cast<std::size_t>(v)].size());
}

const std::vector<int>& Graph::neighbors(int v) const {
  check_node(v);
  return adjacency_[static_cast<std::size_t>(v)];
}

bool Graph::add_edge(int u, int v) {
  check_node(u);
  check_node(v);
  if (u == v) throw std::invalid_argument("Graph: self-loop rejected");
  auto& au = adjacency_[static_cast<std::size_t>(u)];
  const auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  au.insert(it, v);
  auto& av = adjacency_[static_cast<std::size_t>(v)];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++edge_count_;
  return true;
}

bool Graph::remove_edge(int u, int v) {
  check_node(u);
  check_node(v);
  auto& au = adjacency_[static_cast<std::size_t>(u)];
  const auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it == au.end() || *it != v) return false;
  au.erase(it);
  auto& av = adjacency_[static_cast<std::size_t>(v)];
  av.erase(std::lower_bound(av.begin(), av.end(), u));
  --edge_count_;
  return true;
}

void Graph::isolate(int v) {
  check_node(v);
  const std::vector<int> nbrs = adjacency_[static_cast<std::size_t>(v)];
  for (int u : nbrs) remove_edge(u, v);
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (int u = 0; u < node_count(); ++u) {
    for (int v : adjacency_[static_cast<std::size_t>(u)]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<int> Graph::component_labels() const {
  std::vector<int> label(static_cast<std::size_t>(node_count()), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < node_count(); ++s) {
    if (label[static_cast<std::size_t>(s)] != -1) continue;
    stack.push_back(s);
    label[static_cast<std::size_t>(s)] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adjacency_[static_cast<std::size_t>(v)]) {
        if (label[static_cast<std::size_t>(u)] == -1) {
          label[static_cast<std::size_t>(u)] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

int Graph::component_count() const {
  const auto labels = component_labels();
  return labels.empty() ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
}

bool Graph::is_connected() const { return component_count() <= 1; }

Graph Graph::erdos_renyi(int nodes, double p, Rng& rng) {
  Graph g(nodes);
  for (int u = 0; u < nodes; ++u) {
    for (int v = u + 1; v < nodes; ++v) {
      if (rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

Graph Graph::connected_erdos_renyi(int nodes, double p, Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Graph g = erdos_renyi(nodes, p, rng);
    if (g.is_connected()) return g;
  }
  throw std::runtime_error("connected_erdos_renyi: no connected sample after 10000 attempts");
}

Graph Graph::read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_edge_list: cannot open " + path);
  std::vector<std::pair<int, int>> pairs;
  int max_node = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int u = 0;
    int v = 0;
    if (!(ls >> u >> v)) throw std::runtime_error("read_edge_list: malformed line: " + line);
    pairs.emplace_back(u, v);
    max_node = std::max({max_node, u, v});
  }
  Graph g(max_node + 1);
  for (auto [u, v] : pairs) g.add_edge(u, v);
  return g;
}

void Graph::write_edge_list(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_edge_list: cannot open " + path);
  for (auto [u, v] : edges()) out << u << ' ' << v << '\n';
}

}  // namespace resilib
