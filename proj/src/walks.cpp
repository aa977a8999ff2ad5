#include "resilib/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resilib/graph.hpp"
#include "resilib/rng.hpp"

namespace resilib::walks {

void NodeStats::record_visit(int walk, long t) {
  const auto it = last_seen_.find(walk);
  if (it != last_seen_.end()) {
    const long sample = t - it->second;
    sorted_.insert(std::lower_bound(sorted_.begin(), sorted_.end(), sample), sample);
    order_.push_back(sample);
    if (order_.size() > capacity_) {
      const long oldest = order_.front();
      order_.pop_front();
      sorted_.erase(std::lower_bound(sorted_.begin(), sorted_.end(), oldest));
    }
  }
  last_seen_[walk] = t;
}

double NodeStats::survival(long elapsed) const {
  if (sorted_.empty()) {
    throw std::runtime_error("NodeStats::survival: no return-time samples yet (warm-up)");
  }
  const auto at_most = std::upper_bound(sorted_.begin(), sorted_.end(), elapsed) -
                       sorted_.begin();
  return 1.0 - static_cast<double>(at_most) / static_cast<double>(sorted_.size());
}

double NodeStats::estimate_active(long t, int excluding_walk) const {
  if (sorted_.empty()) {
    throw std::runtime_error("NodeStats::estimate_active: no return-time samples yet (warm-up)");
  }
  double beta = 0.5;
  for (const auto& [walk, seen] : last_seen_) {
    if (walk == excluding_walk) continue;
    beta += survival(t - seen);
  }
  return beta;
}

bool maybe_replicate(double beta_hat, double epsilon, int n_f, Rng& rng) {
  if (n_f < 1) throw std::invalid_argument("maybe_replicate: n_f must be positive");
  if (beta_hat >= epsilon) return false;
  return rng.uniform() < 1.0 / static_cast<double>(n_f);
}

double resilience_value(int active_walks) {
  if (active_walks < 0) throw std::invalid_argument("resilience_value: negative walk count");
  if (active_walks < 1) return 0.0;
  return 10.0 * std::log10(static_cast<double>(active_walks));
}

namespace {

struct Token {
  int id;
  int node;
  Eigen::Vector4d payload;
  int from = -1;  // tail of the edge used in the last move; in-transit marker
};

}  // namespace

ResultSeries run_walk_experiment(const WalkConfig& config, std::uint64_t seed) {
  if (config.initial_walks < 1) throw std::invalid_argument("run_walk_experiment: N_f >= 1");
  for (const auto& f : config.failures) {
    if (f.fraction < 0.0 || f.fraction > 1.0) {
      throw std::invalid_argument("run_walk_experiment: failure fraction outside [0,1]");
    }
  }

  Rng root = Rng::seeded("walks", seed);
  Rng graph_rng = root.stream("graph");
  Rng payload_rng = root.stream("payload");
  Rng move_rng = root.stream("moves");
  Rng repl_rng = root.stream("replication");
  Rng failure_rng = root.stream("failures");

  Graph graph = Graph::connected_erdos_renyi(config.nodes, config.edge_prob, graph_rng);
  std::vector<bool> node_alive(static_cast<std::size_t>(config.nodes), true);
  std::vector<Eigen::Vector4d> targets(static_cast<std::size_t>(config.nodes));
  for (auto& target : targets) {
    for (int d = 0; d < 4; ++d) target[d] = payload_rng.normal();
  }

  std::vector<NodeStats> stats(static_cast<std::size_t>(config.nodes),
                               NodeStats(config.cdf_capacity));
  std::vector<Token> tokens;
  tokens.reserve(static_cast<std::size_t>(config.initial_walks));
  for (int k = 0; k < config.initial_walks; ++k) {
    const int start =
        static_cast<int>(graph_rng.uniform_int(static_cast<std::uint64_t>(config.nodes)));
    tokens.push_back({k, start, Eigen::Vector4d::Zero(), -1});
    stats[static_cast<std::size_t>(start)].record_visit(k, 0);
  }
  int next_id = config.initial_walks;

  ResultSeries series({"t", "n_walks", "resilience"});
  for (long t = 1; t <= config.horizon; ++t) {
    // Failure events fire at the start of their step.
    for (const auto& event : config.failures) {
      if (event.step != t) continue;
      if (event.kind == FailureEvent::Kind::Link) {
        auto edges = graph.edges();
        const auto remove_n = static_cast<std::size_t>(
            std::llround(event.fraction * static_cast<double>(edges.size())));
        std::vector<std::pair<int, int>> removed;
        removed.reserve(remove_n);
        for (std::size_t idx : failure_rng.sample_without_replacement(edges.size(), remove_n)) {
          graph.remove_edge(edges[idx].first, edges[idx].second);
          removed.push_back(edges[idx]);
        }
        // Walk models in transit over a failing link are lost with it.
        std::erase_if(tokens, [&](const Token& token) {
          if (token.from < 0) return false;
          const auto edge = std::minmax(token.from, token.node);
          return std::find(removed.begin(), removed.end(),
                           std::make_pair(edge.first, edge.second)) != removed.end();
        });
      } else {
        std::vector<int> alive_nodes;
        for (int v = 0; v < config.nodes; ++v) {
          if (node_alive[static_cast<std::size_t>(v)]) alive_nodes.push_back(v);
        }
        const auto remove_n = static_cast<std::size_t>(
            std::llround(event.fraction * static_cast<double>(alive_nodes.size())));
        for (std::size_t idx :
             failure_rng.sample_without_replacement(alive_nodes.size(), remove_n)) {
          const int victim = alive_nodes[idx];
          node_alive[static_cast<std::size_t>(victim)] = false;
          graph.isolate(victim);
        }
        std::erase_if(tokens, [&](const Token& token) {
          return !node_alive[static_cast<std::size_t>(token.node)];
        });
      }
    }

    // Tokens process in id order: local update, move, arrival bookkeeping,
    // replication decision.
    std::vector<Token> born;
    for (auto& token : tokens) {
      token.payload -= config.learning_rate *
                       (token.payload - targets[static_cast<std::size_t>(token.node)]);
      const auto& nbrs = graph.neighbors(token.node);
      if (!nbrs.empty()) {
        token.from = token.node;
        token.node = nbrs[static_cast<std::size_t>(move_rng.uniform_int(nbrs.size()))];
      } else {
        token.from = -1;
      }
      NodeStats& node = stats[static_cast<std::size_t>(token.node)];
      node.record_visit(token.id, t);
      if (t > config.warmup && node.has_samples()) {
        const double beta = node.estimate_active(t, token.id);
        if (maybe_replicate(beta, config.epsilon, config.initial_walks, repl_rng)) {
          born.push_back({next_id++, token.node, token.payload, -1});
        }
      }
    }
    for (auto& token : born) tokens.push_back(token);

    const int count = static_cast<int>(tokens.size());
    series.add_row({static_cast<double>(t), static_cast<double>(count),
                    resilience_value(count)});
  }
  return series;
}

}  // namespace resilib::walks
