#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "resilib/series.hpp"

namespace resilib {
class Rng;
}

namespace resilib::walks {

/// Per-node return-time bookkeeping: last-seen times per walk and the
/// empirical return-time CDF, capacity-bounded with FIFO eviction.
class NodeStats {
public:
  explicit NodeStats(std::size_t capacity = 10000) : capacity_(capacity) {}

  /// Walk `walk` arrives at this node at time t: records a return-time sample
  /// when the walk has been here before, then refreshes its last-seen time.
  void record_visit(int walk, long t);

  [[nodiscard]] bool has_samples() const { return !order_.empty(); }
  [[nodiscard]] std::size_t sample_count() const { return order_.size(); }

  /// Survival l(elapsed) = 1 - F(elapsed) of the empirical return-time CDF.
  /// Throws until at least one sample has been observed (warm-up).
  [[nodiscard]] double survival(long elapsed) const;

  /// beta-hat estimate of the active walk count seen from this node:
  /// 1/2 plus the survival mass of every other walk's age. E[2 beta-hat]
  /// matches the live walk count once the CDF has converged.
  [[nodiscard]] double estimate_active(long t, int excluding_walk) const;

  [[nodiscard]] const std::unordered_map<int, long>& last_seen() const { return last_seen_; }

private:
  std::size_t capacity_;
  std::vector<long> sorted_;      // return-time samples, ascending
  std::deque<long> order_;        // insertion order for FIFO eviction
  std::unordered_map<int, long> last_seen_;
};

/// Replication rule: replicate with probability 1/n_f iff beta_hat < epsilon.
bool maybe_replicate(double beta_hat, double epsilon, int n_f, Rng& rng);

/// 10 log10(n) for n >= 1, zero otherwise ("not resilient").
double resilience_value(int active_walks);

struct FailureEvent {
  long step = 0;
  enum class Kind { Link, Node } kind = Kind::Link;
  double fraction = 0.0;
};

struct WalkConfig {
  int nodes = 50;
  double edge_prob = 0.1;
  int initial_walks = 10;  // N_f
  double epsilon = 1.6;
  long horizon = 4000;
  long warmup = 500;  // replication disabled before this step
  std::vector<FailureEvent> failures = {{1000, FailureEvent::Kind::Link, 0.5},
                                        {3000, FailureEvent::Kind::Node, 0.5}};
  std::size_t cdf_capacity = 10000;
  double learning_rate = 0.1;  // payload gradient step on node-local quadratics
};

/// Multi-random-walk process with replication: each step every live token
/// does one gradient step on its node's quadratic and moves to a uniform
/// random neighbour; arrivals update return-time statistics and may trigger
/// replication. Emits (t, n_walks, resilience).
ResultSeries run_walk_experiment(const WalkConfig& config, std::uint64_t seed);

}  // namespace resilib::walks
