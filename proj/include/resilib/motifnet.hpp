#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "resilib/graph.hpp"
#include "resilib/series.hpp"

namespace resilib::motifnet {

/// Connected motif classes on 3 and 4 nodes.
enum class MotifClass {
  Path3,
  Triangle,
  Path4,
  Star4,
  Cycle4,
  Tadpole4,
  Diamond4,
  Complete4,
};

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Induced connected-subgraph counts from one enumeration pass. The 4-node
/// order is (path, star, cycle, tadpole, diamond, complete).
struct MotifCensus {
  std::array<long, 2> three_node{0, 0};
  std::array<long, 6> four_node{0, 0, 0, 0, 0, 0};
  [[nodiscard]] long total4() const;
};

MotifCensus motif_census(const Graph& g);
long motif_count(const Graph& g, MotifClass m);

/// Normalized 4-node counts; requires at least one connected 4-subset.
Vector6d motif_distribution(const Graph& g);

struct Significance {
  double z = 0.0;
  bool degenerate = false;  // zero ensemble deviation; z carries the sign as +/-inf
};

/// Z-score of the motif count against a degree-preserving rewired ensemble
/// (double-edge swaps, 100*|E| attempts per sample).
Significance motif_significance(const Graph& g, MotifClass m, int ensemble_size,
                                std::uint64_t seed);

/// KL deviation between motif distributions with 1e-9 additive smoothing,
/// natural log.
double kl_deviation(const Vector6d& p0, const Vector6d& p1);

/// Degree-targeted attack distribution p over {1..max_targets}.
struct AttackModel {
  int max_targets = 0;
  Eigen::VectorXd probabilities;

  AttackModel(int k, Eigen::VectorXd p);
};

/// Base network plus a disjoint pool of reconfigurable edges; pool edges
/// contribute degree and motifs only while activated. Attacks remove the
/// current highest-degree surviving node (ties to the lower id), one at a
/// time, re-ranking after each removal.
struct ReconfigState {
  Graph base;
  std::vector<std::pair<int, int>> pool;
  std::vector<bool> active;
  int min_degree = 0;
  std::vector<bool> removed;
  int attacks = 0;

  ReconfigState(Graph base_graph, std::vector<std::pair<int, int>> pool_edges, int alpha);

  [[nodiscard]] Graph effective() const;
  /// Degree within the effective graph.
  [[nodiscard]] int effective_degree(int node) const;
  /// Highest-degree surviving node, ties to the lower id; -1 when none.
  [[nodiscard]] int top_survivor() const;
  [[nodiscard]] bool min_degree_satisfied() const;
};

/// Removes k further nodes. k = 0 is the identity; previously activated bits
/// are preserved on surviving pairs.
ReconfigState apply_attack(const ReconfigState& state, int k);

struct ReconfigPlan {
  /// configs[k-1] is the activation vector chosen after k attacks.
  std::vector<std::vector<bool>> configs;
  std::vector<bool> feasible;    // per k: min-degree constraint satisfiable
  std::vector<double> kl_per_k;  // KL(pi(x0), pi(x^(k)))
  double expected_kl = 0.0;      // under the supplied attack estimate
};

/// Stage-wise minimization of the expected motif-distribution deviation:
/// at each k the surviving free bits are searched exhaustively when there are
/// at most 12 of them, greedily otherwise, subject to bit persistence and the
/// min-degree constraint on the current top survivor.
ReconfigPlan optimize_reconfig(const ReconfigState& initial, const AttackModel& attack,
                               const Eigen::VectorXd& p_hat);

struct MotifUseCaseConfig {
  int nodes = 50;
  double edge_prob = 0.16;
  int pool_size = 10;
  int min_degree = 10;   // alpha
  int max_targets = 15;  // K
  int horizon = 400;
  int strategy_change = 150;
  int detect_window = 25;     // trailing-mean window for drop detection
  double detect_factor = 2.0; // re-estimate when the trailing mean jumps this much
};

/// Robust design fixes the plan optimized for the initial attack estimate;
/// the resilient design re-estimates the attack distribution from observed
/// target counts after a performance drop and re-optimizes.
/// Emits (t, k_drawn, kl_robust, kl_resilient).
ResultSeries run_motif_usecase(const MotifUseCaseConfig& config, std::uint64_t seed);

}  // namespace resilib::motifnet
