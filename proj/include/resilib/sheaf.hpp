#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "resilib/graph.hpp"
#include "resilib/series.hpp"

namespace resilib {
class Rng;
}

namespace resilib::sheaf {

/// Cellular sheaf over an undirected graph: vertex stalks R^{d_i}, edge
/// stalks R^{d_e}, and a restriction map on each side of every edge.
struct SheafGraph {
  Graph base;
  std::vector<int> vertex_dims;

  struct EdgeMaps {
    int u;
    int v;
    Eigen::MatrixXd from_u;  // d_e x d_u
    Eigen::MatrixXd from_v;  // d_e x d_v
  };
  std::vector<EdgeMaps> edges;

  SheafGraph(Graph g, std::vector<int> dims, int edge_dim);

  /// Constant sheaf: every stalk R^dim, every restriction map the identity.
  static SheafGraph constant(const Graph& g, int dim);
  /// Random orthonormal-row restriction maps (used as learning init).
  static SheafGraph random(const Graph& g, std::vector<int> dims, int edge_dim, Rng& rng);

  [[nodiscard]] std::string to_json() const;
  static SheafGraph from_json(const std::string& text);
};

/// Vertex assignment theta: one vector per vertex, matching the stalks.
using Cochain0 = std::vector<Eigen::VectorXd>;

void check_shapes(const SheafGraph& sheaf, const Cochain0& theta);

/// (L theta)_j = sum_i L_ji theta_i with the sheaf Laplacian blocks.
Cochain0 sheaf_laplacian_apply(const SheafGraph& sheaf, const Cochain0& theta);

/// Dense block assembly of L (small graphs; tests and spectra).
Eigen::MatrixXd sheaf_laplacian_dense(const SheafGraph& sheaf);

/// Sum of squared edge disagreements ||P_ij theta_i - P_ji theta_j||^2;
/// equals theta^T L theta.
double disagreement(const SheafGraph& sheaf, const Cochain0& theta);

/// Largest Laplacian eigenvalue estimated by power iteration.
double laplacian_spectral_radius(const SheafGraph& sheaf, int iterations = 200);

struct DiffusionResult {
  Cochain0 theta;
  std::vector<double> disagreement_trace;
};

/// theta <- theta - step * L theta, repeated. Rejects steps at or beyond
/// 2 / lambda_max (unstable).
DiffusionResult diffuse(const SheafGraph& sheaf, Cochain0 theta, double step, int iterations);

/// Synthetic heterogeneous regression tasks: node i observes a shared 2-d
/// latent through its own mixing matrix and learns a linear readout.
struct LearningConfig {
  int nodes = 12;
  double edge_prob = 0.35;
  std::vector<int> dim_choices = {3, 4, 5};
  int edge_dim = 2;
  int samples_per_node = 120;
  int test_samples = 200;
  double noise_std = 0.05;
  int rounds = 60;
  double lr_theta = 0.05;
  double lr_maps = 0.01;
  double disagreement_weight = 0.5;
  int failure_round = -1;        // -1 disables sensor failures
  double failure_ratio = 0.0;    // fraction of nodes losing an input block
  int failure_block = 2;         // leading coordinates zeroed at failed nodes
};

struct LearningResult {
  SheafGraph sheaf;
  ResultSeries history;  // (round, train_acc, test_acc, disagreement)
};

/// Alternating minimization: gradient steps on local losses plus the
/// disagreement penalty over theta, then over the restriction maps
/// (unit-norm rows). Sensor failures zero an input block from the failure
/// round onward; accuracy is 1 - mse/var(label), clamped to [0,1].
LearningResult learn_restrictions(const LearningConfig& config, std::uint64_t seed);

}  // namespace resilib::sheaf
