#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "resilib/copula.hpp"
#include "resilib/series.hpp"

namespace resilib {
class Rng;
}

namespace resilib::swarm {

struct Drone {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double energy = 100.0;
  long age = 1;
  double radius = 75.0;
  bool alive = true;
};

struct RiskArea {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double weight = 0.0;
};

struct SwarmConfig {
  int drones = 30;              // N, resilient fleet
  double redundancy = 0.3;      // robust over-provisioning factor
  int worst_case_failures = 5;  // K in the robust max-min placement
  double area = 1000.0;         // S
  double r_min = 75.0;
  double r_max = 225.0;
  double base_failure = 0.01;       // lambda
  int correlated_from = 60;         // T_c
  int horizon = 200;
  double risk_area_weight = 0.5;    // appended at failure locations
  double risk_radius = 150.0;       // risk areas degrade the channel within this range
  double failure_risk_gain = 0.05;  // marginal = lambda + gain * w_near, capped
  double marginal_cap = 0.5;
  double safety_beta = 0.7;         // F_comb weighting
  double max_step = 20.0;
  double force_gain = 60.0;
  double risk_gate = 0.5;
  double gamma_gain = 0.1;
  double gamma_decay = 0.995;
  double gamma_diagonal = 0.2;
  int coverage_grid = 200;
  int anneal_iters = 1500;
  double anneal_cooling = 0.995;
  int anneal_subsets = 80;
};

struct SwarmWorld {
  SwarmConfig config;
  std::vector<Drone> drones;
  std::vector<RiskArea> risks;
  Eigen::MatrixXd gamma;  // dependency matrix, diagonal per config
  long time = 0;
};

/// Fraction of the area covered by at least one active drone, evaluated on
/// the config's raster grid.
double coverage_ratio(const SwarmWorld& world);

/// Quasi-uniform grid placement with Gaussian jitter of std S/(10 sqrt(N)),
/// clamped to the area.
std::vector<Eigen::Vector2d> initial_placement(int count, double area, Rng& rng,
                                               bool jitter = true);

/// gamma_ij = 0.4 / (1 + exp((dist - 200)/50)), diagonal from the config.
Eigen::MatrixXd initial_dependency(const std::vector<Eigen::Vector2d>& positions,
                                   double diagonal = 0.2);

/// Combined dependency-repulsion / coverage-attraction force for drone i.
Eigen::Vector2d control_force(const SwarmWorld& world, int drone);

enum class SwarmDesign { Robust, Resilient };

/// One simulation step: radii from local risk, control (null for the robust
/// design), failures (independent before T_c, Gaussian-copula correlated
/// after), risk-area bookkeeping and dependency learning.
void step(SwarmWorld& world, SwarmDesign design, Rng& rng);

/// Max-min placement: simulated annealing from a hexagonal grid against the
/// worst of sampled K-failure subsets (biased toward drones with the largest
/// exclusive coverage).
std::vector<Eigen::Vector2d> robust_placement(int count, int worst_case_failures,
                                              const SwarmConfig& config, Rng& rng);

/// Full use case run. Emits (t, coverage, active).
ResultSeries run_swarm(const SwarmConfig& config, SwarmDesign design, std::uint64_t seed);

}  // namespace resilib::swarm
