#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "resilib/series.hpp"

namespace resilib {
class Rng;
}

namespace resilib::actinf {

enum class Cell : int { Free = 0, Blue = 1, Red = 2, Black = 3 };
constexpr int kLabelCount = 4;

enum class Action : int { North = 0, East = 1, South = 2, West = 3, Stay = 4 };
constexpr int kActionCount = 5;

/// Grid displacement of an action; moves that would leave the grid are
/// ignored (the agent stays).
std::pair<int, int> displacement(Action a);

struct GridWorld {
  int size = 20;
  std::vector<Cell> cells;  // row-major, y * size + x

  [[nodiscard]] Cell at(int x, int y) const { return cells[static_cast<std::size_t>(y * size + x)]; }
  void set(int x, int y, Cell c) { cells[static_cast<std::size_t>(y * size + x)] = c; }
  [[nodiscard]] bool inside(int x, int y) const {
    return x >= 0 && x < size && y >= 0 && y < size;
  }

  static GridWorld random(int size, double obstacle_density, Rng& rng);
  /// Cyclically permutes the labels (Free->Blue->Red->Black->Free) of the
  /// given fraction of uniformly chosen cells.
  void apply_stressor(double fraction, Rng& rng);
};

/// Variational free energy of a categorical belief q over hidden states
/// against a joint p(s, o) at the realized observation:
/// F = E_q[ln q(s) - ln p(s, o)] = KL(q || p(s|o)) - ln p(o).
double free_energy(const Eigen::VectorXd& q, const Eigen::MatrixXd& p_joint, int observation);

/// Geometric-mean belief fusion with 1e-6 flooring, Eq.-style
/// q proportional to (q_self * prod q_j)^(1/(n+1)).
Eigen::VectorXd fuse_beliefs(const Eigen::VectorXd& q_self,
                             const std::vector<Eigen::VectorXd>& neighbors);

enum class Modality { Lidar, Camera };

struct SensorModel {
  int lidar_range = 6;
  double lidar_sigma = 1.0;
  int camera_range = 3;
  double camera_accuracy = 0.6;
  /// Change-point response: an observation with predicted probability below
  /// the threshold softens the ray's beliefs toward uniform, restoring the
  /// epistemic pull toward regions that no longer match the model.
  double surprise_threshold = 0.06;
  double surprise_mixing = 0.5;
};

/// Agent state: position, modality, and a fully factorized per-cell belief
/// (rows = cells, columns = labels).
struct Agent {
  Modality modality = Modality::Lidar;
  int x = 0;
  int y = 0;
  Eigen::MatrixXd belief;  // (size*size) x 4, rows normalized
  std::vector<int> recent_cells;  // inhibition-of-return trail

  /// Beliefs start at the environment's class prior (free_prior mass on Free,
  /// the rest split over the obstacle colours).
  Agent(Modality m, int x0, int y0, int grid_size, double free_prior = 0.25);
};

/// Preference-free expected free energy of an action sequence: the negative
/// expected information gain about the per-bearing nearest-obstacle variables
/// along the policy, computed from the agent's current belief.
double expected_free_energy(const Agent& agent, const std::vector<Action>& policy,
                            const SensorModel& sensors, int grid_size);

/// One Bayes update of the agent's belief from the observations its modality
/// produces at its current position in the true world. Returns (surprising
/// observations, total observations) for change-point tracking.
std::pair<int, int> observe_and_update(Agent& agent, const GridWorld& world,
                                       const SensorModel& sensors, Rng& rng);

/// Greedy EFE action selection over all policies of the given horizon, ties
/// broken by the fixed N,E,S,W,STAY order. When a teammate position is given
/// (composition design), policies ending near it are discounted so the
/// agents divide the exploration labour.
Action select_action(const Agent& agent, const SensorModel& sensors, int grid_size,
                     int planning_horizon, int teammate_x = -1, int teammate_y = -1);

enum class GridDesign { Composition, NoComposition };

struct GridConfig {
  int size = 20;
  double obstacle_density = 0.3;
  int horizon = 200;
  int stressor_time = 60;         // -1 disables
  double stressor_fraction = 0.3;
  SensorModel sensors;
  int planning_horizon = 2;
  /// Per-step belief mixing toward the class prior: the agents' model of
  /// environment volatility. Keeps stale confidence correctable and feeds
  /// the epistemic drive to re-visit old ground.
  double volatility = 0.001;
  /// Change-point response: when the recent surprise rate crosses the
  /// trigger, beliefs are mixed toward uniform (argmax-preserving), restoring
  /// plasticity after an environmental shift.
  double reset_trigger = 0.05;
  int reset_window = 60;    // observations
  double reset_mixing = 0.5;
  int reset_cooldown = 60;  // steps
  int lidar_start_x = 5;
  int lidar_start_y = 5;
  int camera_start_x = 14;
  int camera_start_y = 14;
};

/// Two-agent exploration: both agents act by EFE minimization and update
/// their own modality; the composition design additionally fuses beliefs
/// every step. Emits (t, acc_lidar, acc_camera).
ResultSeries run_gridworld(const GridConfig& config, GridDesign design, std::uint64_t seed);

}  // namespace resilib::actinf
