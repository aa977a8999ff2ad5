#include "resilib/swarm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "resilib/rng.hpp"

namespace resilib::swarm {

namespace {

double nearest_risk_weight(const std::vector<RiskArea>& risks, const Eigen::Vector2d& at,
                           double radius) {
  double w = 0.0;
  for (const auto& risk : risks) {
    if ((risk.position - at).norm() <= radius) w = std::max(w, risk.weight);
  }
  return w;
}

double marginal_failure(const SwarmWorld& world, const Eigen::Vector2d& at) {
  const double w = nearest_risk_weight(world.risks, at, world.config.risk_radius);
  return std::min(world.config.marginal_cap,
                  world.config.base_failure + world.config.failure_risk_gain * w);
}

}  // namespace

double coverage_ratio(const SwarmWorld& world) {
  const int grid = world.config.coverage_grid;
  const double cell = world.config.area / grid;
  std::vector<char> covered(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid), 0);
  for (const auto& drone : world.drones) {
    if (!drone.alive) continue;
    const double r2 = drone.radius * drone.radius;
    const int lo_x = std::max(0, static_cast<int>((drone.position.x() - drone.radius) / cell));
    const int hi_x = std::min(grid - 1,
                              static_cast<int>((drone.position.x() + drone.radius) / cell));
    const int lo_y = std::max(0, static_cast<int>((drone.position.y() - drone.radius) / cell));
    const int hi_y = std::min(grid - 1,
                              static_cast<int>((drone.position.y() + drone.radius) / cell));
    for (int gy = lo_y; gy <= hi_y; ++gy) {
      const double cy = (gy + 0.5) * cell - drone.position.y();
      for (int gx = lo_x; gx <= hi_x; ++gx) {
        const double cx = (gx + 0.5) * cell - drone.position.x();
        if (cx * cx + cy * cy <= r2) {
          covered[static_cast<std::size_t>(gy) * static_cast<std::size_t>(grid) +
                  static_cast<std::size_t>(gx)] = 1;
        }
      }
    }
  }
  long count = 0;
  for (char c : covered) count += c;
  return static_cast<double>(count) / (static_cast<double>(grid) * grid);
}

std::vector<Eigen::Vector2d> initial_placement(int count, double area, Rng& rng, bool jitter) {
  if (count < 1) throw std::invalid_argument("initial_placement: count >= 1 required");
  const double root = std::sqrt(static_cast<double>(count));
  const double spacing = area / root;
  const double sigma = jitter ? area / (10.0 * root) : 0.0;
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double gx = std::floor(static_cast<double>(i) / root) * spacing + spacing / 2.0;
    const double gy = std::fmod(static_cast<double>(i), root) * spacing + spacing / 2.0;
    Eigen::Vector2d p(gx + sigma * rng.normal(), gy + sigma * rng.normal());
    p.x() = std::clamp(p.x(), 0.0, area);
    p.y() = std::clamp(p.y(), 0.0, area);
    positions.push_back(p);
  }
  return positions;
}

Eigen::MatrixXd initial_dependency(const std::vector<Eigen::Vector2d>& positions,
                                   double diagonal) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  if (n < 2) throw std::invalid_argument("initial_dependency: at least 2 drones required");
  Eigen::MatrixXd gamma(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gamma(i, i) = diagonal;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (positions[static_cast<std::size_t>(i)] -
                           positions[static_cast<std::size_t>(j)])
                              .norm();
      const double value = 0.4 / (1.0 + std::exp((dist - 200.0) / 50.0));
      gamma(i, j) = value;
      gamma(j, i) = value;
    }
  }
  return gamma;
}

Eigen::Vector2d control_force(const SwarmWorld& world, int drone) {
  const auto idx = static_cast<std::size_t>(drone);
  if (!world.drones[idx].alive) {
    throw std::invalid_argument("control_force: drone is not active");
  }
  const Eigen::Vector2d& self = world.drones[idx].position;

  Eigen::Vector2d repulsion = Eigen::Vector2d::Zero();
  double dependency_pressure = 0.0;
  Eigen::Vector2d attraction = Eigen::Vector2d::Zero();
  for (std::size_t j = 0; j < world.drones.size(); ++j) {
    if (j == idx) continue;
    const auto jj = static_cast<Eigen::Index>(j);
    const Eigen::Vector2d& other = world.drones[j].position;
    const double dist = (self - other).norm();
    if (world.drones[j].alive) {
      const double p_fail = marginal_failure(world, other);
      dependency_pressure += world.gamma(static_cast<Eigen::Index>(idx), jj) * p_fail;
      if (dist < 200.0 && dist > 1e-9) {
        repulsion += world.gamma(static_cast<Eigen::Index>(idx), jj) * p_fail *
                     (1.0 - dist / 200.0) * (self - other) / dist;
      }
    } else if (dist > 150.0 && dist < 350.0) {
      const double safety = 1.0 - world.gamma(static_cast<Eigen::Index>(idx), jj);
      attraction += safety * (other - self) / dist;
    }
  }
  if (dependency_pressure > 0.0) {
    return world.config.safety_beta * repulsion + (1.0 - world.config.safety_beta) * attraction;
  }
  return attraction;
}

void step(SwarmWorld& world, SwarmDesign design, Rng& rng) {
  const SwarmConfig& config = world.config;
  const auto n = world.drones.size();

  // Radii react to the local risk field (risk degrades the channel).
  for (auto& drone : world.drones) {
    const double w = nearest_risk_weight(world.risks, drone.position, config.risk_radius);
    drone.radius = config.r_min + (config.r_max - config.r_min) * (1.0 - w);
  }

  // Control: the robust design holds position by construction.
  if (design == SwarmDesign::Resilient) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!world.drones[i].alive) continue;
      Eigen::Vector2d move = config.force_gain * control_force(world, static_cast<int>(i));
      const double norm = move.norm();
      if (norm < 1e-12) continue;
      if (norm > config.max_step) move *= config.max_step / norm;
      if (world.drones[i].energy < 0.01 * move.norm()) continue;
      Eigen::Vector2d candidate = world.drones[i].position + move;
      candidate.x() = std::clamp(candidate.x(), 0.0, config.area);
      candidate.y() = std::clamp(candidate.y(), 0.0, config.area);
      // Risk-score gate over the would-be neighborhood.
      double risk_score = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !world.drones[j].alive) continue;
        if ((world.drones[j].position - candidate).norm() < 200.0) {
          risk_score += world.gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                        marginal_failure(world, world.drones[j].position);
        }
      }
      if (risk_score > config.risk_gate) continue;  // hold position
      world.drones[i].energy =
          std::max(0.0, world.drones[i].energy - 0.01 * (candidate - world.drones[i].position).norm());
      world.drones[i].position = candidate;
    }
  }

  // Failures: independent before T_c, copula-correlated after.
  Eigen::VectorXd marginals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    marginals[static_cast<Eigen::Index>(i)] =
        world.drones[i].alive ? marginal_failure(world, world.drones[i].position) : 0.0;
  }
  std::vector<bool> failed(n, false);
  if (world.time < config.correlated_from) {
    for (std::size_t i = 0; i < n; ++i) {
      failed[i] = world.drones[i].alive && rng.bernoulli(marginals[static_cast<Eigen::Index>(i)]);
    }
  } else {
    const copula::DependencyMatrix dep(world.gamma);
    const std::vector<bool> draw = copula::correlated_failures(dep, marginals, rng);
    for (std::size_t i = 0; i < n; ++i) failed[i] = world.drones[i].alive && draw[i];
  }

  std::vector<std::size_t> newly_failed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!failed[i]) continue;
    world.drones[i].alive = false;
    newly_failed.push_back(i);
    world.risks.push_back({world.drones[i].position, config.risk_area_weight});
  }

  // Dependency learning: reinforce co-failures, decay the rest.
  for (Eigen::Index i = 0; i < world.gamma.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < world.gamma.cols(); ++j) {
      const bool both = failed[static_cast<std::size_t>(i)] && failed[static_cast<std::size_t>(j)];
      double value = world.gamma(i, j);
      value = both ? std::min(1.0, value + config.gamma_gain) : value * config.gamma_decay;
      world.gamma(i, j) = value;
      world.gamma(j, i) = value;
    }
  }

  for (auto& drone : world.drones) ++drone.age;
  ++world.time;
}

namespace {

// Coarse per-drone coverage bitsets for the annealing objective.
struct CoarseCoverage {
  int grid;
  double cell;
  int words_per_drone;
  std::vector<std::uint64_t> bits;

  CoarseCoverage(int grid_size, double area, std::size_t drones)
      : grid(grid_size), cell(area / grid_size),
        words_per_drone((grid_size * grid_size + 63) / 64),
        bits(static_cast<std::size_t>(words_per_drone) * drones, 0) {}

  void rasterize(std::size_t drone, const Eigen::Vector2d& position, double radius) {
    auto* row = &bits[drone * static_cast<std::size_t>(words_per_drone)];
    std::fill(row, row + words_per_drone, 0ULL);
    const double r2 = radius * radius;
    const int lo_x = std::max(0, static_cast<int>((position.x() - radius) / cell));
    const int hi_x = std::min(grid - 1, static_cast<int>((position.x() + radius) / cell));
    const int lo_y = std::max(0, static_cast<int>((position.y() - radius) / cell));
    const int hi_y = std::min(grid - 1, static_cast<int>((position.y() + radius) / cell));
    for (int gy = lo_y; gy <= hi_y; ++gy) {
      const double cy = (gy + 0.5) * cell - position.y();
      for (int gx = lo_x; gx <= hi_x; ++gx) {
        const double cx = (gx + 0.5) * cell - position.x();
        if (cx * cx + cy * cy <= r2) {
          const int idx = gy * grid + gx;
          row[idx / 64] |= 1ULL << (idx % 64);
        }
      }
    }
  }

  [[nodiscard]] double union_coverage(const std::vector<std::size_t>& excluded,
                                      std::size_t drones) const {
    double covered = 0.0;
    for (int w = 0; w < words_per_drone; ++w) {
      std::uint64_t acc = 0;
      for (std::size_t d = 0; d < drones; ++d) {
        if (std::find(excluded.begin(), excluded.end(), d) != excluded.end()) continue;
        acc |= bits[d * static_cast<std::size_t>(words_per_drone) + static_cast<std::size_t>(w)];
      }
      acc &= w == words_per_drone - 1 && (grid * grid) % 64 != 0
                 ? (1ULL << ((grid * grid) % 64)) - 1
                 : ~0ULL;
      covered += static_cast<double>(std::popcount(acc));
    }
    return covered / (static_cast<double>(grid) * grid);
  }
};

}  // namespace

std::vector<Eigen::Vector2d> robust_placement(int count, int worst_case_failures,
                                              const SwarmConfig& config, Rng& rng) {
  if (worst_case_failures >= count) {
    throw std::invalid_argument("robust_placement: K must be smaller than the drone count");
  }
  // Hexagonal initialization.
  std::vector<Eigen::Vector2d> positions;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  const double dx = config.area / cols;
  const double dy = config.area / rows;
  for (int i = 0; i < count; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    const double offset = r % 2 == 0 ? dx / 4.0 : -dx / 4.0;
    positions.emplace_back(std::clamp(c * dx + dx / 2.0 + offset, 0.0, config.area),
                           std::clamp(r * dy + dy / 2.0, 0.0, config.area));
  }

  const double radius = (config.r_min + config.r_max) / 2.0;
  const int coarse = 50;
  CoarseCoverage cover(coarse, config.area, static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    cover.rasterize(static_cast<std::size_t>(i), positions[static_cast<std::size_t>(i)], radius);
  }

  const auto objective = [&](Rng& subset_rng) {
    // Exclusive-coverage weights bias subsets toward the most damaging drones.
    std::vector<double> weights(static_cast<std::size_t>(count), 1.0);
    double worst = 1.0;
    for (int s = 0; s < config.anneal_subsets; ++s) {
      std::vector<std::size_t> subset;
      std::vector<double> w = weights;
      for (int pick = 0; pick < worst_case_failures; ++pick) {
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        double draw = subset_rng.uniform(0.0, total);
        for (std::size_t d = 0; d < w.size(); ++d) {
          draw -= w[d];
          if (draw <= 0.0) {
            subset.push_back(d);
            w[d] = 0.0;
            break;
          }
        }
      }
      worst = std::min(worst, cover.union_coverage(subset, static_cast<std::size_t>(count)));
    }
    return worst;
  };

  Rng anneal_rng = rng.stream("anneal");
  double current = objective(anneal_rng);
  double best = current;
  std::vector<Eigen::Vector2d> best_positions = positions;
  double temperature = 0.05;
  for (int iter = 0; iter < config.anneal_iters; ++iter) {
    const auto mover = static_cast<std::size_t>(anneal_rng.uniform_int(
        static_cast<std::uint64_t>(count)));
    const Eigen::Vector2d saved = positions[mover];
    Eigen::Vector2d candidate = saved + Eigen::Vector2d(anneal_rng.normal(0.0, config.area / 20.0),
                                                        anneal_rng.normal(0.0, config.area / 20.0));
    candidate.x() = std::clamp(candidate.x(), 0.0, config.area);
    candidate.y() = std::clamp(candidate.y(), 0.0, config.area);
    positions[mover] = candidate;
    cover.rasterize(mover, candidate, radius);
    const double proposal = objective(anneal_rng);
    const double delta = proposal - current;
    if (delta >= 0.0 || anneal_rng.uniform() < std::exp(delta / temperature)) {
      current = proposal;
      if (current > best) {
        best = current;
        best_positions = positions;
      }
    } else {
      positions[mover] = saved;
      cover.rasterize(mover, saved, radius);
    }
    temperature *= config.anneal_cooling;
  }
  return best_positions;
}

ResultSeries run_swarm(const SwarmConfig& config, SwarmDesign design, std::uint64_t seed) {
  Rng root = Rng::seeded("swarm", seed);
  Rng placement_rng = root.stream("placement");
  Rng step_rng = root.stream("steps");

  SwarmWorld world;
  world.config = config;
  std::vector<Eigen::Vector2d> positions;
  if (design == SwarmDesign::Robust) {
    const int total = static_cast<int>(std::ceil(config.drones * (1.0 + config.redundancy)));
    positions = robust_placement(total, config.worst_case_failures, config, placement_rng);
  } else {
    positions = initial_placement(config.drones, config.area, placement_rng);
  }
  for (const auto& p : positions) {
    Drone drone;
    drone.position = p;
    drone.radius = config.r_max;
    world.drones.push_back(drone);
  }
  world.gamma = initial_dependency(positions, config.gamma_diagonal);

  ResultSeries series({"t", "coverage", "active"});
  for (int t = 0; t < config.horizon; ++t) {
    step(world, design, step_rng);
    int active = 0;
    for (const auto& drone : world.drones) active += drone.alive ? 1 : 0;
    series.add_row({static_cast<double>(t), coverage_ratio(world), static_cast<double>(active)});
  }
  return series;
}

}  // namespace resilib::swarm
