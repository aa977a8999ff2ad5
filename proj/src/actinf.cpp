#include "resilib/actinf.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "resilib/rng.hpp"

namespace resilib::actinf {

namespace {

constexpr double kBeliefFloor = 1e-6;

constexpr int kBearings[4][2] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};  // N, E, S, W

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

}  // namespace

std::pair<int, int> displacement(Action a) {
  switch (a) {
    case Action::North: return {0, 1};
    case Action::East: return {1, 0};
    case Action::South: return {0, -1};
    case Action::West: return {-1, 0};
    case Action::Stay: return {0, 0};
  }
  throw std::invalid_argument("displacement: invalid action");
}

GridWorld GridWorld::random(int size, double obstacle_density, Rng& rng) {
  GridWorld world;
  world.size = size;
  world.cells.resize(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  for (auto& c : world.cells) {
    if (rng.uniform() < obstacle_density) {
      c = static_cast<Cell>(1 + rng.uniform_int(3));
    } else {
      c = Cell::Free;
    }
  }
  return world;
}

void GridWorld::apply_stressor(double fraction, Rng& rng) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("apply_stressor: fraction outside [0,1]");
  }
  const auto total = cells.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  for (std::size_t idx : rng.sample_without_replacement(total, count)) {
    cells[idx] = static_cast<Cell>((static_cast<int>(cells[idx]) + 1) % kLabelCount);
  }
}

double free_energy(const Eigen::VectorXd& q, const Eigen::MatrixXd& p_joint, int observation) {
  if (q.size() != p_joint.rows()) throw std::invalid_argument("free_energy: state-space mismatch");
  if (observation < 0 || observation >= p_joint.cols()) {
    throw std::invalid_argument("free_energy: unknown observation");
  }
  if (std::abs(q.sum() - 1.0) > 1e-9 || q.minCoeff() < 0.0) {
    throw std::invalid_argument("free_energy: q is not a distribution");
  }
  if (p_joint.col(observation).sum() <= 0.0) {
    throw std::invalid_argument("free_energy: observation has zero probability");
  }
  double f = 0.0;
  for (Eigen::Index s = 0; s < q.size(); ++s) {
    if (q[s] <= 0.0) continue;
    f += q[s] * (std::log(q[s]) - std::log(std::max(p_joint(s, observation), 1e-300)));
  }
  return f;
}

Eigen::VectorXd fuse_beliefs(const Eigen::VectorXd& q_self,
                             const std::vector<Eigen::VectorXd>& neighbors) {
  const auto floor_normalize = [](Eigen::VectorXd v) {
    v = v.cwiseMax(kBeliefFloor);
    return (v / v.sum()).eval();
  };
  Eigen::VectorXd log_sum = floor_normalize(q_self).array().log().matrix();
  for (const auto& q : neighbors) {
    if (q.size() != q_self.size()) throw std::invalid_argument("fuse_beliefs: support mismatch");
    log_sum += floor_normalize(q).array().log().matrix();
  }
  log_sum /= static_cast<double>(neighbors.size() + 1);
  Eigen::VectorXd fused = (log_sum.array() - log_sum.maxCoeff()).exp().matrix();
  return fused / fused.sum();
}

Agent::Agent(Modality m, int x0, int y0, int grid_size, double free_prior)
    : modality(m), x(x0), y(y0) {
  if (free_prior <= 0.0 || free_prior >= 1.0) {
    throw std::invalid_argument("Agent: free_prior must lie in (0,1)");
  }
  belief = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(grid_size) * grid_size,
                                     kLabelCount, (1.0 - free_prior) / (kLabelCount - 1));
  belief.col(0).setConstant(free_prior);
}

namespace {

std::vector<int> ray_cells(int x, int y, int bearing, int range, int size) {
  std::vector<int> cells;
  for (int step = 1; step <= range; ++step) {
    const int cx = x + step * kBearings[bearing][0];
    const int cy = y + step * kBearings[bearing][1];
    if (cx < 0 || cx >= size || cy < 0 || cy >= size) break;
    cells.push_back(cy * size + cx);
  }
  return cells;
}

// Discretized Gaussian likelihood rows P(obs = b | true distance d): the
// Gaussian integrated over unit bins, with absorbing end bins.
Eigen::MatrixXd lidar_likelihood(const SensorModel& sensors) {
  const int r = sensors.lidar_range;
  const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  Eigen::MatrixXd lik(r, r);
  for (int d = 1; d <= r; ++d) {
    for (int b = 1; b <= r; ++b) {
      const double hi = b == r ? std::numeric_limits<double>::infinity()
                               : (b + 0.5 - d) / sensors.lidar_sigma;
      const double lo = b == 1 ? -std::numeric_limits<double>::infinity()
                               : (b - 0.5 - d) / sensors.lidar_sigma;
      lik(d - 1, b - 1) = (std::isinf(hi) ? 1.0 : phi(hi)) - (std::isinf(lo) ? 0.0 : phi(lo));
    }
  }
  return lik;
}

// Belief over the lidar distance variable (bins 1..range; the last bin also
// absorbs "no obstacle in range" and rays cut short by the boundary).
// Pinning a ray cell to free/obstacle is expressed via the override.
Eigen::VectorXd lidar_distance_belief(const Eigen::MatrixXd& belief,
                                      const std::vector<int>& ray, int range,
                                      int pin_index = -1, bool pin_free = false) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(range);
  double free_so_far = 1.0;
  for (std::size_t k = 0; k < ray.size(); ++k) {
    const double pf = static_cast<int>(k) == pin_index
                          ? (pin_free ? 1.0 : 0.0)
                          : belief(ray[k], static_cast<int>(Cell::Free));
    const double hit = free_so_far * (1.0 - pf);
    p[std::min<Eigen::Index>(static_cast<Eigen::Index>(k), range - 1)] += hit;
    free_so_far *= pf;
  }
  p[range - 1] += free_so_far;  // nothing within range (or the grid edge)
  return p;
}

// Belief over the camera variable: 0 = no obstacle within range, 1..3 the
// label of the nearest obstacle. The pinned cell uses the given label.
Eigen::VectorXd camera_variable_belief(const Eigen::MatrixXd& belief,
                                       const std::vector<int>& ray, int range,
                                       int pin_index = -1, int pin_label = -1) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(kLabelCount);
  double free_so_far = 1.0;
  const std::size_t limit = std::min<std::size_t>(ray.size(), static_cast<std::size_t>(range));
  for (std::size_t k = 0; k < limit; ++k) {
    for (int label = 1; label < kLabelCount; ++label) {
      const double pl = static_cast<int>(k) == pin_index
                            ? (pin_label == label ? 1.0 : 0.0)
                            : belief(ray[k], label);
      p[label] += free_so_far * pl;
    }
    const double pf = static_cast<int>(k) == pin_index
                          ? (pin_label == static_cast<int>(Cell::Free) ? 1.0 : 0.0)
                          : belief(ray[k], static_cast<int>(Cell::Free));
    free_so_far *= pf;
  }
  p[0] = free_so_far;
  return p;
}

Eigen::MatrixXd camera_likelihood(const SensorModel& sensors) {
  Eigen::MatrixXd lik(kLabelCount, kLabelCount);
  lik.setConstant((1.0 - sensors.camera_accuracy) / (kLabelCount - 1));
  lik.diagonal().setConstant(sensors.camera_accuracy);
  return lik;
}

// Mutual information I(latent; obs) given p(latent) and the channel rows
// P(obs | latent).
double information_gain(const Eigen::VectorXd& latent, const Eigen::MatrixXd& channel) {
  const Eigen::VectorXd obs = channel.transpose() * latent;
  double h_latent = entropy(latent);
  double h_cond = 0.0;
  for (Eigen::Index o = 0; o < obs.size(); ++o) {
    if (obs[o] <= 0.0) continue;
    Eigen::VectorXd post = latent.cwiseProduct(channel.col(o)) / obs[o];
    h_cond += obs[o] * entropy(post);
  }
  return h_latent - h_cond;
}

}  // namespace

double expected_free_energy(const Agent& agent, const std::vector<Action>& policy,
                            const SensorModel& sensors, int grid_size) {
  if (policy.empty() || policy.size() > 3) {
    throw std::invalid_argument("expected_free_energy: policy length must be 1..3");
  }
  const Eigen::MatrixXd lidar_lik = lidar_likelihood(sensors);
  const Eigen::MatrixXd cam_lik = camera_likelihood(sensors);
  int x = agent.x;
  int y = agent.y;
  double gain = 0.0;
  for (Action a : policy) {
    const auto [dx, dy] = displacement(a);
    if (x + dx >= 0 && x + dx < grid_size && y + dy >= 0 && y + dy < grid_size) {
      x += dx;
      y += dy;
    }
    for (int bearing = 0; bearing < 4; ++bearing) {
      if (agent.modality == Modality::Lidar) {
        const auto ray = ray_cells(x, y, bearing, sensors.lidar_range, grid_size);
        if (ray.empty()) continue;
        gain += information_gain(
            lidar_distance_belief(agent.belief, ray, sensors.lidar_range), lidar_lik);
      } else {
        const auto ray = ray_cells(x, y, bearing, sensors.camera_range, grid_size);
        if (ray.empty()) continue;
        gain += information_gain(
            camera_variable_belief(agent.belief, ray, sensors.camera_range), cam_lik);
      }
    }
  }
  return -gain;  // uniform preferences: EFE ranks by negative information gain
}

Action select_action(const Agent& agent, const SensorModel& sensors, int grid_size,
                     int planning_horizon, int teammate_x, int teammate_y) {
  if (planning_horizon < 1 || planning_horizon > 3) {
    throw std::invalid_argument("select_action: planning horizon must be 1..3");
  }
  // Tail value for the truncated enumeration: the best distance-discounted
  // cell entropy reachable from a position. Pulls the agent toward far
  // uncertain regions the short policies cannot see.
  std::vector<double> cell_entropy(static_cast<std::size_t>(grid_size) * grid_size);
  for (Eigen::Index c = 0; c < agent.belief.rows(); ++c) {
    double h = 0.0;
    for (int l = 0; l < kLabelCount; ++l) {
      const double q = agent.belief(c, l);
      if (q > 0.0) h -= q * std::log(q);
    }
    cell_entropy[static_cast<std::size_t>(c)] = h;
  }
  const auto tail_value = [&](int px, int py) {
    double best_v = 0.0;
    for (int cy = 0; cy < grid_size; ++cy) {
      for (int cx = 0; cx < grid_size; ++cx) {
        const double dist = std::abs(cx - px) + std::abs(cy - py);
        const double v = cell_entropy[static_cast<std::size_t>(cy * grid_size + cx)] -
                         0.15 * dist;
        if (v > best_v) best_v = v;
      }
    }
    return best_v;
  };
  long policy_count = 1;
  for (int i = 0; i < planning_horizon; ++i) policy_count *= kActionCount;
  double best = std::numeric_limits<double>::infinity();
  Action best_action = Action::Stay;
  for (long code = 0; code < policy_count; ++code) {
    std::vector<Action> policy(static_cast<std::size_t>(planning_horizon));
    long rest = code;
    // Lexicographic in the fixed N,E,S,W,STAY order, most significant first.
    for (int i = planning_horizon - 1; i >= 0; --i) {
      policy[static_cast<std::size_t>(i)] = static_cast<Action>(rest % kActionCount);
      rest /= kActionCount;
    }
    double g = expected_free_energy(agent, policy, sensors, grid_size);
    if (teammate_x >= 0) {
      // The teammate harvests the information near itself; walking there is
      // wasted sensing.
      int x = agent.x;
      int y = agent.y;
      for (Action a : policy) {
        const auto [dx, dy] = displacement(a);
        if (x + dx >= 0 && x + dx < grid_size && y + dy >= 0 && y + dy < grid_size) {
          x += dx;
          y += dy;
        }
      }
      const double dist = std::abs(x - teammate_x) + std::abs(y - teammate_y);
      const double radius = 2.0 * sensors.lidar_range;
      if (dist < radius) g += 1.5 * (1.0 - dist / radius);
    }
    {
      int x = agent.x;
      int y = agent.y;
      for (Action a : policy) {
        const auto [dx, dy] = displacement(a);
        if (x + dx >= 0 && x + dx < grid_size && y + dy >= 0 && y + dy < grid_size) {
          x += dx;
          y += dy;
        }
      }
      g -= tail_value(x, y);
      // Inhibition of return: dithering back onto the recent trail wastes
      // sensing that the tail value cannot recoup.
      const int end_cell = y * grid_size + x;
      for (int cell : agent.recent_cells) {
        if (cell == end_cell) {
          g += 0.5;
          break;
        }
      }
    }
    if (g < best - 1e-12) {
      best = g;
      best_action = policy.front();
    }
  }
  return best_action;
}

std::pair<int, int> observe_and_update(Agent& agent, const GridWorld& world,
                                       const SensorModel& sensors, Rng& rng) {
  const Eigen::MatrixXd lidar_lik = lidar_likelihood(sensors);
  const Eigen::MatrixXd cam_lik = camera_likelihood(sensors);
  int surprises = 0;
  int total = 0;
  for (int bearing = 0; bearing < 4; ++bearing) {
    if (agent.modality == Modality::Lidar) {
      const auto ray = ray_cells(agent.x, agent.y, bearing, sensors.lidar_range, world.size);
      if (ray.empty()) continue;
      // True capped distance to the nearest non-free cell.
      int true_d = sensors.lidar_range;
      for (std::size_t k = 0; k < ray.size(); ++k) {
        if (world.cells[static_cast<std::size_t>(ray[k])] != Cell::Free) {
          true_d = std::min<int>(static_cast<int>(k) + 1, sensors.lidar_range);
          break;
        }
      }
      // Sample the observed bin from the likelihood row.
      double u = rng.uniform();
      int obs = sensors.lidar_range;
      for (int b = 1; b <= sensors.lidar_range; ++b) {
        u -= lidar_lik(true_d - 1, b - 1);
        if (u <= 0.0) {
          obs = b;
          break;
        }
      }
      // Surprise check against the predicted observation distribution.
      const Eigen::VectorXd predicted =
          lidar_lik.transpose() *
          lidar_distance_belief(agent.belief, ray, sensors.lidar_range);
      ++total;
      if (predicted[obs - 1] < sensors.surprise_threshold) {
        ++surprises;
        for (int cell : ray) {
          agent.belief.row(cell) = (1.0 - sensors.surprise_mixing) * agent.belief.row(cell) +
                                   sensors.surprise_mixing *
                                       Eigen::RowVectorXd::Constant(kLabelCount,
                                                                    1.0 / kLabelCount);
        }
      }
      // Exact ray inference: the nearest-obstacle distance is a sufficient
      // statistic of the ray, so its posterior maps back to per-cell
      // marginals in closed form (cells beyond the obstacle keep their
      // prior). Per-cell mean-field updates mislocalize obstacles one cell
      // toward the agent.
      Eigen::VectorXd post_d =
          lidar_distance_belief(agent.belief, ray, sensors.lidar_range)
              .cwiseProduct(lidar_lik.col(obs - 1));
      post_d /= post_d.sum();
      for (std::size_t k = 0; k < ray.size(); ++k) {
        const auto bin = static_cast<Eigen::Index>(k);
        if (bin >= sensors.lidar_range - 1) break;  // the capped last bin is ambiguous
        const double beyond = post_d.segment(bin + 1, sensors.lidar_range - bin - 1).sum();
        const double at = post_d[bin];
        const double screened = bin > 0 ? post_d.head(bin).sum() : 0.0;
        const Eigen::VectorXd row = agent.belief.row(ray[k]).transpose();
        const double p_obst = 1.0 - row[0];
        Eigen::VectorXd next(kLabelCount);
        next[0] = beyond + screened * row[0];
        for (int label = 1; label < kLabelCount; ++label) {
          const double color_share = p_obst > 1e-12 ? row[label] / p_obst
                                                    : 1.0 / (kLabelCount - 1);
          next[label] = at * color_share + screened * row[label];
        }
        next = next.cwiseMax(5e-3 * next.sum());
        agent.belief.row(ray[k]) = (next / next.sum()).transpose();
      }
    } else {
      const auto ray = ray_cells(agent.x, agent.y, bearing, sensors.camera_range, world.size);
      if (ray.empty()) continue;
      int true_label = 0;
      for (std::size_t k = 0; k < ray.size(); ++k) {
        const Cell c = world.cells[static_cast<std::size_t>(ray[k])];
        if (c != Cell::Free) {
          true_label = static_cast<int>(c);
          break;
        }
      }
      double u = rng.uniform();
      int obs = kLabelCount - 1;
      for (int o = 0; o < kLabelCount; ++o) {
        u -= cam_lik(true_label, o);
        if (u <= 0.0) {
          obs = o;
          break;
        }
      }
      const Eigen::VectorXd predicted =
          cam_lik.transpose() *
          camera_variable_belief(agent.belief, ray, sensors.camera_range);
      ++total;
      if (predicted[obs] < sensors.surprise_threshold) {
        ++surprises;
        for (int cell : ray) {
          agent.belief.row(cell) = (1.0 - sensors.surprise_mixing) * agent.belief.row(cell) +
                                   sensors.surprise_mixing *
                                       Eigen::RowVectorXd::Constant(kLabelCount,
                                                                    1.0 / kLabelCount);
        }
      }
      // Exact ray inference over (first-obstacle position, label): the
      // channel only depends on the label, so the posterior factorizes into
      // position weights times a shared label reweighting.
      const std::size_t limit =
          std::min<std::size_t>(ray.size(), static_cast<std::size_t>(sensors.camera_range));
      std::vector<Eigen::VectorXd> post_pos(limit);  // per position: label posterior weights
      double post_none;
      {
        double free_so_far = 1.0;
        double total = 0.0;
        for (std::size_t k = 0; k < limit; ++k) {
          Eigen::VectorXd w = Eigen::VectorXd::Zero(kLabelCount);
          for (int label = 1; label < kLabelCount; ++label) {
            w[label] = free_so_far * agent.belief(ray[k], label) * cam_lik(label, obs);
          }
          post_pos[k] = w;
          total += w.sum();
          free_so_far *= agent.belief(ray[k], 0);
        }
        post_none = free_so_far * cam_lik(0, obs);
        total += post_none;
        for (auto& w : post_pos) w /= total;
        post_none /= total;
      }
      double screened = 0.0;
      for (std::size_t k = 0; k < limit; ++k) {
        double beyond = post_none;
        for (std::size_t j = k + 1; j < limit; ++j) beyond += post_pos[j].sum();
        const Eigen::VectorXd row = agent.belief.row(ray[k]).transpose();
        Eigen::VectorXd next(kLabelCount);
        next[0] = beyond + screened * row[0];
        for (int label = 1; label < kLabelCount; ++label) {
          next[label] = post_pos[k][label] + screened * row[label];
        }
        next = next.cwiseMax(5e-3 * next.sum());
        agent.belief.row(ray[k]) = (next / next.sum()).transpose();
        screened += post_pos[k].sum();
      }
    }
  }
  return {surprises, total};
}

ResultSeries run_gridworld(const GridConfig& config, GridDesign design, std::uint64_t seed) {
  Rng root = Rng::seeded("gridworld", seed);
  Rng world_rng = root.stream("world");
  Rng stressor_rng = root.stream("stressor");
  Rng obs_rng = root.stream(design == GridDesign::Composition ? "obs-composition"
                                                              : "obs-independent");

  GridWorld world = GridWorld::random(config.size, config.obstacle_density, world_rng);
  const double free_prior = 1.0 - config.obstacle_density;
  std::vector<Agent> agents{
      Agent(Modality::Lidar, config.lidar_start_x, config.lidar_start_y, config.size, free_prior),
      Agent(Modality::Camera, config.camera_start_x, config.camera_start_y, config.size,
            free_prior)};

  std::vector<std::deque<int>> surprise_log(agents.size());
  std::vector<int> last_reset(agents.size(), -1000);

  const auto accuracy = [&](const Agent& agent) {
    int hits = 0;
    for (int idx = 0; idx < config.size * config.size; ++idx) {
      Eigen::Index argmax = 0;
      agent.belief.row(idx).maxCoeff(&argmax);
      if (static_cast<int>(argmax) == static_cast<int>(world.cells[static_cast<std::size_t>(idx)])) {
        ++hits;
      }
    }
    return static_cast<double>(hits) / (config.size * config.size);
  };

  ResultSeries series({"t", "acc_lidar", "acc_camera"});
  for (int t = 0; t < config.horizon; ++t) {
    if (t == config.stressor_time) world.apply_stressor(config.stressor_fraction, stressor_rng);

    for (auto& agent : agents) {
      if (config.volatility > 0.0) {
        Eigen::RowVectorXd prior(kLabelCount);
        prior.setConstant(config.obstacle_density / (kLabelCount - 1));
        prior[0] = free_prior;
        agent.belief = (1.0 - config.volatility) * agent.belief +
                       config.volatility * prior.replicate(agent.belief.rows(), 1);
      }
      const Action action =
          select_action(agent, config.sensors, config.size, config.planning_horizon);
      const auto [dx, dy] = displacement(action);
      if (world.inside(agent.x + dx, agent.y + dy)) {
        agent.x += dx;
        agent.y += dy;
      }
      agent.recent_cells.push_back(agent.y * config.size + agent.x);
      if (agent.recent_cells.size() > 8) {
        agent.recent_cells.erase(agent.recent_cells.begin());
      }
      const auto [surprises, observations] =
          observe_and_update(agent, world, config.sensors, obs_rng);
      const std::size_t agent_idx = static_cast<std::size_t>(&agent - agents.data());
      auto& log = surprise_log[agent_idx];
      for (int i = 0; i < observations; ++i) {
        log.push_back(i < surprises ? 1 : 0);
        if (static_cast<int>(log.size()) > config.reset_window) log.pop_front();
      }
      if (static_cast<int>(log.size()) == config.reset_window &&
          t - last_reset[agent_idx] > config.reset_cooldown) {
        const double rate = std::accumulate(log.begin(), log.end(), 0) /
                            static_cast<double>(log.size());
        if (rate > config.reset_trigger) {
          // Change-point: restore plasticity; uniform mixing keeps argmax.
          agent.belief = (1.0 - config.reset_mixing) * agent.belief +
                         config.reset_mixing / kLabelCount *
                             Eigen::MatrixXd::Ones(agent.belief.rows(), kLabelCount);
          last_reset[agent_idx] = t;
          log.clear();
        }
      }
    }

    if (design == GridDesign::Composition) {
      // Synchronous pairwise fusion from this round's published beliefs.
      const Eigen::MatrixXd lidar_snapshot = agents[0].belief;
      const Eigen::MatrixXd camera_snapshot = agents[1].belief;
      for (int idx = 0; idx < config.size * config.size; ++idx) {
        const Eigen::VectorXd a = lidar_snapshot.row(idx).transpose();
        const Eigen::VectorXd b = camera_snapshot.row(idx).transpose();
        agents[0].belief.row(idx) = fuse_beliefs(a, {b}).transpose();
        agents[1].belief.row(idx) = fuse_beliefs(b, {a}).transpose();
      }
    }

    series.add_row({static_cast<double>(t), accuracy(agents[0]), accuracy(agents[1])});
  }
  return series;
}

}  // namespace resilib::actinf
