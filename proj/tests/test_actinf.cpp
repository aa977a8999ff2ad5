#include <doctest.h>

#include <cmath>

#include "resilib/actinf.hpp"
#include "resilib/rng.hpp"

using namespace resilib;
using namespace resilib::actinf;

TEST_CASE("free energy equals negative log evidence at the exact posterior") {
  // Joint over 3 states x 2 observations.
  Eigen::MatrixXd joint(3, 2);
  joint << 0.1, 0.2, 0.25, 0.05, 0.15, 0.25;
  const int obs = 1;
  const double p_obs = joint.col(obs).sum();
  Eigen::VectorXd posterior = joint.col(obs) / p_obs;
  CHECK(free_energy(posterior, joint, obs) == doctest::Approx(-std::log(p_obs)).epsilon(1e-12));
}

TEST_CASE("free energy of the uniform two-state example") {
  Eigen::MatrixXd joint(2, 2);
  joint.setConstant(0.25);
  Eigen::VectorXd q = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(free_energy(q, joint, 0) == doctest::Approx(-std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("free energy is bounded below by negative log evidence") {
  Rng rng = Rng::seeded("actinf-fe", 1);
  for (int i = 0; i < 1000; ++i) {
    const int states = 2 + static_cast<int>(rng.uniform_int(4));
    const int observations = 2 + static_cast<int>(rng.uniform_int(3));
    Eigen::MatrixXd joint(states, observations);
    for (int s = 0; s < states; ++s) {
      for (int o = 0; o < observations; ++o) joint(s, o) = rng.uniform(0.01, 1.0);
    }
    joint /= joint.sum();
    Eigen::VectorXd q(states);
    for (int s = 0; s < states; ++s) q[s] = rng.uniform(0.01, 1.0);
    q /= q.sum();
    const int obs = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(observations)));
    CHECK(free_energy(q, joint, obs) >= -std::log(joint.col(obs).sum()) - 1e-10);
  }
}

TEST_CASE("free energy input validation") {
  Eigen::MatrixXd joint(2, 2);
  joint << 0.5, 0.0, 0.5, 0.0;
  Eigen::VectorXd q = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_THROWS(free_energy(q, joint, 1));  // zero-probability observation
  CHECK_THROWS(free_energy(q, joint, 5));
  Eigen::VectorXd bad = Eigen::VectorXd::Constant(2, 0.7);
  CHECK_THROWS(free_energy(bad, joint, 0));
}

TEST_CASE("fusion of identical beliefs is the identity") {
  Eigen::VectorXd q(4);
  q << 0.4, 0.3, 0.2, 0.1;
  const Eigen::VectorXd fused = fuse_beliefs(q, {q, q});
  CHECK((fused - q).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fusion of mirrored beliefs is uniform") {
  Eigen::VectorXd a(2);
  a << 0.8, 0.2;
  Eigen::VectorXd b(2);
  b << 0.2, 0.8;
  const Eigen::VectorXd fused = fuse_beliefs(a, {b});
  CHECK(fused[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fused[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("three-belief geometric fusion, hand evaluated") {
  Eigen::VectorXd a(2);
  a << 0.9, 0.1;
  Eigen::VectorXd c(2);
  c << 0.5, 0.5;
  const Eigen::VectorXd fused = fuse_beliefs(a, {a, c});
  // Proportional to (0.9^2*0.5, 0.1^2*0.5)^(1/3): cube roots (0.7399, 0.1711),
  // normalized (0.8122, 0.1878).
  const double first = std::cbrt(0.9 * 0.9 * 0.5);
  const double second = std::cbrt(0.1 * 0.1 * 0.5);
  CHECK(fused[0] == doctest::Approx(first / (first + second)).epsilon(1e-6));
  CHECK(fused[1] == doctest::Approx(second / (first + second)).epsilon(1e-6));
}

TEST_CASE("fusion is commutative in the neighbor order and floors zeros") {
  Rng rng = Rng::seeded("actinf-fusion", 2);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd a(4);
    Eigen::VectorXd b(4);
    Eigen::VectorXd c(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = rng.uniform(0.0, 1.0);
      b[k] = rng.uniform(0.0, 1.0);
      c[k] = rng.uniform(0.0, 1.0);
    }
    a /= a.sum();
    b /= b.sum();
    c /= c.sum();
    const Eigen::VectorXd f1 = fuse_beliefs(a, {b, c});
    const Eigen::VectorXd f2 = fuse_beliefs(a, {c, b});
    CHECK((f1 - f2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f1.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // A zero-everywhere product row survives through flooring.
  Eigen::VectorXd z1(2);
  z1 << 1.0, 0.0;
  Eigen::VectorXd z2(2);
  z2 << 0.0, 1.0;
  const Eigen::VectorXd fused = fuse_beliefs(z1, {z2});
  CHECK(fused.sum() == doctest::Approx(1.0));
  CHECK(fused[0] == doctest::Approx(0.5));
}

TEST_CASE("stay policy in a fully known neighborhood is never strictly preferred") {
  Agent agent(Modality::Lidar, 10, 10, 20);
  // Fully certain belief: everything Free.
  agent.belief.setZero();
  agent.belief.col(0).setOnes();
  const SensorModel sensors;
  const double g_stay = expected_free_energy(agent, {Action::Stay, Action::Stay}, sensors, 20);
  CHECK(g_stay == doctest::Approx(0.0).epsilon(1e-9));
  for (Action a : {Action::North, Action::East, Action::South, Action::West}) {
    CHECK(expected_free_energy(agent, {a, a}, sensors, 20) <= g_stay + 1e-12);
  }
}

TEST_CASE("policies toward uncertain cells have lower expected free energy") {
  Agent agent(Modality::Lidar, 10, 3, 20);
  // South of the agent everything is known Free; north is maximally uncertain.
  agent.belief.setZero();
  agent.belief.col(0).setOnes();
  for (int y = 4; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      agent.belief.row(y * 20 + x).setConstant(0.25);
    }
  }
  const SensorModel sensors;
  const double g_north = expected_free_energy(agent, {Action::North, Action::North}, sensors, 20);
  const double g_south = expected_free_energy(agent, {Action::South, Action::South}, sensors, 20);
  CHECK(g_north < g_south);
  CHECK(select_action(agent, sensors, 20, 2) == Action::North);
}

TEST_CASE("information gain matches a brute-force bayes oracle") {
  // Two algebraic routes: H(d) - E_o H(d|o) inside expected_free_energy
  // versus the direct double sum over the joint. A near-deterministic sensor
  // reduces the gain to the latent entropy.
  Rng rng = Rng::seeded("actinf-ig", 3);
  SensorModel sharp;
  sharp.lidar_sigma = 0.05;
  Agent agent(Modality::Lidar, 5, 5, 12);
  for (int idx = 0; idx < 144; ++idx) {
    Eigen::VectorXd row(4);
    for (int k = 0; k < 4; ++k) row[k] = rng.uniform(0.05, 1.0);
    agent.belief.row(idx) = (row / row.sum()).transpose();
  }
  const double g = expected_free_energy(agent, {Action::Stay}, sharp, 12);
  // Oracle: with a near-deterministic channel the information gain per
  // bearing is the entropy of the distance variable.
  double expected_gain = 0.0;
  for (int bearing = 0; bearing < 4; ++bearing) {
    const int dx[4] = {0, 1, 0, -1};
    const int dy[4] = {1, 0, -1, 0};
    Eigen::VectorXd p = Eigen::VectorXd::Zero(sharp.lidar_range);
    double free_so_far = 1.0;
    for (int step = 1; step <= sharp.lidar_range; ++step) {
      const int cx = 5 + step * dx[bearing];
      const int cy = 5 + step * dy[bearing];
      if (cx < 0 || cx >= 12 || cy < 0 || cy >= 12) break;
      const double pf = agent.belief(cy * 12 + cx, 0);
      p[std::min(step, sharp.lidar_range) - 1] += free_so_far * (1.0 - pf);
      free_so_far *= pf;
    }
    p[sharp.lidar_range - 1] += free_so_far;
    for (int d = 0; d < sharp.lidar_range; ++d) {
      if (p[d] > 0.0) expected_gain -= p[d] * std::log(p[d]);
    }
  }
  CHECK(-g == doctest::Approx(expected_gain).epsilon(0.02));
}

TEST_CASE("bayes update with a uniform likelihood leaves beliefs unchanged") {
  // Camera with accuracy 1/4 is a uniform channel over the four outcomes.
  SensorModel blind;
  blind.camera_accuracy = 0.25;
  Rng rng = Rng::seeded("actinf-uniform", 4);
  GridWorld world = GridWorld::random(10, 0.3, rng);
  Agent agent(Modality::Camera, 5, 5, 10);
  const Eigen::MatrixXd before = agent.belief;
  observe_and_update(agent, world, blind, rng);
  CHECK((agent.belief - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("belief rows stay normalized through updates and fusion") {
  Rng rng = Rng::seeded("actinf-norm", 5);
  GridConfig config;
  config.size = 10;
  config.horizon = 30;
  config.stressor_time = 10;
  config.lidar_start_x = 2;
  config.lidar_start_y = 2;
  config.camera_start_x = 7;
  config.camera_start_y = 7;
  GridWorld world = GridWorld::random(config.size, 0.3, rng);
  Agent lidar(Modality::Lidar, 2, 2, config.size);
  Agent camera(Modality::Camera, 7, 7, config.size);
  for (int t = 0; t < 25; ++t) {
    observe_and_update(lidar, world, config.sensors, rng);
    observe_and_update(camera, world, config.sensors, rng);
    for (int idx = 0; idx < config.size * config.size; ++idx) {
      const Eigen::VectorXd a = lidar.belief.row(idx).transpose();
      const Eigen::VectorXd b = camera.belief.row(idx).transpose();
      lidar.belief.row(idx) = fuse_beliefs(a, {b}).transpose();
      camera.belief.row(idx) = fuse_beliefs(b, {a}).transpose();
      CHECK(std::abs(lidar.belief.row(idx).sum() - 1.0) < 1e-9);
      CHECK(std::abs(camera.belief.row(idx).sum() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("stressor with zero fraction changes nothing") {
  Rng rng = Rng::seeded("actinf-stressor", 6);
  GridWorld world = GridWorld::random(8, 0.4, rng);
  const auto before = world.cells;
  world.apply_stressor(0.0, rng);
  CHECK(world.cells == before);
  world.apply_stressor(1.0, rng);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(static_cast<int>(world.cells[i]) ==
          (static_cast<int>(before[i]) + 1) % kLabelCount);
  }
}

TEST_CASE("without a stressor both designs trend upward") {
  GridConfig config;
  config.horizon = 60;
  config.stressor_time = -1;
  for (GridDesign design : {GridDesign::Composition, GridDesign::NoComposition}) {
    const ResultSeries s = run_gridworld(config, design, 2);
    const double early = (s.rows[4][1] + s.rows[4][2]) / 2.0;
    const double late = (s.rows.back()[1] + s.rows.back()[2]) / 2.0;
    CHECK(late > early);
  }
}

TEST_CASE("composition accelerates learning and aids recovery") {
  GridConfig config;  // paper setting: 20x20, stressor at 60, fraction 0.3
  double comp_final = 0.0;
  double nocomp_final = 0.0;
  double comp_recovered = 0.0;
  double comp_trough = 0.0;
  double comp_pre = 0.0;
  const int seeds = 4;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const ResultSeries comp = run_gridworld(config, GridDesign::Composition, seed);
    const ResultSeries nocomp = run_gridworld(config, GridDesign::NoComposition, seed);
    const auto mean_acc = [](const ResultSeries& s, int t) {
      return (s.rows[static_cast<std::size_t>(t)][1] + s.rows[static_cast<std::size_t>(t)][2]) /
             2.0;
    };
    comp_final += mean_acc(comp, 199);
    nocomp_final += mean_acc(nocomp, 199);
    double pre = 0.0;
    for (int t = 55; t < 60; ++t) pre += mean_acc(comp, t) / 5.0;
    double trough = 1.0;
    for (int t = 60; t < 80; ++t) trough = std::min(trough, mean_acc(comp, t));
    comp_pre += pre;
    comp_trough += trough;
    comp_recovered += mean_acc(comp, 120);
  }
  CHECK(comp_final / seeds >= nocomp_final / seeds + 0.05);
  // Mechanism check: a clear drop and a meaningful rebound by t = 120. The
  // spec's 50%-of-drop figure is asserted by the acceptance suite.
  CHECK(comp_pre / seeds - comp_trough / seeds > 0.1);
  CHECK(comp_recovered / seeds >=
        comp_trough / seeds + 0.3 * (comp_pre / seeds - comp_trough / seeds));
}
