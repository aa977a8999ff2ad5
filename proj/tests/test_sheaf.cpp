#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "resilib/graph.hpp"
#include "resilib/rng.hpp"
#include "resilib/sheaf.hpp"

using namespace resilib;
using namespace resilib::sheaf;

namespace {

SheafGraph random_sheaf(Rng& rng, int nodes = 5, double p = 0.6) {
  const Graph g = Graph::connected_erdos_renyi(nodes, p, rng);
  std::vector<int> dims;
  for (int i = 0; i < nodes; ++i) dims.push_back(2 + static_cast<int>(rng.uniform_int(3)));
  return SheafGraph::random(g, dims, 2, rng);
}

Cochain0 random_cochain(const SheafGraph& sheaf, Rng& rng) {
  Cochain0 theta(sheaf.vertex_dims.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = Eigen::VectorXd::NullaryExpr(sheaf.vertex_dims[i],
                                            [&](Eigen::Index) { return rng.normal(); });
  }
  return theta;
}

Eigen::VectorXd flatten(const SheafGraph& sheaf, const Cochain0& theta) {
  Eigen::Index total = 0;
  for (int d : sheaf.vertex_dims) total += d;
  Eigen::VectorXd flat(total);
  Eigen::Index at = 0;
  for (const auto& x : theta) {
    flat.segment(at, x.size()) = x;
    at += x.size();
  }
  return flat;
}

}  // namespace

TEST_CASE("constant scalar sheaf acts like the graph laplacian") {
  Graph g(2);
  g.add_edge(0, 1);
  const SheafGraph sheaf = SheafGraph::constant(g, 1);
  Cochain0 theta(2);
  theta[0] = Eigen::VectorXd::Constant(1, 3.0);
  theta[1] = Eigen::VectorXd::Constant(1, 1.0);
  const Cochain0 out = sheaf_laplacian_apply(sheaf, theta);
  CHECK(out[0][0] == doctest::Approx(2.0));   // a - b
  CHECK(out[1][0] == doctest::Approx(-2.0));  // b - a
  CHECK(disagreement(sheaf, theta) == doctest::Approx(4.0));
}

TEST_CASE("constant sheaf equals graph laplacian tensor identity") {
  Rng rng = Rng::seeded("sheaf-constant", 1);
  const Graph g = Graph::connected_erdos_renyi(6, 0.5, rng);
  const int dim = 3;
  const SheafGraph sheaf = SheafGraph::constant(g, dim);
  const Eigen::MatrixXd L = sheaf_laplacian_dense(sheaf);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6 * dim, 6 * dim);
  for (int v = 0; v < 6; ++v) {
    expected.block(v * dim, v * dim, dim, dim) =
        g.degree(v) * Eigen::MatrixXd::Identity(dim, dim);
  }
  for (auto [u, v] : g.edges()) {
    expected.block(u * dim, v * dim, dim, dim) = -Eigen::MatrixXd::Identity(dim, dim);
    expected.block(v * dim, u * dim, dim, dim) = -Eigen::MatrixXd::Identity(dim, dim);
  }
  CHECK((L - expected).norm() < 1e-12);
}

TEST_CASE("laplacian apply matches the dense block assembly") {
  Rng rng = Rng::seeded("sheaf-assembly", 2);
  for (int i = 0; i < 30; ++i) {
    const SheafGraph sheaf = random_sheaf(rng);
    const Cochain0 theta = random_cochain(sheaf, rng);
    const Eigen::VectorXd direct = flatten(sheaf, sheaf_laplacian_apply(sheaf, theta));
    const Eigen::VectorXd via_dense = sheaf_laplacian_dense(sheaf) * flatten(sheaf, theta);
    CHECK((direct - via_dense).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("disagreement equals the laplacian quadratic form") {
  Rng rng = Rng::seeded("sheaf-quadform", 3);
  for (int i = 0; i < 50; ++i) {
    const SheafGraph sheaf = random_sheaf(rng);
    const Cochain0 theta = random_cochain(sheaf, rng);
    const Eigen::VectorXd flat = flatten(sheaf, theta);
    const double quad = flat.dot(flatten(sheaf, sheaf_laplacian_apply(sheaf, theta)));
    CHECK(disagreement(sheaf, theta) == doctest::Approx(quad).epsilon(1e-10));
    CHECK(quad >= -1e-9);
  }
}

TEST_CASE("laplacian is symmetric positive semidefinite") {
  Rng rng = Rng::seeded("sheaf-psd", 4);
  for (int i = 0; i < 20; ++i) {
    const SheafGraph sheaf = random_sheaf(rng);
    const Eigen::MatrixXd L = sheaf_laplacian_dense(sheaf);
    CHECK((L - L.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("global sections lie in the kernel") {
  Rng rng = Rng::seeded("sheaf-kernel", 5);
  // Constant sheaf: equal vertex vectors project equally on every edge.
  const Graph g = Graph::connected_erdos_renyi(7, 0.5, rng);
  const SheafGraph sheaf = SheafGraph::constant(g, 2);
  Cochain0 theta(7, Eigen::VectorXd::Constant(2, 1.7));
  const Cochain0 out = sheaf_laplacian_apply(sheaf, theta);
  double norm = 0.0;
  for (const auto& x : out) norm += x.squaredNorm();
  CHECK(std::sqrt(norm) < 1e-9);
  CHECK(disagreement(sheaf, theta) < 1e-12);
}

TEST_CASE("shape mismatches are rejected") {
  Graph g(2);
  g.add_edge(0, 1);
  const SheafGraph sheaf = SheafGraph::constant(g, 2);
  Cochain0 wrong(2);
  wrong[0] = Eigen::VectorXd::Zero(2);
  wrong[1] = Eigen::VectorXd::Zero(3);
  CHECK_THROWS(sheaf_laplacian_apply(sheaf, wrong));
  CHECK_THROWS(disagreement(sheaf, wrong));
}

TEST_CASE("diffusion from a global section stays put") {
  Rng rng = Rng::seeded("sheaf-fixed", 6);
  const Graph g = Graph::connected_erdos_renyi(6, 0.6, rng);
  const SheafGraph sheaf = SheafGraph::constant(g, 2);
  const Cochain0 start(6, Eigen::VectorXd::Constant(2, -0.4));
  const DiffusionResult result = diffuse(sheaf, start, 0.05, 50);
  for (const auto& x : result.theta) CHECK((x - start[0]).norm() < 1e-12);
}

TEST_CASE("constant-sheaf diffusion converges to the vertex mean") {
  Rng rng = Rng::seeded("sheaf-mean", 7);
  const Graph g = Graph::connected_erdos_renyi(8, 0.5, rng);
  const SheafGraph sheaf = SheafGraph::constant(g, 1);
  Cochain0 theta(8);
  double mean = 0.0;
  for (auto& x : theta) {
    x = Eigen::VectorXd::Constant(1, rng.uniform(-3.0, 3.0));
    mean += x[0];
  }
  mean /= 8.0;
  const double step = 0.9 * 2.0 / laplacian_spectral_radius(sheaf);
  const DiffusionResult result = diffuse(sheaf, theta, std::min(step, 0.2), 4000);
  for (const auto& x : result.theta) CHECK(x[0] == doctest::Approx(mean).epsilon(1e-7));
}

TEST_CASE("diffusion monotonically reduces disagreement") {
  Rng rng = Rng::seeded("sheaf-monotone", 8);
  for (int i = 0; i < 100; ++i) {
    const SheafGraph sheaf = random_sheaf(rng);
    const Cochain0 theta = random_cochain(sheaf, rng);
    const double radius = laplacian_spectral_radius(sheaf);
    const DiffusionResult result = diffuse(sheaf, theta, 1.0 / std::max(radius, 1e-6), 30);
    for (std::size_t k = 1; k < result.disagreement_trace.size(); ++k) {
      CHECK(result.disagreement_trace[k] <= result.disagreement_trace[k - 1] + 1e-10);
    }
  }
}

TEST_CASE("unstable diffusion step is flagged") {
  Rng rng = Rng::seeded("sheaf-unstable", 9);
  const SheafGraph sheaf = random_sheaf(rng);
  const double radius = laplacian_spectral_radius(sheaf);
  CHECK_THROWS(diffuse(sheaf, random_cochain(sheaf, rng), 2.1 / radius, 5));
}

TEST_CASE("sheaf json round trip") {
  Rng rng = Rng::seeded("sheaf-json", 10);
  const SheafGraph sheaf = random_sheaf(rng);
  const SheafGraph back = SheafGraph::from_json(sheaf.to_json());
  REQUIRE(back.edges.size() == sheaf.edges.size());
  for (std::size_t e = 0; e < sheaf.edges.size(); ++e) {
    CHECK(back.edges[e].u == sheaf.edges[e].u);
    CHECK((back.edges[e].from_u - sheaf.edges[e].from_u).norm() < 1e-12);
    CHECK((back.edges[e].from_v - sheaf.edges[e].from_v).norm() < 1e-12);
  }
}

TEST_CASE("zero disagreement weight reduces to independent local training") {
  LearningConfig config;
  config.disagreement_weight = 0.0;
  config.rounds = 40;
  const LearningResult result = learn_restrictions(config, 3);
  // Local least squares on clean data: high accuracy everywhere.
  CHECK(result.history.rows.back()[2] > 0.9);
}

TEST_CASE("no failures: accuracy trends upward without a drop") {
  LearningConfig config;
  config.rounds = 50;
  const LearningResult result = learn_restrictions(config, 4);
  const auto acc = result.history.column("test_acc");
  CHECK(acc.back() > 0.9);
  // No round loses more than a whisker once past the initial transient.
  for (std::size_t r = 11; r < acc.size(); ++r) CHECK(acc[r] >= acc[r - 1] - 0.02);
}

TEST_CASE("alternating sweeps never increase the combined objective") {
  LearningConfig config;
  config.lr_theta = 0.01;
  config.lr_maps = 0.002;
  config.rounds = 60;
  const LearningResult result = learn_restrictions(config, 5);
  const auto objective = result.history.column("objective");
  for (std::size_t r = 1; r < objective.size(); ++r) {
    CHECK(objective[r] <= objective[r - 1] + 1e-9);
  }
}

TEST_CASE("sensor failure: visible drop then recovery") {
  LearningConfig config;
  config.rounds = 60;
  config.failure_round = 10;
  config.failure_ratio = 0.25;
  config.failure_block = 2;
  const LearningResult result = learn_restrictions(config, 6);
  const auto acc = result.history.column("test_acc");
  const double pre = (acc[7] + acc[8] + acc[9]) / 3.0;
  double trough = 1.0;
  for (std::size_t r = 10; r < 20; ++r) trough = std::min(trough, acc[r]);
  CHECK(trough < pre - 0.01);        // the failure is visible
  CHECK(acc.back() >= pre - 0.05);   // and recovered to within 5 points
}

TEST_CASE("divergent learning rates abort with diagnostics") {
  LearningConfig config;
  config.lr_theta = 1e80;  // forces overflow within a few sweeps
  CHECK_THROWS(learn_restrictions(config, 7));
}
