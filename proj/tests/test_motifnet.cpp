#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "resilib/graph.hpp"
#include "resilib/motifnet.hpp"
#include "resilib/rng.hpp"

using namespace resilib;
using namespace resilib::motifnet;

namespace {

Graph graph_from(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

// Reference edge sets of the six connected 4-node classes, in census order.
const std::vector<std::vector<std::pair<int, int>>> kReference4 = {
    {{0, 1}, {1, 2}, {2, 3}},                          // path
    {{0, 1}, {0, 2}, {0, 3}},                          // star
    {{0, 1}, {0, 3}, {1, 2}, {2, 3}},                  // cycle
    {{0, 1}, {0, 2}, {1, 2}, {2, 3}},                  // tadpole
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}},          // diamond
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},  // complete
};

// Brute-force oracle: classify each 4-subset by explicit subgraph
// isomorphism over all 24 vertex permutations.
std::array<long, 6> oracle_census4(const Graph& g) {
  std::array<long, 6> counts{0, 0, 0, 0, 0, 0};
  const int n = g.node_count();
  std::array<int, 4> perm{0, 1, 2, 3};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        for (int d = c + 1; d < n; ++d) {
          const std::array<int, 4> nodes{a, b, c, d};
          for (std::size_t cls = 0; cls < kReference4.size(); ++cls) {
            bool matched = false;
            std::array<int, 4> p = perm;
            std::sort(p.begin(), p.end());
            do {
              bool ok = true;
              // Exact induced match: edge in the class iff edge in the graph.
              for (int i = 0; i < 4 && ok; ++i) {
                for (int j = i + 1; j < 4 && ok; ++j) {
                  const bool want =
                      std::find(kReference4[cls].begin(), kReference4[cls].end(),
                                std::make_pair(std::min(p[static_cast<std::size_t>(i)],
                                                        p[static_cast<std::size_t>(j)]),
                                               std::max(p[static_cast<std::size_t>(i)],
                                                        p[static_cast<std::size_t>(j)]))) !=
                      kReference4[cls].end();
                  const bool have = g.has_edge(nodes[static_cast<std::size_t>(i)],
                                               nodes[static_cast<std::size_t>(j)]);
                  ok = want == have;
                }
              }
              matched = ok;
            } while (!matched && std::next_permutation(p.begin(), p.end()));
            if (matched) {
              ++counts[cls];
              break;
            }
          }
        }
      }
    }
  }
  return counts;
}

}  // namespace

TEST_CASE("complete graph counts a single complete motif") {
  const Graph k4 = graph_from(4, kReference4[5]);
  CHECK(motif_count(k4, MotifClass::Complete4) == 1);
  CHECK(motif_count(k4, MotifClass::Path4) == 0);
  CHECK(motif_count(k4, MotifClass::Star4) == 0);
  CHECK(motif_count(k4, MotifClass::Cycle4) == 0);
  CHECK(motif_count(k4, MotifClass::Tadpole4) == 0);
  CHECK(motif_count(k4, MotifClass::Diamond4) == 0);
}

TEST_CASE("path graph counts a single path motif") {
  const Graph p4 = graph_from(4, kReference4[0]);
  CHECK(motif_count(p4, MotifClass::Path4) == 1);
  CHECK(motif_count(p4, MotifClass::Star4) == 0);
}

TEST_CASE("five-cycle yields five induced paths and no cycles") {
  const Graph c5 = graph_from(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  CHECK(motif_count(c5, MotifClass::Path4) == 5);
  CHECK(motif_count(c5, MotifClass::Cycle4) == 0);
  CHECK(motif_count(c5, MotifClass::Star4) == 0);
  CHECK(motif_count(c5, MotifClass::Tadpole4) == 0);
  CHECK(motif_count(c5, MotifClass::Triangle) == 0);
  CHECK(motif_count(c5, MotifClass::Path3) == 5);
}

TEST_CASE("motif distribution point masses") {
  CHECK(motif_distribution(graph_from(4, kReference4[5]))[5] == doctest::Approx(1.0));
  CHECK(motif_distribution(graph_from(4, kReference4[1]))[1] == doctest::Approx(1.0));
  CHECK(motif_distribution(graph_from(4, kReference4[4]))[4] == doctest::Approx(1.0));
  CHECK_THROWS(motif_distribution(graph_from(4, {{0, 1}, {2, 3}})));
}

TEST_CASE("census equals the isomorphism oracle exhaustively on 5 nodes") {
  for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
    Graph g(5);
    int bit = 0;
    for (int u = 0; u < 5; ++u) {
      for (int v = u + 1; v < 5; ++v) {
        if (mask >> bit & 1) g.add_edge(u, v);
        ++bit;
      }
    }
    CHECK(motif_census(g).four_node == oracle_census4(g));
  }
}

TEST_CASE("census equals the isomorphism oracle on random graphs") {
  Rng rng = Rng::seeded("motif-oracle", 11);
  for (int i = 0; i < 30; ++i) {
    const Graph g = Graph::erdos_renyi(10, rng.uniform(0.1, 0.7), rng);
    CHECK(motif_census(g).four_node == oracle_census4(g));
  }
}

TEST_CASE("distribution is invariant under relabeling and sums to one") {
  Rng rng = Rng::seeded("motif-relabel", 12);
  for (int i = 0; i < 10; ++i) {
    const Graph g = Graph::connected_erdos_renyi(9, 0.4, rng);
    std::vector<int> perm(9);
    for (int k = 0; k < 9; ++k) perm[static_cast<std::size_t>(k)] = k;
    rng.shuffle(perm);
    Graph relabeled(9);
    for (auto [u, v] : g.edges()) {
      relabeled.add_edge(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
    }
    const Vector6d a = motif_distribution(g);
    const Vector6d  b = motif_distribution(relabeled);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(a.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("significance of a rigid graph is degenerate") {
  const Significance s = motif_significance(graph_from(4, kReference4[5]),
                                            MotifClass::Complete4, 20, 1);
  CHECK(s.degenerate);
}

TEST_CASE("er graph scored against its own ensemble has small z") {
  std::vector<double> zs;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    Rng rng = Rng::seeded("motif-er-z", seed);
    const Graph g = Graph::connected_erdos_renyi(18, 0.25, rng);
    const Significance s = motif_significance(g, MotifClass::Path4, 60, seed);
    if (!s.degenerate) zs.push_back(std::abs(s.z));
  }
  REQUIRE(zs.size() >= 6);
  std::sort(zs.begin(), zs.end());
  CHECK(zs[zs.size() / 2] < 3.0);  // median |Z|
}

TEST_CASE("planted triangles give a positive triangle z-score") {
  Rng rng = Rng::seeded("motif-planted", 3);
  Graph g = Graph::connected_erdos_renyi(24, 0.1, rng);
  // Plant dense triangles among random vertex triples.
  for (int i = 0; i < 12; ++i) {
    const auto pick = rng.sample_without_replacement(24, 3);
    const int a = static_cast<int>(pick[0]);
    const int b = static_cast<int>(pick[1]);
    const int c = static_cast<int>(pick[2]);
    g.add_edge(a, b);
    g.add_edge(b, c);
    g.add_edge(a, c);
  }
  const Significance s = motif_significance(g, MotifClass::Triangle, 200, 4);
  CHECK_FALSE(s.degenerate);
  CHECK(s.z > 0.0);
}

TEST_CASE("kl deviation: zero, closed form, asymmetry") {
  Vector6d p0;
  p0 << 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  Vector6d p1;
  p1 << 0.5, 0.5, 0.0, 0.0, 0.0, 0.0;
  CHECK(kl_deviation(p0, p0) == doctest::Approx(0.0));
  CHECK(kl_deviation(p0, p1) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  Vector6d q0;
  q0 << 0.7, 0.1, 0.05, 0.05, 0.05, 0.05;
  Vector6d q1;
  q1 << 0.1, 0.3, 0.2, 0.2, 0.1, 0.1;
  CHECK(kl_deviation(q0, q1) != doctest::Approx(kl_deviation(q1, q0)));
  CHECK(kl_deviation(q0, q1) >= 0.0);
  Vector6d bad;
  bad << 0.5, 0.5, 0.5, 0.0, 0.0, 0.0;
  CHECK_THROWS(kl_deviation(bad, p0));
}

TEST_CASE("attack basics: identity, hub removal, idempotent composition") {
  const Graph star = graph_from(4, kReference4[1]);
  const ReconfigState s0(star, {}, 0);
  CHECK(apply_attack(s0, 0).effective().edge_count() == 3);
  CHECK(apply_attack(s0, 1).effective().edge_count() == 0);  // hub has max degree

  Rng rng = Rng::seeded("motif-attack", 5);
  const Graph g = Graph::connected_erdos_renyi(10, 0.35, rng);
  const ReconfigState s(g, {}, 0);
  const ReconfigState once = apply_attack(s, 3);
  const ReconfigState twice = apply_attack(apply_attack(s, 3), 0);
  CHECK(once.effective().edges() == twice.effective().edges());
  CHECK(once.attacks == 3);
}

TEST_CASE("ring with chords: hand-checked attack survivors") {
  // 6-ring plus chords (0,2) and (0,4). Node 0 has degree 4 and dies first,
  // leaving the path 1-2-3-4-5. Nodes 2, 3, 4 then tie at degree 2 and the
  // tie goes to the lowest id, so node 2 dies second: edges (3,4) and (4,5)
  // survive.
  Graph g = graph_from(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 2}, {0, 4}});
  const ReconfigState s(g, {}, 0);
  const auto survivors = apply_attack(s, 2).effective().edges();
  const std::vector<std::pair<int, int>> expected{{3, 4}, {4, 5}};
  CHECK(survivors == expected);
}

TEST_CASE("reconfig state validation") {
  const Graph g = graph_from(4, {{0, 1}, {1, 2}});
  CHECK_THROWS(ReconfigState(g, {{0, 1}}, 0));  // pool overlaps base
  CHECK_THROWS(ReconfigState(g, {{2, 2}}, 0));  // self loop
  CHECK_THROWS(ReconfigState(g, {{0, 3}, {0, 3}}, 0));
}

TEST_CASE("empty pool plan reproduces unreconfigured deviations") {
  Rng rng = Rng::seeded("motif-nopool", 6);
  const Graph g = Graph::connected_erdos_renyi(12, 0.4, rng);
  const ReconfigState s(g, {}, 0);
  Eigen::VectorXd p(3);
  p << 0.5, 0.3, 0.2;
  const AttackModel attack(3, p);
  const ReconfigPlan plan = optimize_reconfig(s, attack, p);
  const Vector6d pi0 = motif_distribution(s.effective());
  double expected = 0.0;
  for (int k = 1; k <= 3; ++k) {
    expected += p[k - 1] * kl_deviation(pi0, motif_distribution(apply_attack(s, k).effective()));
  }
  CHECK(plan.expected_kl == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dp plan matches exhaustive sequence enumeration") {
  Rng rng = Rng::seeded("motif-dp", 7);
  const Graph g = Graph::connected_erdos_renyi(8, 0.5, rng);
  std::vector<std::pair<int, int>> pool;
  for (int u = 0; u < 8 && pool.size() < 3; ++u) {
    for (int v = u + 1; v < 8 && pool.size() < 3; ++v) {
      if (!g.has_edge(u, v)) pool.emplace_back(u, v);
    }
  }
  REQUIRE(pool.size() == 3);
  const ReconfigState s(g, pool, 0);
  Eigen::VectorXd p(2);
  p << 0.4, 0.6;
  const AttackModel attack(2, p);
  const ReconfigPlan plan = optimize_reconfig(s, attack, p);

  // Brute force over all persistent mask pairs m1 subset of m2.
  const Vector6d pi0 = motif_distribution(s.effective());
  const ReconfigState a1 = apply_attack(s, 1);
  const ReconfigState a2 = apply_attack(s, 2);
  double best = 1e18;
  for (std::size_t m1 = 0; m1 < 8; ++m1) {
    for (std::size_t m2 = 0; m2 < 8; ++m2) {
      if ((m1 & m2) != m1) continue;
      const auto with_mask = [&](const ReconfigState& st, std::size_t m) {
        ReconfigState probe = st;
        for (std::size_t b = 0; b < 3; ++b) probe.active[b] = (m >> b & 1) != 0;
        return kl_deviation(pi0, motif_distribution(probe.effective()));
      };
      best = std::min(best, p[0] * with_mask(a1, m1) + p[1] * with_mask(a2, m2));
    }
  }
  CHECK(plan.expected_kl == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("plans respect persistence and the min-degree constraint") {
  Rng rng = Rng::seeded("motif-constraints", 8);
  const Graph g = Graph::connected_erdos_renyi(14, 0.45, rng);
  std::vector<std::pair<int, int>> pool;
  for (int u = 0; u < 14 && pool.size() < 5; ++u) {
    for (int v = u + 1; v < 14 && pool.size() < 5; ++v) {
      if (!g.has_edge(u, v)) pool.emplace_back(u, v);
    }
  }
  const ReconfigState s(g, pool, 3);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.25);
  const ReconfigPlan plan = optimize_reconfig(s, AttackModel(4, p), p);
  REQUIRE(plan.configs.size() == 4);
  ReconfigState state = s;
  for (std::size_t k = 0; k < 4; ++k) {
    state = apply_attack(state, 1);
    for (std::size_t b = 0; b < pool.size(); ++b) {
      if (k > 0) {
        // Persistence: bits never deactivate.
        CHECK((!plan.configs[k - 1][b] || plan.configs[k][b]));
      }
    }
    if (plan.feasible[k]) {
      ReconfigState probe = state;
      probe.active = plan.configs[k];
      CHECK(probe.min_degree_satisfied());
    }
  }
}

TEST_CASE("motif use case: resilient beats robust after the strategy change") {
  MotifUseCaseConfig config;  // paper constants
  double robust_tail = 0.0;
  double resilient_tail = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ResultSeries series = run_motif_usecase(config, seed);
    robust_tail += series.mean_over("kl_robust", 250, config.horizon);
    resilient_tail += series.mean_over("kl_resilient", 250, config.horizon);
  }
  CHECK(resilient_tail < robust_tail);
}

TEST_CASE("motif use case without strategy change keeps designs identical") {
  MotifUseCaseConfig config;
  config.horizon = 120;
  config.strategy_change = 1000;  // never
  const ResultSeries series = run_motif_usecase(config, 5);
  for (const auto& row : series.rows) {
    CHECK(row[2] == row[3]);  // same plan, same draws
  }
}

TEST_CASE("empirical attack frequency estimate") {
  // Observed counts {1:3, 2:1} -> (0.75, 0.25, 0, ...): covered by the
  // normalized-histogram rule the use case applies; checked directly here.
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(4);
  counts[0] = 3;
  counts[1] = 1;
  const Eigen::VectorXd p_hat = counts / counts.sum();
  CHECK(p_hat[0] == doctest::Approx(0.75));
  CHECK(p_hat[1] == doctest::Approx(0.25));
  CHECK(p_hat[2] == 0.0);
}
