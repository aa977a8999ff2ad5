#include "resilib/motifnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "resilib/rng.hpp"

namespace resilib::motifnet {

namespace {

// Row-bitset adjacency for fast induced-subgraph classification.
struct BitAdjacency {
  int n;
  int words;
  std::vector<std::uint64_t> bits;

  explicit BitAdjacency(const Graph& g)
      : n(g.node_count()), words((g.node_count() + 63) / 64),
        bits(static_cast<std::size_t>(n) * static_cast<std::size_t>(words), 0) {
    for (auto [u, v] : g.edges()) set(u, v);
  }

  void set(int u, int v) {
    bits[static_cast<std::size_t>(u) * static_cast<std::size_t>(words) +
         static_cast<std::size_t>(v / 64)] |= 1ULL << (v % 64);
    bits[static_cast<std::size_t>(v) * static_cast<std::size_t>(words) +
         static_cast<std::size_t>(u / 64)] |= 1ULL << (u % 64);
  }
  [[nodiscard]] bool test(int u, int v) const {
    return bits[static_cast<std::size_t>(u) * static_cast<std::size_t>(words) +
                static_cast<std::size_t>(v / 64)] >>
               (v % 64) &
           1ULL;
  }
};

// Classifies the induced subgraph on {a,b,c,d} (sorted not required):
// returns the four_node index or -1 when disconnected.
int classify4(const BitAdjacency& adj, int a, int b, int c, int d) {
  const bool ab = adj.test(a, b);
  const bool ac = adj.test(a, c);
  const bool ad = adj.test(a, d);
  const bool bc = adj.test(b, c);
  const bool bd = adj.test(b, d);
  const bool cd = adj.test(c, d);
  const int e = ab + ac + ad + bc + bd + cd;
  if (e < 3) return -1;
  if (e == 6) return 5;  // complete
  if (e == 5) return 4;  // diamond
  const int da = ab + ac + ad;
  const int db = ab + bc + bd;
  const int dc = ac + bc + cd;
  const int dd = ad + bd + cd;
  const int dmin = std::min({da, db, dc, dd});
  const int dmax = std::max({da, db, dc, dd});
  if (e == 3) {
    if (dmin == 0) return -1;  // triangle plus isolated vertex
    return dmax == 3 ? 1 : 0;  // star vs path
  }
  // e == 4: cycle {2,2,2,2} or tadpole {1,2,2,3}
  return dmin == 2 ? 2 : 3;
}

MotifCensus census_from_adjacency(const BitAdjacency& adj) {
  MotifCensus census;
  const int n = adj.n;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const bool ab = adj.test(a, b);
      for (int c = b + 1; c < n; ++c) {
        const int e3 = ab + adj.test(a, c) + adj.test(b, c);
        if (e3 == 2) ++census.three_node[0];
        if (e3 == 3) ++census.three_node[1];
        for (int d = c + 1; d < n; ++d) {
          const int cls = classify4(adj, a, b, c, d);
          if (cls >= 0) ++census.four_node[static_cast<std::size_t>(cls)];
        }
      }
    }
  }
  return census;
}

std::size_t class_index(MotifClass m) {
  switch (m) {
    case MotifClass::Path4: return 0;
    case MotifClass::Star4: return 1;
    case MotifClass::Cycle4: return 2;
    case MotifClass::Tadpole4: return 3;
    case MotifClass::Diamond4: return 4;
    case MotifClass::Complete4: return 5;
    default:
      throw std::invalid_argument("class_index: not a 4-node class");
  }
}

// Degree-preserving randomization by double-edge swaps.
Graph rewire(const Graph& g, Rng& rng) {
  Graph out = g;
  auto edges = out.edges();
  if (edges.size() < 2) return out;
  const long attempts = 100 * static_cast<long>(edges.size());
  for (long i = 0; i < attempts; ++i) {
    const auto e1 = static_cast<std::size_t>(rng.uniform_int(edges.size()));
    const auto e2 = static_cast<std::size_t>(rng.uniform_int(edges.size()));
    if (e1 == e2) continue;
    auto [a, b] = edges[e1];
    auto [c, d] = edges[e2];
    if (rng.bernoulli(0.5)) std::swap(c, d);
    // (a,b),(c,d) -> (a,d),(c,b)
    if (a == d || c == b || a == c || b == d) continue;
    if (out.has_edge(a, d) || out.has_edge(c, b)) continue;
    out.remove_edge(a, b);
    out.remove_edge(c, d);
    out.add_edge(a, d);
    out.add_edge(c, b);
    edges[e1] = {std::min(a, d), std::max(a, d)};
    edges[e2] = {std::min(c, b), std::max(c, b)};
  }
  return out;
}

}  // namespace

long MotifCensus::total4() const {
  return std::accumulate(four_node.begin(), four_node.end(), 0L);
}

MotifCensus motif_census(const Graph& g) { return census_from_adjacency(BitAdjacency(g)); }

long motif_count(const Graph& g, MotifClass m) {
  const MotifCensus census = motif_census(g);
  switch (m) {
    case MotifClass::Path3: return census.three_node[0];
    case MotifClass::Triangle: return census.three_node[1];
    default: return census.four_node[class_index(m)];
  }
}

Vector6d motif_distribution(const Graph& g) {
  const MotifCensus census = motif_census(g);
  const long total = census.total4();
  if (total == 0) {
    throw std::invalid_argument("motif_distribution: graph has no connected 4-node subgraph");
  }
  Vector6d pi;
  for (int i = 0; i < 6; ++i) {
    pi[i] = static_cast<double>(census.four_node[static_cast<std::size_t>(i)]) /
            static_cast<double>(total);
  }
  return pi;
}

Significance motif_significance(const Graph& g, MotifClass m, int ensemble_size,
                                std::uint64_t seed) {
  if (ensemble_size < 2) throw std::invalid_argument("motif_significance: ensemble_size >= 2");
  Rng rng = Rng::seeded("motif-significance", seed);
  const double observed = static_cast<double>(motif_count(g, m));
  std::vector<double> counts(static_cast<std::size_t>(ensemble_size));
  for (auto& c : counts) {
    Rng sample_rng = rng.stream(static_cast<std::uint64_t>(&c - counts.data()));
    c = static_cast<double>(motif_count(rewire(g, sample_rng), m));
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) /
                      static_cast<double>(ensemble_size);
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= static_cast<double>(ensemble_size);
  const double sd = std::sqrt(var);
  if (sd == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    return {observed > mean ? inf : (observed < mean ? -inf : 0.0), true};
  }
  return {(observed - mean) / sd, false};
}

double kl_deviation(const Vector6d& p0, const Vector6d& p1) {
  const auto valid = [](const Vector6d& p) {
    return p.minCoeff() >= 0.0 && std::abs(p.sum() - 1.0) < 1e-9;
  };
  if (!valid(p0) || !valid(p1)) throw std::invalid_argument("kl_deviation: not a distribution");
  Vector6d q0 = (p0.array() + 1e-9).matrix();
  Vector6d q1 = (p1.array() + 1e-9).matrix();
  q0 /= q0.sum();
  q1 /= q1.sum();
  return (q0.array() * (q0.array() / q1.array()).log()).sum();
}

AttackModel::AttackModel(int k, Eigen::VectorXd p) : max_targets(k), probabilities(std::move(p)) {
  if (max_targets < 1 || probabilities.size() != max_targets) {
    throw std::invalid_argument("AttackModel: need one probability per target count 1..K");
  }
  if (probabilities.minCoeff() < 0.0 || std::abs(probabilities.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("AttackModel: probabilities must sum to 1");
  }
}

ReconfigState::ReconfigState(Graph base_graph, std::vector<std::pair<int, int>> pool_edges,
                             int alpha)
    : base(std::move(base_graph)), pool(std::move(pool_edges)),
      active(pool.size(), false), min_degree(alpha),
      removed(static_cast<std::size_t>(base.node_count()), false) {
  for (auto& [u, v] : pool) {
    if (u == v) throw std::invalid_argument("ReconfigState: pool self-loop");
    if (u > v) std::swap(u, v);
    if (base.has_edge(u, v)) {
      throw std::invalid_argument("ReconfigState: pool must be disjoint from base edges");
    }
  }
  std::set<std::pair<int, int>> seen(pool.begin(), pool.end());
  if (seen.size() != pool.size()) throw std::invalid_argument("ReconfigState: duplicate pool edge");
}

Graph ReconfigState::effective() const {
  Graph g = base;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (active[i]) g.add_edge(pool[i].first, pool[i].second);
  }
  for (int v = 0; v < g.node_count(); ++v) {
    if (removed[static_cast<std::size_t>(v)]) g.isolate(v);
  }
  return g;
}

int ReconfigState::effective_degree(int node) const {
  if (removed[static_cast<std::size_t>(node)]) return 0;
  int deg = 0;
  for (int u : base.neighbors(node)) {
    if (!removed[static_cast<std::size_t>(u)]) ++deg;
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!active[i]) continue;
    const auto [u, v] = pool[i];
    if (u == node && !removed[static_cast<std::size_t>(v)]) ++deg;
    if (v == node && !removed[static_cast<std::size_t>(u)]) ++deg;
  }
  return deg;
}

int ReconfigState::top_survivor() const {
  int best = -1;
  int best_deg = -1;
  for (int v = 0; v < base.node_count(); ++v) {
    if (removed[static_cast<std::size_t>(v)]) continue;
    const int d = effective_degree(v);
    if (d > best_deg) {
      best_deg = d;
      best = v;
    }
  }
  return best;
}

bool ReconfigState::min_degree_satisfied() const {
  const int top = top_survivor();
  return top >= 0 && effective_degree(top) >= min_degree;
}

ReconfigState apply_attack(const ReconfigState& state, int k) {
  if (k < 0) throw std::out_of_range("apply_attack: k must be non-negative");
  ReconfigState out = state;
  for (int step = 0; step < k; ++step) {
    const int target = out.top_survivor();
    if (target < 0) throw std::out_of_range("apply_attack: no surviving node to attack");
    out.removed[static_cast<std::size_t>(target)] = true;
    ++out.attacks;
  }
  return out;
}

namespace {

// Census split into a pool-independent remainder plus the 4-subsets touching
// at least one full pool pair, which are re-classified per configuration.
struct DeltaCensus {
  std::array<long, 6> rest{0, 0, 0, 0, 0, 0};
  std::vector<std::array<int, 4>> touched;
  BitAdjacency base_adj;

  DeltaCensus(const ReconfigState& state)
      : base_adj(BitAdjacency(Graph(state.base.node_count()))) {
    Graph stripped = state.base;
    for (int v = 0; v < stripped.node_count(); ++v) {
      if (state.removed[static_cast<std::size_t>(v)]) stripped.isolate(v);
    }
    base_adj = BitAdjacency(stripped);
    const int n = stripped.node_count();

    std::set<std::array<int, 4>> subsets;
    for (std::size_t e = 0; e < state.pool.size(); ++e) {
      const auto [u, v] = state.pool[e];
      if (state.removed[static_cast<std::size_t>(u)] ||
          state.removed[static_cast<std::size_t>(v)]) {
        continue;
      }
      for (int a = 0; a < n; ++a) {
        if (a == u || a == v || state.removed[static_cast<std::size_t>(a)]) continue;
        for (int b = a + 1; b < n; ++b) {
          if (b == u || b == v || state.removed[static_cast<std::size_t>(b)]) continue;
          std::array<int, 4> key{u, v, a, b};
          std::sort(key.begin(), key.end());
          subsets.insert(key);
        }
      }
    }
    touched.assign(subsets.begin(), subsets.end());

    const MotifCensus full = census_from_adjacency(base_adj);
    rest = full.four_node;
    for (const auto& s : touched) {
      const int cls = classify4(base_adj, s[0], s[1], s[2], s[3]);
      if (cls >= 0) --rest[static_cast<std::size_t>(cls)];
    }
  }

  [[nodiscard]] std::array<long, 6> counts(const ReconfigState& state,
                                           const std::vector<bool>& bits) const {
    BitAdjacency adj = base_adj;
    for (std::size_t i = 0; i < state.pool.size(); ++i) {
      const auto [u, v] = state.pool[i];
      if (bits[i] && !state.removed[static_cast<std::size_t>(u)] &&
          !state.removed[static_cast<std::size_t>(v)]) {
        adj.set(u, v);
      }
    }
    std::array<long, 6> out = rest;
    for (const auto& s : touched) {
      const int cls = classify4(adj, s[0], s[1], s[2], s[3]);
      if (cls >= 0) ++out[static_cast<std::size_t>(cls)];
    }
    return out;
  }
};

Vector6d to_distribution(const std::array<long, 6>& counts) {
  const long total = std::accumulate(counts.begin(), counts.end(), 0L);
  if (total == 0) {
    throw std::invalid_argument("motif distribution: no connected 4-node subgraph");
  }
  Vector6d pi;
  for (int i = 0; i < 6; ++i) {
    pi[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(total);
  }
  return pi;
}

}  // namespace

namespace {

std::vector<bool> mask_to_bits(std::size_t mask, std::size_t pool_size) {
  std::vector<bool> bits(pool_size, false);
  for (std::size_t b = 0; b < pool_size; ++b) {
    if (mask >> b & 1) bits[b] = true;
  }
  return bits;
}

constexpr double kInfeasiblePenalty = 1e6;  // dominates any KL value

}  // namespace

ReconfigPlan optimize_reconfig(const ReconfigState& initial, const AttackModel& attack,
                               const Eigen::VectorXd& p_hat) {
  if (p_hat.size() != attack.max_targets) {
    throw std::invalid_argument("optimize_reconfig: p_hat size must match the attack model");
  }
  if (p_hat.minCoeff() < 0.0 || std::abs(p_hat.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("optimize_reconfig: p_hat must be a distribution");
  }
  if (attack.max_targets >= initial.base.node_count()) {
    throw std::invalid_argument("optimize_reconfig: K must be smaller than the node count");
  }
  const Vector6d pi0 = motif_distribution(initial.effective());
  const int K = attack.max_targets;
  const std::size_t pool_size = initial.pool.size();

  // The attacker's target order is planned against the initial configuration;
  // defensive activations during an episode do not redirect it.
  std::vector<ReconfigState> attacked;
  attacked.reserve(static_cast<std::size_t>(K));
  {
    ReconfigState state = initial;
    for (int k = 1; k <= K; ++k) {
      state = apply_attack(state, 1);
      attacked.push_back(state);
    }
  }

  // Stage cost of holding activation mask m after k attacks, plus a large
  // penalty when the min-degree constraint cannot hold under that mask.
  const auto stage_costs = [&](const ReconfigState& state) {
    const DeltaCensus delta(state);
    const std::size_t combos = std::size_t{1} << pool_size;
    std::vector<double> kl(combos);
    std::vector<char> feasible(combos);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      const std::vector<bool> bits = mask_to_bits(mask, pool_size);
      ReconfigState probe = state;
      probe.active = bits;
      feasible[mask] = probe.min_degree_satisfied() ? 1 : 0;
      try {
        kl[mask] = kl_deviation(pi0, to_distribution(delta.counts(state, bits)));
      } catch (const std::invalid_argument&) {
        kl[mask] = 50.0;  // every 4-subset destroyed; beyond any smoothed KL
      }
    }
    return std::make_pair(std::move(kl), std::move(feasible));
  };

  ReconfigPlan plan;
  if (pool_size <= 12) {
    // Exact DP over activation masks: V_k(m) = min over supersets m' of m of
    // p_k * cost_k(m') + V_{k+1}(m'), exploiting bit persistence.
    const std::size_t combos = std::size_t{1} << pool_size;
    std::vector<std::vector<double>> kl_table(static_cast<std::size_t>(K));
    std::vector<std::vector<char>> feas_table(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      auto [kl, feas] = stage_costs(attacked[static_cast<std::size_t>(k)]);
      kl_table[static_cast<std::size_t>(k)] = std::move(kl);
      feas_table[static_cast<std::size_t>(k)] = std::move(feas);
    }
    const auto stage_cost = [&](int k, std::size_t mask) {
      return p_hat[k] * kl_table[static_cast<std::size_t>(k)][mask] +
             (feas_table[static_cast<std::size_t>(k)][mask] ? 0.0 : kInfeasiblePenalty);
    };

    std::vector<std::vector<double>> value(static_cast<std::size_t>(K) + 1,
                                           std::vector<double>(combos, 0.0));
    for (int k = K - 1; k >= 0; --k) {
      auto& v = value[static_cast<std::size_t>(k)];
      const auto& next = value[static_cast<std::size_t>(k) + 1];
      // Decreasing-popcount sweep: a mask may also jump to any single-bit
      // superset within the same stage.
      std::vector<std::size_t> order(combos);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [](std::size_t a, std::size_t b) {
        const int pa = std::popcount(a);
        const int pb = std::popcount(b);
        return pa != pb ? pa > pb : a < b;
      });
      for (std::size_t mask : order) {
        double best = stage_cost(k, mask) + next[mask];
        for (std::size_t b = 0; b < pool_size; ++b) {
          if (!(mask >> b & 1)) best = std::min(best, v[mask | (std::size_t{1} << b)]);
        }
        v[mask] = best;
      }
    }

    // Forward extraction, ties to the smallest mask.
    std::size_t mask = 0;
    for (std::size_t b = 0; b < pool_size; ++b) {
      if (initial.active[b]) mask |= std::size_t{1} << b;
    }
    for (int k = 0; k < K; ++k) {
      std::size_t best_mask = mask;
      double best = stage_cost(k, mask) + value[static_cast<std::size_t>(k) + 1][mask];
      const std::size_t free = ~mask & (combos - 1);
      for (std::size_t sub = free;; sub = (sub - 1) & free) {
        const std::size_t candidate = mask | sub;
        const double cost =
            stage_cost(k, candidate) + value[static_cast<std::size_t>(k) + 1][candidate];
        if (cost < best - 1e-15 || (std::abs(cost - best) <= 1e-15 && candidate < best_mask)) {
          best = cost;
          best_mask = candidate;
        }
        if (sub == 0) break;
      }
      mask = best_mask;
      plan.configs.push_back(mask_to_bits(mask, pool_size));
      plan.feasible.push_back(feas_table[static_cast<std::size_t>(k)][mask] != 0);
      plan.kl_per_k.push_back(kl_table[static_cast<std::size_t>(k)][mask]);
    }
  } else {
    // Greedy fallback: per stage, flip the single bit that most improves the
    // weighted stage cost until no flip helps.
    std::vector<bool> bits = initial.active;
    for (int k = 0; k < K; ++k) {
      const ReconfigState& state = attacked[static_cast<std::size_t>(k)];
      const DeltaCensus delta(state);
      const auto evaluate = [&](const std::vector<bool>& b) {
        ReconfigState probe = state;
        probe.active = b;
        double kl = 50.0;
        try {
          kl = kl_deviation(pi0, to_distribution(delta.counts(state, b)));
        } catch (const std::invalid_argument&) {
        }
        return std::make_pair(kl, probe.min_degree_satisfied());
      };
      auto [best_kl, best_ok] = evaluate(bits);
      for (;;) {
        bool improved = false;
        for (std::size_t b = 0; b < pool_size; ++b) {
          if (bits[b]) continue;
          std::vector<bool> trial = bits;
          trial[b] = true;
          const auto [kl, ok] = evaluate(trial);
          if ((ok && !best_ok) || (ok == best_ok && kl < best_kl)) {
            bits = trial;
            best_kl = kl;
            best_ok = ok;
            improved = true;
          }
        }
        if (!improved) break;
      }
      plan.configs.push_back(bits);
      plan.feasible.push_back(best_ok);
      plan.kl_per_k.push_back(best_kl);
    }
  }

  plan.expected_kl = 0.0;
  for (int k = 0; k < K; ++k) {
    plan.expected_kl += p_hat[k] * plan.kl_per_k[static_cast<std::size_t>(k)];
  }
  return plan;
}

ResultSeries run_motif_usecase(const MotifUseCaseConfig& config, std::uint64_t seed) {
  Rng root = Rng::seeded("motif-usecase", seed);
  Rng graph_rng = root.stream("graph");
  Rng attack_rng = root.stream("attacks");

  // Base topology: connected ER sample plus a disjoint random pool.
  Graph base = Graph::connected_erdos_renyi(config.nodes, config.edge_prob, graph_rng);
  std::vector<std::pair<int, int>> pool;
  while (static_cast<int>(pool.size()) < config.pool_size) {
    const int u = static_cast<int>(graph_rng.uniform_int(static_cast<std::uint64_t>(config.nodes)));
    const int v = static_cast<int>(graph_rng.uniform_int(static_cast<std::uint64_t>(config.nodes)));
    if (u == v) continue;
    const auto edge = std::make_pair(std::min(u, v), std::max(u, v));
    if (base.has_edge(edge.first, edge.second)) continue;
    if (std::find(pool.begin(), pool.end(), edge) != pool.end()) continue;
    pool.push_back(edge);
  }
  const ReconfigState initial(base, pool, config.min_degree);

  const int K = config.max_targets;
  // Initial strategy prefers small raids; the changed strategy goes for
  // near-maximal ones.
  Eigen::VectorXd p_initial(K);
  Eigen::VectorXd p_changed(K);
  for (int k = 0; k < K; ++k) {
    p_initial[k] = std::exp(-static_cast<double>(k) / 2.0);
    p_changed[k] = std::exp(-static_cast<double>(K - 1 - k) / 2.0);
  }
  p_initial /= p_initial.sum();
  p_changed /= p_changed.sum();
  const AttackModel model_initial(K, p_initial);

  const ReconfigPlan robust_plan = optimize_reconfig(initial, model_initial, p_initial);
  ReconfigPlan resilient_plan = robust_plan;

  ResultSeries series({"t", "k_drawn", "kl_robust", "kl_resilient"});
  std::vector<double> trailing;
  std::vector<int> observed_k;
  bool reoptimized = false;
  int windows_above = 0;
  // Reference level for the drop detector: the plan's own expected loss.
  const double reference = std::max(robust_plan.expected_kl, 1e-12);

  for (int t = 0; t < config.horizon; ++t) {
    const Eigen::VectorXd& p_true = t < config.strategy_change ? p_initial : p_changed;
    double draw = attack_rng.uniform();
    int k = K;
    for (int i = 0; i < K; ++i) {
      draw -= p_true[i];
      if (draw <= 0.0) {
        k = i + 1;
        break;
      }
    }

    const double kl_robust = robust_plan.kl_per_k[static_cast<std::size_t>(k - 1)];
    const double kl_resilient = resilient_plan.kl_per_k[static_cast<std::size_t>(k - 1)];
    series.add_row({static_cast<double>(t), static_cast<double>(k), kl_robust, kl_resilient});

    if (!reoptimized) {
      observed_k.push_back(k);
      trailing.push_back(kl_resilient);
      if (static_cast<int>(trailing.size()) > config.detect_window) {
        trailing.erase(trailing.begin());
      }
      if (static_cast<int>(trailing.size()) == config.detect_window) {
        const double mean = std::accumulate(trailing.begin(), trailing.end(), 0.0) /
                            static_cast<double>(trailing.size());
        // A sustained jump of the trailing mean (a second full window above
        // the threshold) marks the stressor change.
        windows_above = mean > config.detect_factor * reference ? windows_above + 1 : 0;
        if (windows_above >= config.detect_window) {
          // Re-estimate the attack distribution from the recent raids and
          // re-optimize the reconfiguration plan.
          Eigen::VectorXd p_hat = Eigen::VectorXd::Zero(K);
          const auto window = static_cast<std::size_t>(config.detect_window);
          for (std::size_t i = observed_k.size() - window; i < observed_k.size(); ++i) {
            p_hat[observed_k[i] - 1] += 1.0;
          }
          p_hat /= p_hat.sum();
          resilient_plan = optimize_reconfig(initial, model_initial, p_hat);
          reoptimized = true;
        }
      }
    }
  }
  return series;
}

}  // namespace resilib::motifnet
