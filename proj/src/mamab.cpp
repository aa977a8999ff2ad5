#include "resilib/mamab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "resilib/kripke.hpp"
#include "resilib/rng.hpp"

namespace resilib::kripke {

namespace {

constexpr double kCellWidth = 0.1;
constexpr double kGridHi = 2.5;  // hypothesis grid spans [0, 2.5], covers inflated rewards
constexpr int kRecentWindow = 10;
constexpr int kReexploreSamples = 5;

int cell_of(double value) {
  const int cells = static_cast<int>(std::round(kGridHi / kCellWidth));
  const int c = static_cast<int>(std::floor(value / kCellWidth));
  return std::clamp(c, 0, cells - 1);
}

struct PooledStats {
  std::vector<long> count;
  std::vector<double> mean;

  explicit PooledStats(int arms) : count(static_cast<std::size_t>(arms), 0),
                                   mean(static_cast<std::size_t>(arms), 0.0) {}
  void add(int arm, double reward) {
    auto a = static_cast<std::size_t>(arm);
    ++count[a];
    mean[a] += (reward - mean[a]) / static_cast<double>(count[a]);
  }
  void reset() {
    std::fill(count.begin(), count.end(), 0);
    std::fill(mean.begin(), mean.end(), 0.0);
  }
  [[nodiscard]] int argmax() const {
    int best = 0;
    for (int a = 1; a < static_cast<int>(mean.size()); ++a) {
      if (count[static_cast<std::size_t>(a)] > 0 &&
          (count[static_cast<std::size_t>(best)] == 0 ||
           mean[static_cast<std::size_t>(a)] > mean[static_cast<std::size_t>(best)])) {
        best = a;
      }
    }
    return best;
  }
};

enum class Phase { Explore, Committed, Revising, Sharing, ReExplore };

// Per-agent epistemic layer state.
struct AgentEpistemic {
  std::vector<int> belief;                      // grid cell per arm; -1 unset
  std::vector<std::deque<double>> recent;       // own observations per arm
  int suspicion_rounds = 0;
};

// One-slice Kripke model of the current beliefs about the monitored arm.
// Worlds are the grid cells; each agent's relation is the equivalence whose
// classes are {believed cell} and its complement (everything is possible
// while the belief is unset). The atom marks the revised hypothesis cell.
bool mutual_knows_revised(const std::vector<AgentEpistemic>& agents, int arm, int revised_cell) {
  const int cells = static_cast<int>(std::round(kGridHi / kCellWidth));
  KripkeModel model(cells, static_cast<int>(agents.size()), 1, 1);
  model.set_atom(revised_cell, 0, true);
  for (int n = 0; n < static_cast<int>(agents.size()); ++n) {
    const int b = agents[static_cast<std::size_t>(n)].belief[static_cast<std::size_t>(arm)];
    for (int w = 0; w < cells; ++w) {
      for (int w2 = 0; w2 < cells; ++w2) {
        const bool same_class = (b < 0) || ((w == b) == (w2 == b));
        if (same_class) model.add_access(n, 0, w, w2);
      }
    }
  }
  std::vector<int> everyone(agents.size());
  std::iota(everyone.begin(), everyone.end(), 0);
  return mutual_knowledge(model, revised_cell, 0, everyone, atom(0));
}

}  // namespace

MamabOutcome run_mamab(const BanditEnvironment& env, MamabDesign design, std::uint64_t seed) {
  if (env.lambda < 0.0 || env.lambda > 1.0) {
    throw std::invalid_argument("run_mamab: lambda must lie in [0,1]");
  }
  if (env.agents <= 0 || env.arms <= 0 || env.horizon <= 0 ||
      env.attacked_arms > env.arms || env.explore_end > env.horizon) {
    throw std::invalid_argument("run_mamab: malformed environment");
  }

  Rng root = Rng::seeded("mamab", seed);
  Rng means_rng = root.stream("means");
  Rng rewards = root.stream("rewards");
  Rng policy = root.stream("policy");

  const auto n_arms = static_cast<std::size_t>(env.arms);
  std::vector<double> mu(n_arms);
  for (auto& m : mu) m = means_rng.uniform(env.mean_lo, env.mean_hi);

  // The adversary inflates the attacked_arms lowest true means.
  std::vector<int> order(n_arms);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return mu[static_cast<std::size_t>(a)] < mu[static_cast<std::size_t>(b)]; });
  std::vector<bool> attacked(n_arms, false);
  for (int i = 0; i < env.attacked_arms; ++i) attacked[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

  const bool resilient = design == MamabDesign::Resilient;
  // lambda > 0.5 lowers the evidence bar for revision (faster recovery);
  // lambda < 0.5 raises it (longer-lived beliefs).
  const int violations_required =
      std::max(1, static_cast<int>(std::lround(10.0 - 4.0 * env.lambda)));

  PooledStats stats(env.arms);
  std::vector<AgentEpistemic> epi(static_cast<std::size_t>(env.agents));
  for (auto& e : epi) {
    e.belief.assign(n_arms, -1);
    e.recent.assign(n_arms, {});
  }

  Phase phase = Phase::Explore;
  int committed_arm = -1;
  int monitored_arm = -1;   // the poisoned commit; tracked for t_r/t_d
  int revised_cell = -1;
  int revising_agent = -1;
  MamabOutcome out;
  out.series = ResultSeries({"t", "mean_reward"});

  long first_mutual = -1;
  long mutual_streak = 0;
  bool mutual_broken = false;

  const auto reward_draw = [&](int t, int agent, int arm) {
    Rng r = rewards.stream(static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(env.agents) +
                           static_cast<std::uint64_t>(agent));
    double value = mu[static_cast<std::size_t>(arm)] + env.reward_std * r.normal();
    if (t < env.explore_end && attacked[static_cast<std::size_t>(arm)] &&
        env.adversary_noise > 0.0) {
      value += env.adversary_noise;
    }
    return value;
  };

  for (int t = 0; t < env.horizon; ++t) {
    if (t == env.explore_end && phase == Phase::Explore) {
      committed_arm = stats.argmax();
      monitored_arm = committed_arm;
      if (resilient) {
        for (auto& e : epi) {
          for (int a = 0; a < env.arms; ++a) {
            e.belief[static_cast<std::size_t>(a)] = cell_of(stats.mean[static_cast<std::size_t>(a)]);
          }
        }
      }
      phase = Phase::Committed;
    }

    double reward_sum = 0.0;
    bool contradiction_now = false;
    int contradicting_agent = -1;

    for (int n = 0; n < env.agents; ++n) {
      auto& agent = epi[static_cast<std::size_t>(n)];
      int arm = -1;
      bool forfeits = false;

      if (phase == Phase::Explore) {
        if (t < env.arms) {
          arm = (t + n) % env.arms;
        } else {
          Rng p = policy.stream(static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(env.agents) +
                                static_cast<std::uint64_t>(n));
          arm = p.bernoulli(0.1) ? static_cast<int>(p.uniform_int(static_cast<std::uint64_t>(env.arms)))
                                 : stats.argmax();
        }
      } else if (phase == Phase::Revising && n == revising_agent) {
        forfeits = true;  // revise consumes the round without reward
      } else if (phase == Phase::Sharing && n == revising_agent) {
        forfeits = true;  // share consumes the round without reward
      } else if (phase == Phase::Sharing && agent.suspicion_rounds >= 3) {
        // query: a suspicious agent spends its round asking the reviser and
        // adopts the revised hypothesis one step before the broadcast lands.
        agent.belief[static_cast<std::size_t>(committed_arm)] =
            epi[static_cast<std::size_t>(revising_agent)]
                .belief[static_cast<std::size_t>(committed_arm)];
        agent.suspicion_rounds = 0;
        forfeits = true;
      } else if (phase == Phase::ReExplore) {
        arm = (t + n) % env.arms;
      } else {
        arm = committed_arm;  // hold: beliefs unchanged, keep exploiting
      }

      if (forfeits) continue;

      const double r = reward_draw(t, n, arm);
      reward_sum += r;
      stats.add(arm, r);

      if (resilient) {
        auto& recent = agent.recent[static_cast<std::size_t>(arm)];
        recent.push_back(r);
        if (recent.size() > kRecentWindow) recent.pop_front();

        const int b = agent.belief[static_cast<std::size_t>(arm)];
        if (phase == Phase::Committed && b >= 0 && recent.size() == kRecentWindow) {
          // Interval test with a 2-sigma observation allowance; the raw cell
          // is a hypothesis about the mean, not about single noisy rewards.
          const double lo = b * kCellWidth - 2.0 * env.reward_std;
          const double hi = (b + 1) * kCellWidth + 2.0 * env.reward_std;
          int outside = 0;
          for (double v : recent) {
            if (v < lo || v >= hi) ++outside;
          }
          if (outside >= violations_required && !contradiction_now) {
            contradiction_now = true;
            contradicting_agent = n;
          } else if (outside >= std::max(1, violations_required - 2)) {
            agent.suspicion_rounds = std::min(agent.suspicion_rounds + 1, 100);
          } else {
            agent.suspicion_rounds = 0;
          }
        }
      }
    }

    if (resilient) {
      if (phase == Phase::Committed && contradiction_now) {
        phase = Phase::Revising;
        revising_agent = contradicting_agent;
      } else if (phase == Phase::Revising) {
        // revise: smallest grid interval containing the recent empirical mean.
        auto& agent = epi[static_cast<std::size_t>(revising_agent)];
        const auto& recent = agent.recent[static_cast<std::size_t>(committed_arm)];
        const double m = std::accumulate(recent.begin(), recent.end(), 0.0) /
                         static_cast<double>(recent.size());
        revised_cell = cell_of(m);
        agent.belief[static_cast<std::size_t>(committed_arm)] = revised_cell;
        phase = Phase::Sharing;
      } else if (phase == Phase::Sharing) {
        // share: broadcast the revised hypothesis; peers adopt it and discard
        // statistics poisoned during the attack window.
        for (auto& e : epi) {
          e.belief[static_cast<std::size_t>(committed_arm)] = revised_cell;
          for (auto& q : e.recent) q.clear();
          e.suspicion_rounds = 0;
        }
        stats.reset();
        phase = Phase::ReExplore;
      } else if (phase == Phase::ReExplore) {
        const long done = *std::min_element(stats.count.begin(), stats.count.end());
        if (done >= kReexploreSamples) {
          committed_arm = stats.argmax();
          for (auto& e : epi) {
            e.belief[static_cast<std::size_t>(committed_arm)] =
                cell_of(stats.mean[static_cast<std::size_t>(committed_arm)]);
            for (auto& q : e.recent) q.clear();
          }
          phase = Phase::Committed;
        }
      }

      // Epistemic measurement after the attack window: does everyone mutually
      // know the revised hypothesis of the poisoned arm?
      if (t >= env.explore_end && monitored_arm >= 0 && revised_cell >= 0 && !mutual_broken) {
        if (mutual_knows_revised(epi, monitored_arm, revised_cell)) {
          if (first_mutual < 0) first_mutual = t - env.explore_end;
          ++mutual_streak;
        } else if (first_mutual >= 0) {
          mutual_broken = true;  // durability window ended
        }
      }
    }

    out.series.add_row({static_cast<double>(t),
                        reward_sum / static_cast<double>(env.agents)});
  }

  out.recovery_steps = first_mutual;
  out.durability_steps = mutual_streak;
  out.recovery_within_limit = first_mutual >= 0 && first_mutual <= env.recovery_max;
  out.durability_within_limit = mutual_streak >= env.durability_min;
  return out;
}

}  // namespace resilib::kripke
