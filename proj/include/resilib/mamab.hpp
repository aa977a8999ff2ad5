#pragma once

#include <cstdint>

#include "resilib/series.hpp"

namespace resilib::kripke {

/// Multi-agent multi-armed bandit under an oracle attack: deceptive noise is
/// added to the lowest-mean arms during the exploration window.
struct BanditEnvironment {
  int agents = 5;
  int arms = 20;
  double reward_std = 0.1;
  double mean_lo = 0.1;
  double mean_hi = 0.9;
  double adversary_noise = 1.2;  // 0 disables the attack
  int attacked_arms = 10;        // lowest true means
  int explore_end = 200;         // attack window [0, explore_end)
  int horizon = 1000;
  double lambda = 0.5;           // recoverability/durability trade-off weight
  int recovery_max = 100;        // t_r^max (steps)
  int durability_min = 200;      // t_d^min (steps)
};

enum class MamabDesign { Robust, Resilient };

struct MamabOutcome {
  ResultSeries series;  // (t, mean_reward)
  // Resilient-design epistemic measurements, in steps after the attack window.
  // recovery_steps is -1 when mutual knowledge was never re-established.
  long recovery_steps = -1;
  long durability_steps = 0;
  bool recovery_within_limit = false;
  bool durability_within_limit = false;
};

/// Both designs share the explore-then-commit statistical core and pooled
/// observations; the resilient design layers belief monitoring over interval
/// hypotheses plus the epistemic actions (query, share, explore, revise,
/// hold). Recovery is measured as the number of steps until every agent
/// mutually knows the revised interval hypothesis of the poisoned committed
/// arm, checked with the Kripke machinery.
MamabOutcome run_mamab(const BanditEnvironment& env, MamabDesign design, std::uint64_t seed);

}  // namespace resilib::kripke
