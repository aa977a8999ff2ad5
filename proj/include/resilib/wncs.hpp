#pragma once

#include <cstdint>
#include <vector>

#include "resilib/series.hpp"
#include "resilib/stl.hpp"

namespace resilib {
class Rng;
}

namespace resilib::wncs {

/// Scalar noisy plant x <- A x + B u + eps, eps ~ N(0, sigma^2).
struct Plant {
  double a = 1.1;
  double b = -0.25;
  double sigma = 0.02;  // the stressor parameter
  double state = 0.0;
};

double step_plant(Plant& plant, double control, Rng& rng);

/// Age-of-information recursion eta' = (1 - scheduled)(1 + eta).
long update_aoi(long eta, bool scheduled);

/// Accumulated estimation-error budget sum_{i<eta} A^{2i} * sigma.
double error_budget(long eta, double a, double sigma);

struct ControllerConfig {
  double target = 0.0;        // x'
  double delta = 1.0;         // stability corridor |x - x'| <= delta
  double error_cap = 1.0;     // s in the estimation-error constraint
  double control_weight = 1.0;   // Q
  double transmit_power = 1.0;   // p
  int horizon = 20;              // K
  double alpha = 20.0;           // recovery window (steps)
  double beta = 10.0;            // durability window (steps)
  double epsilon = 0.01;         // chance-constraint level
  double event_trigger = 0.5;    // transmit next step when |x - x'| > trigger * delta
  double significance = 0.05;    // chi-square level
  int residual_window = 30;
  double sigma_floor = 1e-4;
};

struct Schedule {
  long period = 1;       // transmit every `period` steps
  bool degraded = false; // no feasible period: transmit every step
  double energy = 0.0;   // objective value (1/K) sum(p zeta + Q u^2) estimate
};

/// Energy-minimizing schedule search over periodic schedules with period in
/// {1..K}: picks the sparsest period whose worst-case AoI satisfies both the
/// error budget and the Gaussian-tail chance constraint at level epsilon.
Schedule plan(const ControllerConfig& config, double a, double b, double sigma_belief);

enum class DetectVerdict { Keep, Update };

struct DetectResult {
  DetectVerdict verdict = DetectVerdict::Keep;
  double sigma_hat = 0.0;
  double statistic = 0.0;
};

/// Two-sided chi-square variance test on AoI-normalized residuals against
/// H0: sigma = sigma0; on rejection returns the updated belief
/// sum|e| / sum eta (floored).
DetectResult detect_stressor(const std::vector<double>& residuals,
                             const std::vector<long>& ages, double a, double sigma0,
                             double significance, double sigma_floor);

enum class WncsDesign { Robust, Resilient };

struct WncsConfig {
  Plant plant;
  ControllerConfig controller;
  int horizon = 600;
  int stressor_time = 200;
  double stressor_sigma = 0.15;
};

/// Remote-control loop: the robust design plans once with the initial sigma
/// and never re-plans; the resilient design runs the chi-square detector
/// online and re-plans on updates. Emits
/// (t, abs_err, scheduled, sigma_hat).
ResultSeries run_wncs(const WncsConfig& config, WncsDesign design, std::uint64_t seed);

/// Post-change resilience verdict of a run: evaluates the (alpha, beta) spec
/// with phi = |x - x'| <= delta on the error trajectory from the stressor
/// change onward, via the stl module.
bool satisfies_resilience(const ResultSeries& series, const WncsConfig& config);

}  // namespace resilib::wncs
