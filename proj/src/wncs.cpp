#include "resilib/wncs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "resilib/numerics.hpp"
#include "resilib/rng.hpp"

namespace resilib::wncs {

double step_plant(Plant& plant, double control, Rng& rng) {
  plant.state = plant.a * plant.state + plant.b * control + rng.normal(0.0, plant.sigma);
  return plant.state;
}

long update_aoi(long eta, bool scheduled) {
  if (eta < 0) throw std::invalid_argument("update_aoi: negative age");
  return scheduled ? 0 : 1 + eta;
}

double error_budget(long eta, double a, double sigma) {
  if (eta < 0) throw std::invalid_argument("error_budget: negative age");
  double sum = 0.0;
  double term = 1.0;
  for (long i = 0; i < eta; ++i) {
    sum += term;
    term *= a * a;
  }
  return sum * sigma;
}

Schedule plan(const ControllerConfig& config, double a, double b, double sigma_belief) {
  if (sigma_belief <= 0.0) throw std::invalid_argument("plan: sigma belief must be positive");
  const double z = num::std_normal_quantile(1.0 - config.epsilon / 2.0);
  const auto feasible = [&](long eta) {
    if (error_budget(eta, a, sigma_belief) > config.error_cap) return false;
    // Gaussian tail on the predicted deviation during the durability window.
    double var_sum = 0.0;
    double term = 1.0;
    for (long i = 0; i < eta; ++i) {
      var_sum += term;
      term *= a * a;
    }
    return std::sqrt(var_sum) * sigma_belief * z <= config.delta;
  };
  for (long period = config.horizon; period >= 1; --period) {
    if (!feasible(period - 1)) continue;
    Schedule schedule;
    schedule.period = period;
    schedule.degraded = period == 1;
    const double u_ss = (config.target - a * config.target) / b;
    schedule.energy = config.transmit_power / static_cast<double>(period) +
                      config.control_weight * u_ss * u_ss;
    return schedule;
  }
  // Unreachable: eta = 0 has zero budget; keep a defensive degraded plan.
  return {1, true, config.transmit_power};
}

DetectResult detect_stressor(const std::vector<double>& residuals,
                             const std::vector<long>& ages, double a, double sigma0,
                             double significance, double sigma_floor) {
  if (residuals.size() != ages.size()) {
    throw std::invalid_argument("detect_stressor: residual/age length mismatch");
  }
  if (residuals.size() < 10) {
    throw std::invalid_argument("detect_stressor: need at least 10 residual samples");
  }
  if (sigma0 <= 0.0) throw std::invalid_argument("detect_stressor: sigma0 must be positive");
  double statistic = 0.0;
  double abs_sum = 0.0;
  long age_sum = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (ages[i] < 1) throw std::invalid_argument("detect_stressor: ages must be >= 1");
    double var_sum = 0.0;
    double term = 1.0;
    for (long j = 0; j < ages[i]; ++j) {
      var_sum += term;
      term *= a * a;
    }
    const double normalized = residuals[i] / std::sqrt(var_sum);
    statistic += normalized * normalized / (sigma0 * sigma0);
    abs_sum += std::abs(residuals[i]);
    age_sum += ages[i];
  }
  const double dof = static_cast<double>(residuals.size());
  const double lo = num::chi_square_quantile(significance / 2.0, dof);
  const double hi = num::chi_square_quantile(1.0 - significance / 2.0, dof);
  DetectResult result;
  result.statistic = statistic;
  if (statistic < lo || statistic > hi) {
    result.verdict = DetectVerdict::Update;
    result.sigma_hat = std::max(sigma_floor, abs_sum / static_cast<double>(age_sum));
  } else {
    result.sigma_hat = sigma0;
  }
  return result;
}

ResultSeries run_wncs(const WncsConfig& config, WncsDesign design, std::uint64_t seed) {
  Rng root = Rng::seeded("wncs", seed);
  Rng noise = root.stream("plant_noise");

  Plant plant = config.plant;
  const double initial_sigma = plant.sigma;
  double sigma_hat = initial_sigma;
  Schedule schedule = plan(config.controller, plant.a, plant.b, sigma_hat);

  double estimate = plant.state;
  long aoi = 0;
  long since_tx = schedule.period;  // transmit at t = 0
  bool event_pending = false;
  std::deque<std::pair<double, long>> residuals;  // (|error|, reception age)
  const bool resilient = design == WncsDesign::Resilient;

  ResultSeries series({"t", "abs_err", "scheduled", "sigma_hat"});
  for (int t = 0; t < config.horizon; ++t) {
    if (t == config.stressor_time) plant.sigma = config.stressor_sigma;

    const bool scheduled = since_tx >= schedule.period || (resilient && event_pending);
    event_pending = false;
    if (scheduled) {
      const double err = std::abs(plant.state - estimate);
      const long age = aoi + 1;  // noise steps accumulated since the last reception
      if (t > 0) {
        residuals.emplace_back(err, age);
        if (static_cast<int>(residuals.size()) > config.controller.residual_window) {
          residuals.pop_front();
        }
      }
      estimate = plant.state;
      since_tx = 0;

      if (resilient && static_cast<int>(residuals.size()) >= 10) {
        std::vector<double> errs;
        std::vector<long> ages;
        for (const auto& [e, g] : residuals) {
          errs.push_back(e);
          ages.push_back(g);
        }
        const DetectResult detection =
            detect_stressor(errs, ages, plant.a, sigma_hat, config.controller.significance,
                            config.controller.sigma_floor);
        if (detection.verdict == DetectVerdict::Update) {
          sigma_hat = detection.sigma_hat;
          schedule = plan(config.controller, plant.a, plant.b, sigma_hat);
          residuals.clear();
        }
      }
    }

    // Deadbeat control toward the target on the current estimate.
    const double control = (config.controller.target - plant.a * estimate) / plant.b;
    step_plant(plant, control, noise);
    estimate = plant.a * estimate + plant.b * control;
    aoi = update_aoi(aoi, scheduled);
    ++since_tx;
    // Sensor-side event trigger: a deviating plant state forces the next
    // transmission (resilient design only; the robust plan is pure periodic).
    if (resilient &&
        std::abs(plant.state - config.controller.target) >
            config.controller.event_trigger * config.controller.delta) {
      event_pending = true;
    }

    series.add_row({static_cast<double>(t), std::abs(plant.state - config.controller.target),
                    scheduled ? 1.0 : 0.0, sigma_hat});
  }
  return series;
}

bool satisfies_resilience(const ResultSeries& series, const WncsConfig& config) {
  const std::size_t err_col = series.column_index("abs_err");
  std::vector<double> post_change;
  for (const auto& row : series.rows) {
    if (row[0] >= config.stressor_time) post_change.push_back(row[err_col]);
  }
  if (post_change.size() < 2) throw std::invalid_argument("satisfies_resilience: short series");
  const stl::Signal signal = stl::Signal::scalar(post_change);
  // phi: |x - x'| <= delta, i.e. -err >= -delta.
  Eigen::VectorXd coeffs(1);
  coeffs << -1.0;
  const stl::Formula phi = stl::predicate(coeffs, -config.controller.delta);
  // Recovery and durability are anchored at stability violations: every
  // post-change episode onset must recover within alpha and then hold
  // compliance for at least beta. A trajectory with no violations satisfies
  // vacuously.
  const stl::ResilienceSpec spec{config.controller.alpha, config.controller.beta, phi};
  bool previous_ok = true;
  for (Eigen::Index k = 0; k < signal.sample_count(); ++k) {
    const bool ok = stl::eval_bool(phi, signal, k);
    if (!ok && previous_ok) {
      if (!stl::eval_resilience(spec, signal, k).satisfied) return false;
    }
    previous_ok = ok;
  }
  return true;
}

}  // namespace resilib::wncs
