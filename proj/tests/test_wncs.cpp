#include <doctest.h>

#include <cmath>

#include "resilib/rng.hpp"
#include "resilib/wncs.hpp"

using namespace resilib;
using namespace resilib::wncs;

TEST_CASE("plant dynamics with paper coefficients") {
  Rng rng = Rng::seeded("wncs-plant", 1);
  Plant noiseless{1.1, -0.25, 1e-300, 1.0};
  CHECK(step_plant(noiseless, 0.0, rng) == doctest::Approx(1.1));

  // Deadbeat control reaches the target in one step when noise vanishes.
  Plant plant{1.1, -0.25, 1e-300, 1.0};
  const double target = 0.7;
  const double u = (target - plant.a * plant.state) / plant.b;
  CHECK(step_plant(plant, u, rng) == doctest::Approx(target));
}

TEST_CASE("plant noise variance matches sigma squared") {
  Rng rng = Rng::seeded("wncs-variance", 2);
  Plant plant{0.0, 1.0, 0.02, 0.0};  // a=0 isolates the noise term
  double sum = 0.0;
  double sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = step_plant(plant, 0.0, rng);
    sum += x;
    sumsq += x * x;
  }
  const double var = sumsq / n - (sum / n) * (sum / n);
  CHECK(std::abs(var - 0.0004) / 0.0004 < 0.03);
}

TEST_CASE("aoi recursion") {
  CHECK(update_aoi(5, true) == 0);
  CHECK(update_aoi(0, false) == 1);
  CHECK(update_aoi(3, false) == 4);
  // Two consecutive unscheduled steps add two.
  CHECK(update_aoi(update_aoi(7, false), false) == 9);
  CHECK_THROWS(update_aoi(-1, true));
}

TEST_CASE("error budget closed forms") {
  CHECK(error_budget(0, 1.1, 0.02) == doctest::Approx(0.0));
  CHECK(error_budget(1, 1.1, 0.02) == doctest::Approx(0.02));
  CHECK(error_budget(3, 1.1, 0.02) == doctest::Approx(0.073482));
  // Strictly increasing in eta for |A| >= 1.
  for (long eta = 1; eta < 12; ++eta) {
    CHECK(error_budget(eta, 1.1, 0.02) > error_budget(eta - 1, 1.1, 0.02));
  }
}

TEST_CASE("plan picks the sparsest feasible period") {
  ControllerConfig config;  // paper constants: s=1, delta=1, Q=1, K=20
  const Schedule tight = plan(config, 1.1, -0.25, 0.02);
  // Exhaustive oracle over all periods: largest eta with both constraints.
  long expected = 1;
  const double z = 2.5758293035489004;  // Phi^{-1}(0.995)
  for (long period = 1; period <= config.horizon; ++period) {
    const long eta = period - 1;
    double var_sum = 0.0;
    double term = 1.0;
    for (long i = 0; i < eta; ++i) {
      var_sum += term;
      term *= 1.21;
    }
    if (var_sum * 0.02 <= config.error_cap && std::sqrt(var_sum) * 0.02 * z <= config.delta) {
      expected = period;
    }
  }
  CHECK(tight.period == expected);
  CHECK(tight.period > 1);
  CHECK_FALSE(tight.degraded);

  // Sigma so small the budget never binds: maximal period.
  CHECK(plan(config, 1.1, -0.25, 1e-12).period == config.horizon);
  // Sigma so large eta = 1 already violates: transmit every step, degraded.
  const Schedule degraded = plan(config, 1.1, -0.25, 5.0);
  CHECK(degraded.period == 1);
  CHECK(degraded.degraded);
}

TEST_CASE("chi-square detector calibration") {
  Rng rng = Rng::seeded("wncs-calibration", 3);
  const double sigma0 = 0.02;
  int rejections = 0;
  const int trials = 4000;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> residuals(30);
    std::vector<long> ages(30, 1);
    for (auto& e : residuals) e = rng.normal(0.0, sigma0);
    const DetectResult r = detect_stressor(residuals, ages, 1.1, sigma0, 0.05, 1e-4);
    if (r.verdict == DetectVerdict::Update) ++rejections;
  }
  const double rate = rejections / static_cast<double>(trials);
  CHECK(std::abs(rate - 0.05) < 0.015);
}

TEST_CASE("zero residuals reject with floored update") {
  std::vector<double> residuals(20, 0.0);
  std::vector<long> ages(20, 1);
  const DetectResult r = detect_stressor(residuals, ages, 1.1, 0.02, 0.05, 1e-4);
  CHECK(r.verdict == DetectVerdict::Update);
  CHECK(r.sigma_hat == doctest::Approx(1e-4));
  CHECK_THROWS(detect_stressor({0.0}, {1}, 1.1, 0.02, 0.05, 1e-4));
}

TEST_CASE("detector power at the paper's sigma jump") {
  Rng rng = Rng::seeded("wncs-power", 4);
  int detected = 0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    // 10 pre-change residuals at sigma=0.02 plus 20 post-change at 0.15.
    std::vector<double> residuals;
    std::vector<long> ages;
    for (int i = 0; i < 10; ++i) {
      residuals.push_back(rng.normal(0.0, 0.02));
      ages.push_back(1);
    }
    for (int i = 0; i < 20; ++i) {
      residuals.push_back(rng.normal(0.0, 0.15));
      ages.push_back(1);
    }
    if (detect_stressor(residuals, ages, 1.1, 0.02, 0.05, 1e-4).verdict ==
        DetectVerdict::Update) {
      ++detected;
    }
  }
  CHECK(detected >= static_cast<int>(0.95 * trials));
}

TEST_CASE("detector normalizes multi-step ages") {
  Rng rng = Rng::seeded("wncs-ages", 5);
  const double a = 1.1;
  const double sigma0 = 0.02;
  int rejections = 0;
  const int trials = 1500;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> residuals;
    std::vector<long> ages;
    for (int i = 0; i < 25; ++i) {
      const long age = 1 + static_cast<long>(rng.uniform_int(5));
      double accumulated = 0.0;
      double gain = 1.0;
      for (long j = 0; j < age; ++j) {
        accumulated += gain * rng.normal(0.0, sigma0);
        gain *= a;
      }
      residuals.push_back(accumulated);
      ages.push_back(age);
    }
    if (detect_stressor(residuals, ages, a, sigma0, 0.05, 1e-4).verdict ==
        DetectVerdict::Update) {
      ++rejections;
    }
  }
  // Correct normalization keeps the false-positive rate near the level.
  CHECK(rejections / static_cast<double>(trials) < 0.10);
}

TEST_CASE("wncs use case: resilient recovers, robust degrades") {
  WncsConfig config;  // paper constants incl. sigma 0.02 -> 0.15 at t=200
  int robust_violations = 0;
  int resilient_violations = 0;
  const int seeds = 12;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const ResultSeries robust = run_wncs(config, WncsDesign::Robust, seed);
    const ResultSeries resilient = run_wncs(config, WncsDesign::Resilient, seed);
    if (!satisfies_resilience(robust, config)) ++robust_violations;
    if (!satisfies_resilience(resilient, config)) ++resilient_violations;
    // Energy sandwich: resilient transmission rate strictly between the
    // never-transmit and always-transmit bounds.
    const auto scheduled = resilient.column("scheduled");
    double rate = 0.0;
    for (double s : scheduled) rate += s;
    rate /= static_cast<double>(scheduled.size());
    CHECK(rate > 0.0);
    CHECK(rate < 1.0);
  }
  CHECK(robust_violations > seeds / 2);
  CHECK(resilient_violations <= 1);
}

TEST_CASE("without a stressor change the designs behave alike") {
  WncsConfig config;
  config.stressor_sigma = config.plant.sigma;  // no change
  config.horizon = 300;
  double robust_mean = 0.0;
  double resilient_mean = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    robust_mean += run_wncs(config, WncsDesign::Robust, seed).mean_over("abs_err", 0, 299);
    resilient_mean +=
        run_wncs(config, WncsDesign::Resilient, seed).mean_over("abs_err", 0, 299);
  }
  // Identical in distribution: means agree within a loose statistical band.
  CHECK(std::abs(robust_mean - resilient_mean) / 6.0 < 0.02);
}
