#include <doctest.h>

#include <cmath>
#include <vector>

#include "resilib/rng.hpp"
#include "resilib/stl.hpp"

using namespace resilib;
using namespace resilib::stl;

namespace {

Signal random_scalar_signal(Rng& rng, int min_len, int max_len) {
  const int len = min_len + static_cast<int>(rng.uniform_int(
                                static_cast<std::uint64_t>(max_len - min_len + 1)));
  std::vector<double> v(static_cast<std::size_t>(len));
  double x = rng.uniform(-2.0, 2.0);
  for (auto& s : v) {
    x += rng.normal(0.0, 0.7);
    s = x;
  }
  return Signal::scalar(v);
}

// Random formula of bounded depth over a 1-d signal; set positive_only to
// restrict to the monotone fragment (no negation, coeffs >= 0).
Formula random_formula(Rng& rng, int depth, bool positive_only) {
  const int pick = depth <= 0 ? 0 : static_cast<int>(rng.uniform_int(positive_only ? 6 : 7));
  const auto window = [&]() -> Interval {
    const double lo = static_cast<double>(rng.uniform_int(3));
    return {lo, lo + static_cast<double>(rng.uniform_int(4))};
  };
  switch (pick) {
    case 0: {
      Eigen::VectorXd c(1);
      c << (positive_only ? rng.uniform(0.0, 2.0) : rng.uniform(-2.0, 2.0));
      return predicate(c, rng.uniform(-2.0, 2.0));
    }
    case 1:
      return conjunction(random_formula(rng, depth - 1, positive_only),
                         random_formula(rng, depth - 1, positive_only));
    case 2:
      return disjunction(random_formula(rng, depth - 1, positive_only),
                         random_formula(rng, depth - 1, positive_only));
    case 3:
      return eventually(window(), random_formula(rng, depth - 1, positive_only));
    case 4:
      return always(window(), random_formula(rng, depth - 1, positive_only));
    case 5:
      return until(window(), random_formula(rng, depth - 1, positive_only),
                   random_formula(rng, depth - 1, positive_only));
    default:
      return negation(random_formula(rng, depth - 1, positive_only));
  }
}

}  // namespace

TEST_CASE("predicate on constant signal") {
  const Signal sig = Signal::scalar({3.0, 3.0, 3.0});
  const Formula phi = atleast(1.0);
  for (Eigen::Index t = 0; t < 3; ++t) {
    CHECK(eval_bool(phi, sig, t));
    CHECK(eval_robustness(phi, sig, t) == doctest::Approx(2.0));
  }
}

TEST_CASE("predicate boundary has zero robustness") {
  const Signal sig = Signal::scalar({1.0});
  CHECK(eval_robustness(atleast(1.0), sig, 0) == doctest::Approx(0.0));
  CHECK(eval_bool(atleast(1.0), sig, 0));
}

TEST_CASE("always over a window, hand enumerated") {
  const Signal sig = Signal::scalar({0.0, 0.0, 2.0, 2.0});
  const Formula phi = always({0.0, 1.0}, atleast(1.0));
  CHECK(eval_bool(phi, sig, 2));
  CHECK_FALSE(eval_bool(phi, sig, 1));
}

TEST_CASE("always robustness is window min") {
  const Signal sig = Signal::scalar({3.0, 2.0, 5.0});
  CHECK(eval_robustness(always({0.0, 2.0}, atleast(1.0)), sig, 0) == doctest::Approx(1.0));
}

TEST_CASE("eventually is top-until") {
  Rng rng = Rng::seeded("stl-eventually-until", 0);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Formula top = predicate(zero, -1.0);
  for (int i = 0; i < 100; ++i) {
    const Signal sig = random_scalar_signal(rng, 4, 20);
    const Interval w{static_cast<double>(rng.uniform_int(3)),
                     static_cast<double>(rng.uniform_int(3) + 2)};
    const Formula inner = atleast(rng.uniform(-1.0, 1.0));
    const auto t = static_cast<Eigen::Index>(rng.uniform_int(
        static_cast<std::uint64_t>(sig.sample_count())));
    CHECK(eval_bool(eventually(w, inner), sig, t) == eval_bool(until(w, top, inner), sig, t));
  }
}

TEST_CASE("dimension mismatch raises") {
  const Signal sig = Signal::scalar({1.0, 2.0});
  Eigen::VectorXd c(2);
  c << 1.0, 1.0;
  CHECK_THROWS(eval_bool(predicate(c, 0.0), sig, 0));
  CHECK_THROWS(eval_robustness(predicate(c, 0.0), sig, 0));
}

TEST_CASE("empty window conventions") {
  const Signal sig = Signal::scalar({5.0, 5.0});
  // Window entirely beyond the signal end.
  CHECK_FALSE(eval_bool(eventually({10.0, 12.0}, atleast(0.0)), sig, 1));
  CHECK(eval_bool(always({10.0, 12.0}, atleast(0.0)), sig, 1));
  CHECK(eval_robustness(eventually({10.0, 12.0}, atleast(0.0)), sig, 1) < -1e300);
  CHECK(eval_robustness(always({10.0, 12.0}, atleast(0.0)), sig, 1) > 1e300);
}

TEST_CASE("sign consistency of robustness and satisfaction") {
  Rng rng = Rng::seeded("stl-sign", 42);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Signal sig = random_scalar_signal(rng, 4, 16);
    const Formula f = random_formula(rng, 4, false);
    const auto t = static_cast<Eigen::Index>(rng.uniform_int(
        static_cast<std::uint64_t>(sig.sample_count())));
    const double rho = eval_robustness(f, sig, t);
    const bool sat = eval_bool(f, sig, t);
    if (rho > 0.0) {
      CHECK(sat);
      ++checked;
    } else if (rho < 0.0) {
      CHECK_FALSE(sat);
      ++checked;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("always is dual to eventually") {
  Rng rng = Rng::seeded("stl-duality", 7);
  for (int i = 0; i < 200; ++i) {
    const Signal sig = random_scalar_signal(rng, 4, 16);
    const Formula inner = random_formula(rng, 2, false);
    const Interval w{static_cast<double>(rng.uniform_int(3)),
                     static_cast<double>(rng.uniform_int(5))};
    if (w.hi < w.lo) continue;
    const auto t = static_cast<Eigen::Index>(rng.uniform_int(
        static_cast<std::uint64_t>(sig.sample_count())));
    const bool g = eval_bool(always(w, inner), sig, t);
    const bool dual = eval_bool(negation(eventually(w, negation(inner))), sig, t);
    CHECK(g == dual);
  }
}

TEST_CASE("robustness monotone in signal shift for positive formulas") {
  Rng rng = Rng::seeded("stl-monotone", 11);
  for (int i = 0; i < 200; ++i) {
    const Signal sig = random_scalar_signal(rng, 4, 16);
    Signal shifted = sig;
    const double delta = rng.uniform(0.1, 2.0);
    shifted.values.array() += delta;
    const Formula f = random_formula(rng, 3, true);
    const auto t = static_cast<Eigen::Index>(rng.uniform_int(
        static_cast<std::uint64_t>(sig.sample_count())));
    CHECK(eval_robustness(f, shifted, t) >= eval_robustness(f, sig, t));
  }
}

TEST_CASE("resilience on an always-satisfying signal") {
  const Signal sig = Signal::scalar({2.0, 2.0, 2.0, 2.0, 2.0});
  const ResilienceSpec spec{1.0, 2.0, atleast(1.0)};
  const ResilienceOutcome out = eval_resilience(spec, sig, 1);
  CHECK(out.recovery_time == doctest::Approx(0.0));
  CHECK(out.durability_time == doctest::Approx(4.0));  // |xi| - t
  CHECK(out.satisfied);
}

TEST_CASE("resilience hand enumeration") {
  const Signal sig = Signal::scalar({0.0, 0.0, 0.0, 2.0, 2.0, 2.0, 0.0, 0.0});
  const ResilienceSpec spec{20.0, 10.0, atleast(1.0)};
  const ResilienceOutcome out = eval_resilience(spec, sig, 0);
  CHECK(out.recovery_time == doctest::Approx(3.0));
  CHECK(out.durability_time == doctest::Approx(3.0));
  CHECK(out.margin.first == doctest::Approx(17.0));
  CHECK(out.margin.second == doctest::Approx(-7.0));
  CHECK_FALSE(out.satisfied);  // durability below beta = 10
}

TEST_CASE("wncs-style acceptance rule: t_r <= 20 and t_d >= 10") {
  // Violation for 5 steps, recovery, compliance for 12 steps, then violation.
  std::vector<double> v(40, 2.0);
  for (int k = 0; k < 5; ++k) v[static_cast<std::size_t>(k)] = 0.0;
  for (std::size_t k = 17; k < 40; ++k) v[k] = 0.0;
  const Signal sig = Signal::scalar(v);
  const ResilienceSpec spec{20.0, 10.0, atleast(1.0)};
  const ResilienceOutcome out = eval_resilience(spec, sig, 0);
  CHECK(out.recovery_time == doctest::Approx(5.0));
  CHECK(out.durability_time == doctest::Approx(12.0));
  CHECK(out.satisfied);
}

TEST_CASE("resilience verdict equals Eq.(8) formula evaluation") {
  Rng rng = Rng::seeded("stl-resv-equiv", 2024);
  for (int i = 0; i < 500; ++i) {
    const double alpha = static_cast<double>(rng.uniform_int(8));
    const double beta = 1.0 + static_cast<double>(rng.uniform_int(6));
    const int min_len = static_cast<int>(alpha + beta) + 1;
    const Signal sig = random_scalar_signal(rng, min_len, min_len + 20);
    const ResilienceSpec spec{alpha, beta, atleast(rng.uniform(-1.0, 1.0))};
    const Formula resv = resilience_formula(spec, sig.dt);
    CHECK(eval_resilience(spec, sig, 0).satisfied == eval_bool(resv, sig, 0));
  }
}

TEST_CASE("signal csv round trip") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, 2.0, 3.0, -1.0, 0.5, 0.25;
  const Signal sig(m, 0.5, 10.0);
  sig.write_csv("test_signal.csv");
  const Signal back = Signal::read_csv("test_signal.csv");
  CHECK(back.values == sig.values);
  CHECK(back.dt == doctest::Approx(0.5));
  CHECK(back.t0 == doctest::Approx(10.0));
  std::remove("test_signal.csv");
}
