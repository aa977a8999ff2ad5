#include "resilib/stl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "resilib/series.hpp"

namespace resilib::stl {

namespace {

constexpr double kTop = std::numeric_limits<double>::max();

std::shared_ptr<const Formula::Node> make_node(Formula::Node node) {
  return std::make_shared<const Formula::Node>(std::move(node));
}

void check_window(const Interval& w) {
  if (w.lo < 0.0 || w.hi < w.lo) throw std::invalid_argument("stl: malformed interval");
}

struct IndexWindow {
  Eigen::Index lo;
  Eigen::Index hi;  // inclusive; empty when lo > hi
  [[nodiscard]] bool empty() const { return lo > hi; }
};

// [a,b] -> inclusive sample offsets [ceil(a/dt), floor(b/dt)], clipped to the
// signal end relative to base index t.
IndexWindow to_indices(const Interval& w, const Signal& signal, Eigen::Index t) {
  const double dt = signal.dt;
  const auto lo = static_cast<Eigen::Index>(std::ceil(w.lo / dt - 1e-9));
  Eigen::Index hi;
  if (std::isinf(w.hi)) {
    hi = signal.sample_count();  // clipped below
  } else {
    hi = static_cast<Eigen::Index>(std::floor(w.hi / dt + 1e-9));
  }
  IndexWindow out{t + lo, std::min(t + hi, signal.sample_count() - 1)};
  return out;
}

double predicate_value(const Formula::Node& node, const Signal& signal, Eigen::Index t) {
  if (node.coeffs.size() != signal.dimension()) {
    throw std::invalid_argument("stl: predicate dimension mismatch with signal");
  }
  return node.coeffs.dot(signal.values.col(t)) - node.threshold;
}

}  // namespace

Signal::Signal(Eigen::MatrixXd samples, double dt_in, double t0_in)
    : values(std::move(samples)), dt(dt_in), t0(t0_in) {
  if (values.cols() == 0 || values.rows() == 0) throw std::invalid_argument("Signal: empty");
  if (dt <= 0.0) throw std::invalid_argument("Signal: dt must be positive");
}

Signal Signal::scalar(const std::vector<double>& samples, double dt, double t0) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = samples[i];
  return Signal(std::move(m), dt, t0);
}

void Signal::write_csv(const std::string& path) const {
  std::vector<std::string> cols{"t"};
  for (Eigen::Index d = 0; d < dimension(); ++d) cols.push_back("x" + std::to_string(d + 1));
  ResultSeries series(cols);
  for (Eigen::Index k = 0; k < sample_count(); ++k) {
    std::vector<double> row{t0 + static_cast<double>(k) * dt};
    for (Eigen::Index d = 0; d < dimension(); ++d) row.push_back(values(d, k));
    series.add_row(std::move(row));
  }
  series.write_csv(path);
}

Signal Signal::read_csv(const std::string& path) {
  const ResultSeries series = ResultSeries::read_csv(path);
  if (series.columns.size() < 2 || series.rows.size() < 1) {
    throw std::runtime_error("Signal::read_csv: need a time column and one value column");
  }
  const auto dim = static_cast<Eigen::Index>(series.columns.size() - 1);
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(series.rows.size()));
  for (std::size_t r = 0; r < series.rows.size(); ++r) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      m(d, static_cast<Eigen::Index>(r)) = series.rows[r][static_cast<std::size_t>(d) + 1];
    }
  }
  const double t0 = series.rows.front()[0];
  const double dt = series.rows.size() > 1 ? series.rows[1][0] - t0 : 1.0;
  return Signal(std::move(m), dt, t0);
}

Formula predicate(Eigen::VectorXd coeffs, double threshold) {
  return Formula(make_node({Formula::Kind::Predicate, std::move(coeffs), threshold, {}, nullptr,
                            nullptr}));
}

Formula atleast(double threshold) { return predicate(Eigen::VectorXd::Ones(1), threshold); }

Formula negation(Formula f) {
  return Formula(make_node({Formula::Kind::Not, {}, 0.0, {}, f.ptr(), nullptr}));
}

Formula conjunction(Formula a, Formula b) {
  return Formula(make_node({Formula::Kind::And, {}, 0.0, {}, a.ptr(), b.ptr()}));
}

Formula disjunction(Formula a, Formula b) {
  return Formula(make_node({Formula::Kind::Or, {}, 0.0, {}, a.ptr(), b.ptr()}));
}

Formula eventually(Interval window, Formula f) {
  check_window(window);
  return Formula(make_node({Formula::Kind::Eventually, {}, 0.0, window, f.ptr(), nullptr}));
}

Formula always(Interval window, Formula f) {
  check_window(window);
  return Formula(make_node({Formula::Kind::Always, {}, 0.0, window, f.ptr(), nullptr}));
}

Formula until(Interval window, Formula left, Formula right) {
  check_window(window);
  return Formula(make_node({Formula::Kind::Until, {}, 0.0, window, left.ptr(), right.ptr()}));
}

namespace {

bool eval_bool_node(const Formula::Node& node, const Signal& signal, Eigen::Index t);

bool until_bool(const Formula::Node& node, const Signal& signal, Eigen::Index t) {
  const IndexWindow w = to_indices(node.window, signal, t);
  if (w.empty()) return false;
  for (Eigen::Index cand = std::max<Eigen::Index>(w.lo, 0); cand <= w.hi; ++cand) {
    if (!eval_bool_node(*node.right, signal, cand)) continue;
    bool held = true;
    for (Eigen::Index s = t; s < cand; ++s) {
      if (!eval_bool_node(*node.left, signal, s)) {
        held = false;
        break;
      }
    }
    if (held) return true;
  }
  return false;
}

bool eval_bool_node(const Formula::Node& node, const Signal& signal, Eigen::Index t) {
  switch (node.kind) {
    case Formula::Kind::Predicate:
      return predicate_value(node, signal, t) >= 0.0;
    case Formula::Kind::Not:
      return !eval_bool_node(*node.left, signal, t);
    case Formula::Kind::And:
      return eval_bool_node(*node.left, signal, t) && eval_bool_node(*node.right, signal, t);
    case Formula::Kind::Or:
      return eval_bool_node(*node.left, signal, t) || eval_bool_node(*node.right, signal, t);
    case Formula::Kind::Eventually: {
      const IndexWindow w = to_indices(node.window, signal, t);
      for (Eigen::Index k = std::max<Eigen::Index>(w.lo, 0); k <= w.hi; ++k) {
        if (eval_bool_node(*node.left, signal, k)) return true;
      }
      return false;
    }
    case Formula::Kind::Always: {
      const IndexWindow w = to_indices(node.window, signal, t);
      for (Eigen::Index k = std::max<Eigen::Index>(w.lo, 0); k <= w.hi; ++k) {
        if (!eval_bool_node(*node.left, signal, k)) return false;
      }
      return true;
    }
    case Formula::Kind::Until:
      return until_bool(node, signal, t);
  }
  throw std::logic_error("stl: unreachable");
}

double eval_rob_node(const Formula::Node& node, const Signal& signal, Eigen::Index t);

double until_rob(const Formula::Node& node, const Signal& signal, Eigen::Index t) {
  const IndexWindow w = to_indices(node.window, signal, t);
  if (w.empty()) return -kTop;
  double best = -kTop;
  double left_min = kTop;  // running min of the left operand over [t, cand)
  Eigen::Index scanned = t;
  for (Eigen::Index cand = std::max<Eigen::Index>(w.lo, 0); cand <= w.hi; ++cand) {
    for (; scanned < cand; ++scanned) {
      left_min = std::min(left_min, eval_rob_node(*node.left, signal, scanned));
    }
    const double rho = std::min(eval_rob_node(*node.right, signal, cand), left_min);
    best = std::max(best, rho);
  }
  return best;
}

double eval_rob_node(const Formula::Node& node, const Signal& signal, Eigen::Index t) {
  switch (node.kind) {
    case Formula::Kind::Predicate:
      return predicate_value(node, signal, t);
    case Formula::Kind::Not:
      return -eval_rob_node(*node.left, signal, t);
    case Formula::Kind::And:
      return std::min(eval_rob_node(*node.left, signal, t),
                      eval_rob_node(*node.right, signal, t));
    case Formula::Kind::Or:
      return std::max(eval_rob_node(*node.left, signal, t),
                      eval_rob_node(*node.right, signal, t));
    case Formula::Kind::Eventually: {
      const IndexWindow w = to_indices(node.window, signal, t);
      double best = -kTop;
      for (Eigen::Index k = std::max<Eigen::Index>(w.lo, 0); k <= w.hi; ++k) {
        best = std::max(best, eval_rob_node(*node.left, signal, k));
      }
      return best;
    }
    case Formula::Kind::Always: {
      const IndexWindow w = to_indices(node.window, signal, t);
      double worst = kTop;
      for (Eigen::Index k = std::max<Eigen::Index>(w.lo, 0); k <= w.hi; ++k) {
        worst = std::min(worst, eval_rob_node(*node.left, signal, k));
      }
      return worst;
    }
    case Formula::Kind::Until:
      return until_rob(node, signal, t);
  }
  throw std::logic_error("stl: unreachable");
}

}  // namespace

bool eval_bool(const Formula& formula, const Signal& signal, Eigen::Index t) {
  if (t < 0 || t >= signal.sample_count()) throw std::out_of_range("eval_bool: t outside signal");
  return eval_bool_node(formula.node(), signal, t);
}

double eval_robustness(const Formula& formula, const Signal& signal, Eigen::Index t) {
  if (t < 0 || t >= signal.sample_count()) {
    throw std::out_of_range("eval_robustness: t outside signal");
  }
  return eval_rob_node(formula.node(), signal, t);
}

ResilienceOutcome eval_resilience(const ResilienceSpec& spec, const Signal& signal,
                                  Eigen::Index t) {
  if (spec.alpha < 0.0 || spec.beta < 0.0) {
    throw std::invalid_argument("eval_resilience: alpha, beta must be non-negative");
  }
  if (t < 0 || t >= signal.sample_count()) {
    throw std::out_of_range("eval_resilience: t outside signal");
  }
  const Eigen::Index n = signal.sample_count();

  Eigen::Index recovery_steps = n - t;
  for (Eigen::Index tau = 0; t + tau < n; ++tau) {
    if (eval_bool(spec.inner, signal, t + tau)) {
      recovery_steps = tau;
      break;
    }
  }

  Eigen::Index durability_steps = 0;
  const Eigen::Index r = t + recovery_steps;
  if (r < n) {
    durability_steps = n - r;
    for (Eigen::Index tau = 0; r + tau < n; ++tau) {
      if (!eval_bool(spec.inner, signal, r + tau)) {
        durability_steps = tau;
        break;
      }
    }
  }

  ResilienceOutcome out;
  out.recovery_time = static_cast<double>(recovery_steps) * signal.dt;
  out.durability_time = static_cast<double>(durability_steps) * signal.dt;
  out.margin = {spec.alpha - out.recovery_time, out.durability_time - spec.beta};
  out.satisfied = out.recovery_time <= spec.alpha && out.durability_time >= spec.beta;
  return out;
}

Formula resilience_formula(const ResilienceSpec& spec, double dt) {
  if (spec.beta < dt) {
    throw std::invalid_argument("resilience_formula: beta must be at least one sample period");
  }
  return until({0.0, spec.alpha}, negation(spec.inner),
               always({0.0, spec.beta - dt}, spec.inner));
}

}  // namespace resilib::stl
