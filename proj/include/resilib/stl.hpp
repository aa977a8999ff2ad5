#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace resilib::stl {

/// Uniformly sampled n-dimensional signal. Stored dimension-by-sample so a
/// sample is one column.
struct Signal {
  Eigen::MatrixXd values;  // dimension x samples
  double dt = 1.0;
  double t0 = 0.0;

  Signal(Eigen::MatrixXd samples, double dt_in = 1.0, double t0_in = 0.0);
  static Signal scalar(const std::vector<double>& samples, double dt = 1.0, double t0 = 0.0);

  [[nodiscard]] Eigen::Index dimension() const { return values.rows(); }
  [[nodiscard]] Eigen::Index sample_count() const { return values.cols(); }
  [[nodiscard]] Eigen::VectorXd sample(Eigen::Index k) const { return values.col(k); }

  /// CSV columns (t, x1..xn).
  void write_csv(const std::string& path) const;
  static Signal read_csv(const std::string& path);
};

/// Time interval [lo, hi]; hi may be +infinity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Immutable STL formula tree over the grammar
///   phi ::= mu | !phi | phi & phi | phi | phi | F_I phi | G_I phi | phi U_I phi.
/// A predicate mu is satisfied when coeffs . x(t) >= threshold.
class Formula {
public:
  enum class Kind { Predicate, Not, And, Or, Eventually, Always, Until };

  struct Node {
    Kind kind;
    Eigen::VectorXd coeffs;
    double threshold = 0.0;
    Interval window;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  [[nodiscard]] const Node& node() const { return *node_; }
  [[nodiscard]] const std::shared_ptr<const Node>& ptr() const { return node_; }

private:
  std::shared_ptr<const Node> node_;
};

Formula predicate(Eigen::VectorXd coeffs, double threshold);
/// Scalar shorthand: x >= threshold on a 1-d signal.
Formula atleast(double threshold);
Formula negation(Formula f);
Formula conjunction(Formula a, Formula b);
Formula disjunction(Formula a, Formula b);
Formula eventually(Interval window, Formula f);
Formula always(Interval window, Formula f);
Formula until(Interval window, Formula left, Formula right);

/// Discrete-time satisfaction of (xi, t) |= phi; t is a sample index.
/// Windows [a,b] map to inclusive index offsets [ceil(a/dt), floor(b/dt)],
/// clipped at the signal end; an empty window makes F false and G true.
/// Until's left operand is required on [t, t') only.
bool eval_bool(const Formula& formula, const Signal& signal, Eigen::Index t);

/// Space robustness. Sign-consistent with eval_bool: rho > 0 implies
/// satisfaction, rho < 0 implies violation. Empty windows yield the
/// largest-magnitude finite sentinels.
double eval_robustness(const Formula& formula, const Signal& signal, Eigen::Index t);

/// Recovery window alpha, durability window beta (time units) around phi.
struct ResilienceSpec {
  double alpha = 0.0;
  double beta = 0.0;
  Formula inner;
};

struct ResilienceOutcome {
  double recovery_time = 0.0;    // t_r
  double durability_time = 0.0;  // t_d
  std::pair<double, double> margin{0.0, 0.0};  // (alpha - t_r, t_d - beta)
  bool satisfied = false;
};

/// Measures t_r = min{tau : (xi, t+tau) |= phi} (defaulting to the remaining
/// signal length) and t_d = min{tau : (xi, t+t_r+tau) |= !phi}; the outcome is
/// satisfied iff t_r <= alpha and t_d >= beta.
ResilienceOutcome eval_resilience(const ResilienceSpec& spec, const Signal& signal,
                                  Eigen::Index t);

/// The resilience operator !phi U_[0,alpha] G_[0,beta-dt] phi as a formula.
/// The durability window of length beta covers the beta/dt samples at offsets
/// 0..beta/dt-1, so its closed-interval form ends at beta-dt; requires
/// beta >= dt. eval_bool of this formula agrees exactly with eval_resilience
/// whenever the signal extends past the candidate windows.
Formula resilience_formula(const ResilienceSpec& spec, double dt);

}  // namespace resilib::stl
