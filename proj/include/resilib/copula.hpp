#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

namespace resilib {
class Rng;
}

namespace resilib::copula {

enum class Family {
  Independence,     // Pi
  Comonotone,       // M, upper Frechet bound
  Countermonotone,  // W, lower Frechet bound
  Gaussian,
  StudentT,
  Clayton,
  Gumbel,
  Frank,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Parametric bivariate copula. Parameter ranges: Gaussian/StudentT rho in
/// (-1,1), StudentT nu > 2, Clayton theta > 0, Gumbel theta >= 1,
/// Frank theta != 0 (|theta| < 1e-8 is treated as independence).
class BivariateCopula {
public:
  static BivariateCopula independence();
  static BivariateCopula comonotone();
  static BivariateCopula countermonotone();
  static BivariateCopula gaussian(double rho);
  static BivariateCopula student_t(double rho, double nu = 4.0);
  static BivariateCopula clayton(double theta);
  static BivariateCopula gumbel(double theta);
  static BivariateCopula frank(double theta);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] double parameter() const { return parameter_; }
  [[nodiscard]] double dof() const { return nu_; }

  /// C(u, v); arguments must lie in [0,1].
  [[nodiscard]] double cdf(double u, double v) const;
  /// Copula density; undefined (throws) for the Frechet bounds.
  [[nodiscard]] double pdf(double u, double v) const;
  /// Conditional CDF h(u | v) = dC/dv.
  [[nodiscard]] double h(double u, double v) const;
  /// Inverse of u -> h(u | v). Closed form for the elliptical families,
  /// bisection to 1e-10 for the Archimedean ones.
  [[nodiscard]] double h_inverse(double w, double v) const;

  [[nodiscard]] std::pair<double, double> sample(Rng& rng) const;

  [[nodiscard]] std::string to_json() const;
  static BivariateCopula from_json(const std::string& text);

private:
  BivariateCopula(Family f, double parameter, double nu);

  Family family_;
  double parameter_;
  double nu_;
};

/// C-volume of [a1,b1]x[a2,b2] by inclusion-exclusion; non-negative for a
/// valid copula.
double c_volume(const BivariateCopula& c, double a1, double b1, double a2, double b2);

/// Rank transform, column-wise average ranks / (n+1).
Eigen::MatrixXd pseudo_observations(const Eigen::MatrixXd& raw);

struct FitResult {
  BivariateCopula copula;
  double log_likelihood = 0.0;
  bool boundary_hit = false;  // estimate pinned at the search-range edge
};

/// 1-d maximum likelihood on pseudo-observations by golden-section search
/// over the family's valid parameter range. Needs >= 30 observations.
FitResult fit_copula(const std::vector<std::pair<double, double>>& pseudo_obs, Family family);

/// D-vine over variables 0..d-1 in chain order: pair_copulas[l][i] couples
/// (i, i+l+1) given the variables between them.
struct DVine {
  int dimension = 0;
  std::vector<std::vector<BivariateCopula>> pair_copulas;

  static DVine make(int dimension, std::vector<std::vector<BivariateCopula>> pcs);
};

/// Vine copula density at an interior point of the unit cube.
double dvine_density(const DVine& vine, const Eigen::VectorXd& u);

/// Symmetric dependency matrix with entries in [0,1].
struct DependencyMatrix {
  Eigen::MatrixXd gamma;
  explicit DependencyMatrix(Eigen::MatrixXd g);
  [[nodiscard]] Eigen::Index size() const { return gamma.rows(); }
};

/// Projects the dependency matrix onto a valid correlation matrix: unit
/// diagonal, eigenvalues clipped at 1e-8, diagonal rescaled to 1.
Eigen::MatrixXd repair_correlation(const DependencyMatrix& dep);

/// Gaussian-copula correlated failure draw: agent i fails iff the correlated
/// uniform falls below its marginal failure probability.
std::vector<bool> correlated_failures(const DependencyMatrix& dep,
                                      const Eigen::VectorXd& marginals, Rng& rng);

/// Marsaglia-Tsang gamma(shape) draw with unit scale (used for chi-square
/// mixing in Student t sampling).
double sample_gamma(double shape, Rng& rng);

}  // namespace resilib::copula
