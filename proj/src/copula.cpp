#include "resilib/copula.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "resilib/numerics.hpp"
#include "resilib/rng.hpp"

namespace resilib::copula {

namespace {

constexpr double kFrankZero = 1e-8;  // |theta| below this is independence

void check_unit(double u, double v) {
  if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) {
    throw std::invalid_argument("copula: arguments outside the unit square");
  }
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Independence: return "independence";
    case Family::Comonotone: return "comonotone";
    case Family::Countermonotone: return "countermonotone";
    case Family::Gaussian: return "gaussian";
    case Family::StudentT: return "student_t";
    case Family::Clayton: return "clayton";
    case Family::Gumbel: return "gumbel";
    case Family::Frank: return "frank";
  }
  throw std::logic_error("family_name: unreachable");
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::Independence, Family::Comonotone, Family::Countermonotone,
                   Family::Gaussian, Family::StudentT, Family::Clayton, Family::Gumbel,
                   Family::Frank}) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument("family_from_name: unknown family " + name);
}

BivariateCopula::BivariateCopula(Family f, double parameter, double nu)
    : family_(f), parameter_(parameter), nu_(nu) {}

BivariateCopula BivariateCopula::independence() { return {Family::Independence, 0.0, 0.0}; }
BivariateCopula BivariateCopula::comonotone() { return {Family::Comonotone, 0.0, 0.0}; }
BivariateCopula BivariateCopula::countermonotone() { return {Family::Countermonotone, 0.0, 0.0}; }

BivariateCopula BivariateCopula::gaussian(double rho) {
  if (rho <= -1.0 || rho >= 1.0) throw std::invalid_argument("gaussian copula: rho in (-1,1)");
  return {Family::Gaussian, rho, 0.0};
}

BivariateCopula BivariateCopula::student_t(double rho, double nu) {
  if (rho <= -1.0 || rho >= 1.0) throw std::invalid_argument("t copula: rho in (-1,1)");
  if (nu <= 2.0) throw std::invalid_argument("t copula: nu > 2 required");
  return {Family::StudentT, rho, nu};
}

BivariateCopula BivariateCopula::clayton(double theta) {
  if (theta <= 0.0) throw std::invalid_argument("clayton copula: theta > 0 required");
  return {Family::Clayton, theta, 0.0};
}

BivariateCopula BivariateCopula::gumbel(double theta) {
  if (theta < 1.0) throw std::invalid_argument("gumbel copula: theta >= 1 required");
  return {Family::Gumbel, theta, 0.0};
}

BivariateCopula BivariateCopula::frank(double theta) {
  if (theta == 0.0) throw std::invalid_argument("frank copula: theta must be nonzero");
  return {Family::Frank, theta, 0.0};
}

double BivariateCopula::cdf(double u, double v) const {
  check_unit(u, v);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  switch (family_) {
    case Family::Independence:
      return u * v;
    case Family::Comonotone:
      return std::min(u, v);
    case Family::Countermonotone:
      return std::max(u + v - 1.0, 0.0);
    case Family::Gaussian:
      return clamp01(num::bivariate_normal_cdf(num::std_normal_quantile(u),
                                               num::std_normal_quantile(v), parameter_));
    case Family::StudentT:
      return clamp01(num::bivariate_student_t_cdf(num::student_t_quantile(u, nu_),
                                                  num::student_t_quantile(v, nu_), parameter_,
                                                  nu_));
    case Family::Clayton:
      return std::pow(std::pow(u, -parameter_) + std::pow(v, -parameter_) - 1.0,
                      -1.0 / parameter_);
    case Family::Gumbel: {
      const double s = std::pow(-std::log(u), parameter_) + std::pow(-std::log(v), parameter_);
      return std::exp(-std::pow(s, 1.0 / parameter_));
    }
    case Family::Frank: {
      if (std::abs(parameter_) < kFrankZero) return u * v;
      const double gu = std::expm1(-parameter_ * u);
      const double gv = std::expm1(-parameter_ * v);
      const double g1 = std::expm1(-parameter_);
      return -std::log1p(gu * gv / g1) / parameter_;
    }
  }
  throw std::logic_error("copula cdf: unreachable");
}

double BivariateCopula::pdf(double u, double v) const {
  check_unit(u, v);
  if (u == 0.0 || u == 1.0 || v == 0.0 || v == 1.0) {
    throw std::invalid_argument("copula pdf: boundary point");
  }
  switch (family_) {
    case Family::Independence:
      return 1.0;
    case Family::Comonotone:
    case Family::Countermonotone:
      throw std::invalid_argument("copula pdf: Frechet bounds have no density");
    case Family::Gaussian: {
      const double x = num::std_normal_quantile(u);
      const double y = num::std_normal_quantile(v);
      const double r = parameter_;
      const double det = 1.0 - r * r;
      return std::exp(-(r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * det)) /
             std::sqrt(det);
    }
    case Family::StudentT: {
      const double x = num::student_t_quantile(u, nu_);
      const double y = num::student_t_quantile(v, nu_);
      const double r = parameter_;
      const double det = 1.0 - r * r;
      const double quad = (x * x - 2.0 * r * x * y + y * y) / (nu_ * det);
      const double lognum = std::lgamma((nu_ + 2.0) / 2.0) + std::lgamma(nu_ / 2.0) -
                            2.0 * std::lgamma((nu_ + 1.0) / 2.0) - 0.5 * std::log(det) -
                            (nu_ + 2.0) / 2.0 * std::log1p(quad);
      const double logden = -(nu_ + 1.0) / 2.0 *
                            (std::log1p(x * x / nu_) + std::log1p(y * y / nu_));
      return std::exp(lognum - logden);
    }
    case Family::Clayton: {
      const double t = parameter_;
      const double s = std::pow(u, -t) + std::pow(v, -t) - 1.0;
      return (1.0 + t) * std::pow(u * v, -t - 1.0) * std::pow(s, -(2.0 * t + 1.0) / t);
    }
    case Family::Gumbel: {
      const double t = parameter_;
      const double lu = -std::log(u);
      const double lv = -std::log(v);
      const double s = std::pow(lu, t) + std::pow(lv, t);
      const double c = std::exp(-std::pow(s, 1.0 / t));
      return c / (u * v) * std::pow(lu * lv, t - 1.0) * std::pow(s, 2.0 / t - 2.0) *
             (1.0 + (t - 1.0) * std::pow(s, -1.0 / t));
    }
    case Family::Frank: {
      const double t = parameter_;
      if (std::abs(t) < kFrankZero) return 1.0;
      const double g1 = std::expm1(-t);
      const double num = t * (-g1) * std::exp(-t * (u + v));
      const double den = g1 + std::expm1(-t * u) * std::expm1(-t * v);
      return num / (den * den);
    }
  }
  throw std::logic_error("copula pdf: unreachable");
}

double BivariateCopula::h(double u, double v) const {
  check_unit(u, v);
  if (v == 0.0 || v == 1.0) v = std::clamp(v, 1e-12, 1.0 - 1e-12);
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  switch (family_) {
    case Family::Independence:
      return u;
    case Family::Comonotone:
      return v <= u ? 1.0 : 0.0;
    case Family::Countermonotone:
      return u + v >= 1.0 ? 1.0 : 0.0;
    case Family::Gaussian: {
      const double x = num::std_normal_quantile(u);
      const double y = num::std_normal_quantile(v);
      return num::std_normal_cdf((x - parameter_ * y) / std::sqrt(1.0 - parameter_ * parameter_));
    }
    case Family::StudentT: {
      const double x = num::student_t_quantile(u, nu_);
      const double y = num::student_t_quantile(v, nu_);
      const double scale =
          std::sqrt((nu_ + y * y) * (1.0 - parameter_ * parameter_) / (nu_ + 1.0));
      return num::student_t_cdf((x - parameter_ * y) / scale, nu_ + 1.0);
    }
    case Family::Clayton: {
      const double t = parameter_;
      const double s = std::pow(u, -t) + std::pow(v, -t) - 1.0;
      return std::pow(v, -t - 1.0) * std::pow(s, -(t + 1.0) / t);
    }
    case Family::Gumbel: {
      const double t = parameter_;
      const double lu = -std::log(u);
      const double lv = -std::log(v);
      const double s = std::pow(lu, t) + std::pow(lv, t);
      return std::exp(-std::pow(s, 1.0 / t)) * std::pow(lv, t - 1.0) /
             (v * std::pow(s, 1.0 - 1.0 / t));
    }
    case Family::Frank: {
      const double t = parameter_;
      if (std::abs(t) < kFrankZero) return u;
      const double gu = std::expm1(-t * u);
      const double gv = std::expm1(-t * v);
      const double g1 = std::expm1(-t);
      return std::exp(-t * v) * gu / (g1 + gu * gv);
    }
  }
  throw std::logic_error("copula h: unreachable");
}

double BivariateCopula::h_inverse(double w, double v) const {
  check_unit(w, v);
  if (w == 0.0) return 0.0;
  if (w == 1.0) return 1.0;
  switch (family_) {
    case Family::Independence:
      return w;
    case Family::Comonotone:
      return v;  // mass on the diagonal
    case Family::Countermonotone:
      return 1.0 - v;
    case Family::Gaussian: {
      const double y = num::std_normal_quantile(v);
      const double x = parameter_ * y +
                       std::sqrt(1.0 - parameter_ * parameter_) * num::std_normal_quantile(w);
      return num::std_normal_cdf(x);
    }
    case Family::StudentT: {
      const double y = num::student_t_quantile(v, nu_);
      const double scale =
          std::sqrt((nu_ + y * y) * (1.0 - parameter_ * parameter_) / (nu_ + 1.0));
      const double x = parameter_ * y + scale * num::student_t_quantile(w, nu_ + 1.0);
      return num::student_t_cdf(x, nu_);
    }
    case Family::Clayton:
    case Family::Gumbel:
    case Family::Frank: {
      // h(. | v) is increasing in u; bisection per the numeric tolerance.
      double lo = 1e-14;
      double hi = 1.0 - 1e-14;
      for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2.0;
        if (h(mid, v) < w) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-10) break;
      }
      return (lo + hi) / 2.0;
    }
  }
  throw std::logic_error("copula h_inverse: unreachable");
}

double sample_gamma(double shape, Rng& rng) {
  if (shape <= 0.0) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = std::max(rng.uniform(), 1e-300);
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(std::max(u, 1e-300)) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::pair<double, double> BivariateCopula::sample(Rng& rng) const {
  switch (family_) {
    case Family::Independence:
      return {rng.uniform(), rng.uniform()};
    case Family::Comonotone: {
      const double u = rng.uniform();
      return {u, u};
    }
    case Family::Countermonotone: {
      const double u = rng.uniform();
      return {u, 1.0 - u};
    }
    case Family::Gaussian: {
      const double z1 = rng.normal();
      const double z2 = parameter_ * z1 + std::sqrt(1.0 - parameter_ * parameter_) * rng.normal();
      return {num::std_normal_cdf(z1), num::std_normal_cdf(z2)};
    }
    case Family::StudentT: {
      const double z1 = rng.normal();
      const double z2 = parameter_ * z1 + std::sqrt(1.0 - parameter_ * parameter_) * rng.normal();
      const double s = 2.0 * sample_gamma(nu_ / 2.0, rng);  // chi-square_nu
      const double scale = std::sqrt(nu_ / std::max(s, 1e-300));
      return {num::student_t_cdf(z1 * scale, nu_), num::student_t_cdf(z2 * scale, nu_)};
    }
    case Family::Clayton:
    case Family::Gumbel:
    case Family::Frank: {
      const double u = std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12);
      const double w = std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12);
      return {u, h_inverse(w, u)};
    }
  }
  throw std::logic_error("copula sample: unreachable");
}

std::string BivariateCopula::to_json() const {
  nlohmann::json j;
  j["family"] = family_name(family_);
  switch (family_) {
    case Family::Gaussian:
    case Family::StudentT:
      j["rho"] = parameter_;
      if (family_ == Family::StudentT) j["nu"] = nu_;
      break;
    case Family::Clayton:
    case Family::Gumbel:
    case Family::Frank:
      j["theta"] = parameter_;
      break;
    default:
      break;
  }
  return j.dump();
}

BivariateCopula BivariateCopula::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const Family f = family_from_name(j.at("family").get<std::string>());
  switch (f) {
    case Family::Independence: return independence();
    case Family::Comonotone: return comonotone();
    case Family::Countermonotone: return countermonotone();
    case Family::Gaussian: return gaussian(j.at("rho").get<double>());
    case Family::StudentT: return student_t(j.at("rho").get<double>(), j.at("nu").get<double>());
    case Family::Clayton: return clayton(j.at("theta").get<double>());
    case Family::Gumbel: return gumbel(j.at("theta").get<double>());
    case Family::Frank: return frank(j.at("theta").get<double>());
  }
  throw std::logic_error("from_json: unreachable");
}

double c_volume(const BivariateCopula& c, double a1, double b1, double a2, double b2) {
  if (a1 > b1 || a2 > b2) throw std::invalid_argument("c_volume: box with a > b");
  check_unit(a1, b1);
  check_unit(a2, b2);
  return c.cdf(b1, b2) - c.cdf(a1, b2) - c.cdf(b1, a2) + c.cdf(a1, a2);
}

Eigen::MatrixXd pseudo_observations(const Eigen::MatrixXd& raw) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index d = raw.cols();
  if (n < 2) throw std::invalid_argument("pseudo_observations: need at least 2 rows");
  Eigen::MatrixXd out(n, d);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return raw(a, c) < raw(b, c); });
    // Average ranks over tie runs.
    Eigen::Index i = 0;
    while (i < n) {
      Eigen::Index j = i;
      while (j + 1 < n && raw(idx[static_cast<std::size_t>(j + 1)], c) ==
                              raw(idx[static_cast<std::size_t>(i)], c)) {
        ++j;
      }
      const double avg_rank = static_cast<double>(i + j) / 2.0 + 1.0;
      for (Eigen::Index k = i; k <= j; ++k) {
        out(idx[static_cast<std::size_t>(k)], c) = avg_rank / static_cast<double>(n + 1);
      }
      i = j + 1;
    }
  }
  return out;
}

namespace {

double log_likelihood(const BivariateCopula& c,
                      const std::vector<std::pair<double, double>>& obs) {
  double ll = 0.0;
  for (auto [u, v] : obs) ll += std::log(std::max(c.pdf(u, v), 1e-300));
  return ll;
}

BivariateCopula with_parameter(Family family, double p) {
  switch (family) {
    case Family::Gaussian: return BivariateCopula::gaussian(p);
    case Family::StudentT: return BivariateCopula::student_t(p);
    case Family::Clayton: return BivariateCopula::clayton(p);
    case Family::Gumbel: return BivariateCopula::gumbel(p);
    case Family::Frank:
      return std::abs(p) < kFrankZero ? BivariateCopula::independence()
                                      : BivariateCopula::frank(p);
    default:
      throw std::invalid_argument("fit_copula: family has no free parameter");
  }
}

}  // namespace

FitResult fit_copula(const std::vector<std::pair<double, double>>& pseudo_obs, Family family) {
  if (pseudo_obs.size() < 30) {
    throw std::invalid_argument("fit_copula: need at least 30 observations");
  }
  bool u_varies = false;
  bool v_varies = false;
  for (const auto& [u, v] : pseudo_obs) {
    if (u <= 0.0 || u >= 1.0 || v <= 0.0 || v >= 1.0) {
      throw std::invalid_argument("fit_copula: observations must be interior to (0,1)^2");
    }
    u_varies |= u != pseudo_obs.front().first;
    v_varies |= v != pseudo_obs.front().second;
  }
  if (!u_varies || !v_varies) throw std::invalid_argument("fit_copula: degenerate (tied) data");

  double lo;
  double hi;
  switch (family) {
    case Family::Gaussian:
    case Family::StudentT:
      lo = -0.9995;
      hi = 0.9995;
      break;
    case Family::Clayton:
      lo = 1e-4;
      hi = 28.0;
      break;
    case Family::Gumbel:
      lo = 1.0;
      hi = 28.0;
      break;
    case Family::Frank:
      lo = -35.0;
      hi = 35.0;
      break;
    default:
      throw std::invalid_argument("fit_copula: family has no free parameter");
  }

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = log_likelihood(with_parameter(family, x1), pseudo_obs);
  double f2 = log_likelihood(with_parameter(family, x2), pseudo_obs);
  for (int i = 0; i < 120 && (b - a) > 1e-9 * (hi - lo); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = log_likelihood(with_parameter(family, x2), pseudo_obs);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = log_likelihood(with_parameter(family, x1), pseudo_obs);
    }
  }
  const double estimate = (a + b) / 2.0;
  FitResult result{with_parameter(family, estimate),
                   log_likelihood(with_parameter(family, estimate), pseudo_obs), false};
  result.boundary_hit =
      estimate - lo < 1e-3 * (hi - lo) || hi - estimate < 1e-3 * (hi - lo);
  return result;
}

DVine DVine::make(int dimension, std::vector<std::vector<BivariateCopula>> pcs) {
  if (dimension < 2) throw std::invalid_argument("DVine: dimension >= 2 required");
  if (pcs.size() != static_cast<std::size_t>(dimension - 1)) {
    throw std::invalid_argument("DVine: need dimension-1 tree levels");
  }
  for (int level = 0; level < dimension - 1; ++level) {
    if (pcs[static_cast<std::size_t>(level)].size() !=
        static_cast<std::size_t>(dimension - 1 - level)) {
      throw std::invalid_argument("DVine: level " + std::to_string(level + 1) + " needs " +
                                  std::to_string(dimension - 1 - level) + " pair copulas");
    }
  }
  return DVine{dimension, std::move(pcs)};
}

double dvine_density(const DVine& vine, const Eigen::VectorXd& u) {
  const int d = vine.dimension;
  if (u.size() != d) throw std::invalid_argument("dvine_density: dimension mismatch");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (u[i] <= 0.0 || u[i] >= 1.0) {
      throw std::invalid_argument("dvine_density: point on the boundary of the unit cube");
    }
  }
  double logdens = 0.0;
  // fwd[i] = F(u_i | middle), bwd[i] = F(u_{i+level} | middle) carried level to level.
  std::vector<double> fwd(static_cast<std::size_t>(d));
  std::vector<double> bwd(static_cast<std::size_t>(d));
  {
    const auto& tree = vine.pair_copulas[0];
    std::vector<double> nf(static_cast<std::size_t>(d - 1));
    std::vector<double> nb(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d - 1; ++i) {
      const auto& c = tree[static_cast<std::size_t>(i)];
      logdens += std::log(std::max(c.pdf(u[i], u[i + 1]), 1e-300));
      nf[static_cast<std::size_t>(i)] = c.h(u[i], u[i + 1]);
      nb[static_cast<std::size_t>(i)] = c.h(u[i + 1], u[i]);
    }
    fwd = std::move(nf);
    bwd = std::move(nb);
  }
  for (int level = 2; level < d; ++level) {
    const auto& tree = vine.pair_copulas[static_cast<std::size_t>(level - 1)];
    std::vector<double> nf(static_cast<std::size_t>(d - level));
    std::vector<double> nb(static_cast<std::size_t>(d - level));
    for (int i = 0; i < d - level; ++i) {
      const double arg1 = std::clamp(fwd[static_cast<std::size_t>(i)], 1e-12, 1.0 - 1e-12);
      const double arg2 = std::clamp(bwd[static_cast<std::size_t>(i + 1)], 1e-12, 1.0 - 1e-12);
      const auto& c = tree[static_cast<std::size_t>(i)];
      logdens += std::log(std::max(c.pdf(arg1, arg2), 1e-300));
      nf[static_cast<std::size_t>(i)] = c.h(arg1, arg2);
      nb[static_cast<std::size_t>(i)] = c.h(arg2, arg1);
    }
    fwd = std::move(nf);
    bwd = std::move(nb);
  }
  return std::exp(logdens);
}

DependencyMatrix::DependencyMatrix(Eigen::MatrixXd g) : gamma(std::move(g)) {
  if (gamma.rows() != gamma.cols() || gamma.rows() < 1) {
    throw std::invalid_argument("DependencyMatrix: square matrix required");
  }
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
      if (gamma(i, j) < 0.0 || gamma(i, j) > 1.0) {
        throw std::invalid_argument("DependencyMatrix: entries must lie in [0,1]");
      }
      if (std::abs(gamma(i, j) - gamma(j, i)) > 1e-12) {
        throw std::invalid_argument("DependencyMatrix: matrix must be symmetric");
      }
    }
  }
}

Eigen::MatrixXd repair_correlation(const DependencyMatrix& dep) {
  const Eigen::Index n = dep.size();
  Eigen::MatrixXd a = (dep.gamma + dep.gamma.transpose()) / 2.0;
  a.diagonal().setOnes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("repair_correlation: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-8);
  Eigen::MatrixXd repaired = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd scale = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = scale.asDiagonal() * repaired * scale.asDiagonal();
  // Clean up symmetry after the rescale.
  repaired = (repaired + repaired.transpose()) / 2.0;
  for (Eigen::Index i = 0; i < n; ++i) repaired(i, i) = 1.0;
  return repaired;
}

std::vector<bool> correlated_failures(const DependencyMatrix& dep,
                                      const Eigen::VectorXd& marginals, Rng& rng) {
  const Eigen::Index n = dep.size();
  if (marginals.size() != n) {
    throw std::invalid_argument("correlated_failures: marginal count mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (marginals[i] < 0.0 || marginals[i] > 1.0) {
      throw std::invalid_argument("correlated_failures: marginals must lie in [0,1]");
    }
  }
  const Eigen::MatrixXd corr = repair_correlation(dep);
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  Eigen::MatrixXd chol;
  if (llt.info() == Eigen::Success) {
    chol = llt.matrixL();
  } else {
    Eigen::LLT<Eigen::MatrixXd> jittered(corr + 1e-10 * Eigen::MatrixXd::Identity(n, n));
    if (jittered.info() != Eigen::Success) {
      throw std::runtime_error("correlated_failures: matrix not repairable");
    }
    chol = jittered.matrixL();
  }
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  const Eigen::VectorXd corr_z = chol * z;
  std::vector<bool> failed(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    failed[static_cast<std::size_t>(i)] = num::std_normal_cdf(corr_z[i]) < marginals[i];
  }
  return failed;
}

}  // namespace resilib::copula
