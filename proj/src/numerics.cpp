#include "resilib/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace resilib::num {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights (positive half), n = 6, 12, 20.
constexpr double kGL6X[] = {0.2386191860831969, 0.6612093864662645, 0.9324695142031521};
constexpr double kGL6W[] = {0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
constexpr double kGL12X[] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                             0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr double kGL12W[] = {0.2491470458134028,  0.2334925365383548,  0.2031674267230659,
                             0.1600783285433462,  0.1069393259953184,  0.04717533638651183};
constexpr double kGL20X[] = {0.07652652113349733, 0.2277858511416451, 0.3737060887154195,
                             0.5108670019508271,  0.6360536807265150, 0.7463319064601508,
                             0.8391169718222188,  0.9122344282513259, 0.9639719272779138,
                             0.9931285991850949};
constexpr double kGL20W[] = {0.1527533871307258,  0.1491729864726037,  0.1420961093183820,
                             0.1316886384491766,  0.1181945319615184,  0.1019301198172404,
                             0.08327674157670475, 0.06267204833410907, 0.04060142980038694,
                             0.01761400713915212};

// Genz's BVND: P(X > h, Y > k) for standard bivariate normal, correlation r.
double bvn_upper(double h, double k, double r) {
  const double* gx;
  const double* gw;
  int ng;
  if (std::abs(r) < 0.3) {
    gx = kGL6X, gw = kGL6W, ng = 3;
  } else if (std::abs(r) < 0.75) {
    gx = kGL12X, gw = kGL12W, ng = 6;
  } else {
    gx = kGL20X, gw = kGL20W, ng = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    if (std::abs(r) > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r);
      for (int i = 0; i < ng; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
          bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn = bvn * asr / (4.0 * kPi);
    }
    return bvn + std_normal_cdf(-h) * std_normal_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    }
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(2.0 * kPi) * std_normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double xs = a * (is * gx[i] + 1.0) * a * (is * gx[i] + 1.0);
        const double rs = std::sqrt(1.0 - xs);
        asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          bvn += a * gw[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / (2.0 * kPi);
  }
  if (r > 0.0) return bvn + std_normal_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) bvn += std_normal_cdf(k) - std_normal_cdf(h);
  return bvn;
}

// Lower incomplete gamma by series (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the regularized incomplete beta.
double beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

template <typename F>
double adaptive_simpson(F f, double lo, double hi, double fl, double fm, double fh,
                        double whole, double tol, int depth) {
  const double mid = (lo + hi) / 2.0;
  const double lm = (lo + mid) / 2.0;
  const double rm = (mid + hi) / 2.0;
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (mid - lo) / 6.0 * (fl + 4.0 * flm + fm);
  const double right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fh);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  const double child_tol = std::max(tol / 2.0, 1e-16);
  return adaptive_simpson(f, lo, mid, fl, flm, fm, left, child_tol, depth - 1) +
         adaptive_simpson(f, mid, hi, fm, frm, fh, right, child_tol, depth - 1);
}

template <typename F>
double integrate(F f, double lo, double hi, double tol) {
  const double fl = f(lo);
  const double fm = f((lo + hi) / 2.0);
  const double fh = f(hi);
  const double whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
  return adaptive_simpson(f, lo, hi, fl, fm, fh, whole, tol, 26);
}

}  // namespace

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("std_normal_quantile: p outside [0,1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF.
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double bivariate_normal_cdf(double x, double y, double rho) {
  if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("bivariate_normal_cdf: |rho| > 1");
  if (std::isinf(x) || std::isinf(y)) {
    if (x < 0.0 || y < 0.0) return 0.0;
    if (std::isinf(x) && std::isinf(y)) return 1.0;
    return std::isinf(x) ? std_normal_cdf(y) : std_normal_cdf(x);
  }
  return bvn_upper(-x, -y, rho);
}

double reg_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("reg_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return reg_gamma_p(dof / 2.0, x / 2.0);
}

double chi_square_quantile(double p, double dof) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("chi_square_quantile: p in (0,1) required");
  double lo = 0.0;
  double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    if (chi_square_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2.0;
}

double reg_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log(1.0 - x) + a * std::log(x)) *
                   beta_cf(1.0 - x, b, a) / b;
}

double student_t_pdf(double x, double nu) {
  const double lognorm = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                         0.5 * std::log(nu * kPi);
  return std::exp(lognorm - (nu + 1.0) / 2.0 * std::log1p(x * x / nu));
}

double student_t_cdf(double x, double nu) {
  if (x == 0.0) return 0.5;
  const double ib = reg_beta(nu / (nu + x * x), nu / 2.0, 0.5);
  return x > 0.0 ? 1.0 - ib / 2.0 : ib / 2.0;
}

double student_t_quantile(double p, double nu) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("student_t_quantile: p in (0,1) required");
  if (p == 0.5) return 0.0;
  // Bracketed Newton, seeded from the normal quantile.
  double x = std_normal_quantile(p);
  double lo = -1e300;
  double hi = 1e300;
  for (int i = 0; i < 100; ++i) {
    const double err = student_t_cdf(x, nu) - p;
    if (err > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double step = err / std::max(student_t_pdf(x, nu), 1e-300);
    double next = x - step;
    if (next <= lo || next >= hi) next = (std::max(lo, -1e12) + std::min(hi, 1e12)) / 2.0;
    if (std::abs(next - x) < 1e-14 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

double bivariate_student_t_cdf(double x, double y, double rho, double nu) {
  if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("bivariate_student_t_cdf: |rho| > 1");
  if (rho >= 1.0 - 1e-14) return student_t_cdf(std::min(x, y), nu);
  if (rho <= -1.0 + 1e-14) {
    return std::max(0.0, student_t_cdf(x, nu) - student_t_cdf(-y, nu));
  }
  // On the probability scale, C = int_0^{T(x)} T_{nu+1}((y - rho s_p) w(s_p)) dp
  // with s_p the nu-quantile of p: the integrand is bounded and smooth, which
  // keeps the adaptive rule cheap on the heavy t tails.
  const auto integrand = [&](double p) {
    const double s = student_t_quantile(std::clamp(p, 1e-15, 1.0 - 1e-15), nu);
    const double scale = std::sqrt((nu + 1.0) / ((1.0 - rho * rho) * (nu + s * s)));
    return student_t_cdf((y - rho * s) * scale, nu + 1.0);
  };
  return integrate(integrand, 0.0, student_t_cdf(x, nu), 1e-11);
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace resilib::num
