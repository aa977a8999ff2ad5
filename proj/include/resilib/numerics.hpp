#pragma once

namespace resilib::num {

double std_normal_pdf(double x);
double std_normal_cdf(double x);
/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; full double accuracy away from p in {0,1}).
double std_normal_quantile(double p);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double x, double y, double rho);

/// Regularized lower incomplete gamma P(a, x).
double reg_gamma_p(double a, double x);
double chi_square_cdf(double x, double dof);
double chi_square_quantile(double p, double dof);

/// Regularized incomplete beta I_x(a, b).
double reg_beta(double x, double a, double b);

double student_t_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);
/// P(X <= x, Y <= y) for a bivariate Student t with correlation rho,
/// evaluated by integrating the conditional t_{nu+1} distribution.
double bivariate_student_t_cdf(double x, double y, double rho, double nu);

/// Binary entropy in bits; 0 at p in {0, 1}.
double binary_entropy(double p);

}  // namespace resilib::num
