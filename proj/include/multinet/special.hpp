#pragma once

namespace multinet {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Power series for x < a+1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

/// Standard normal CDF (erfc-based).
double normal_cdf(double x);

/// Chi-square CDF with nu degrees of freedom.
double chi2_cdf(double nu, double x);

/// Phi^{-1}(q), q in (0,1). Bisection on normal_cdf to 1e-9 absolute.
double normal_quantile(double q);

/// Quantile of the chi distribution with k degrees of freedom:
/// the value z with P(chi(k) <= z) = q, equal to sqrt of the chi-square quantile.
/// Bisection on the regularized incomplete gamma to 1e-9 absolute.
double chi_quantile(int k, double q);

/// Chi-square quantile (bisection on chi2_cdf).
double chi2_quantile(double nu, double q);

} // namespace multinet
