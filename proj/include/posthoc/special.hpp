#pragma once

namespace posthoc {

/// Regularized incomplete beta I_x(a, b). Requires a, b > 0 and x in [0, 1].
double beta_cdf(double x, double a, double b);

/// Density of Beta(a, b) at x.
double beta_pdf(double x, double a, double b);

/// x in [0, 1] with beta_cdf(x; a, b) = q.
double beta_quantile(double q, double a, double b);

/// Upper tail of the standard normal, 1 - Phi(z).
double gaussian_tail(double z);

/// z with gaussian_tail(z) = q, for q in (0, 1).
double gaussian_tail_inv(double q);

}  // namespace posthoc
