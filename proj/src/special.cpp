#include "posthoc/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "posthoc/core.hpp"

namespace posthoc {
namespace {

void check_shape(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InputError("beta parameters must be positive (a=" + std::to_string(a) +
                     ", b=" + std::to_string(b) + ")");
  }
}

// Bisection on log x for tiny q where ibeta_inv does not converge.
double beta_quantile_bisect(double q, double a, double b) {
  double lo = std::log(std::numeric_limits<double>::denorm_min());
  double hi = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::fabs(lo); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (boost::math::ibeta(a, b, std::exp(mid)) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(hi);
}

}  // namespace

double beta_cdf(double x, double a, double b) {
  check_shape(a, b);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InputError("beta_cdf: x must lie in [0,1], got " + std::to_string(x));
  }
  return boost::math::ibeta(a, b, x);
}

double beta_pdf(double x, double a, double b) {
  check_shape(a, b);
  if (x < 0.0 || x > 1.0) return 0.0;
  return boost::math::ibeta_derivative(a, b, x);
}

double beta_quantile(double q, double a, double b) {
  check_shape(a, b);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InputError("beta_quantile: q must lie in [0,1], got " + std::to_string(q));
  }
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  try {
    return boost::math::ibeta_inv(a, b, q);
  } catch (const boost::math::evaluation_error&) {
    return beta_quantile_bisect(q, a, b);
  }
}

double gaussian_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double gaussian_tail_inv(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InputError("gaussian_tail_inv: q must lie in (0,1), got " + std::to_string(q));
  }
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * q);
}

}  // namespace posthoc
