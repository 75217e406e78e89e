#include "posthoc/templates.hpp"

#include <algorithm>
#include <string>

#include "posthoc/core.hpp"
#include "posthoc/special.hpp"

namespace posthoc {

Template::Template(Kind kind, std::string name, std::size_t m, std::size_t K,
                   ThresholdFn threshold, InverseFn inverse)
    : kind_(kind),
      name_(std::move(name)),
      m_(m),
      K_(K == 0 ? m : K),
      threshold_(std::move(threshold)),
      inverse_(std::move(inverse)) {
  if (m_ == 0) throw InputError("template needs m >= 1");
  if (K_ > m_) {
    throw InputError("template size K=" + std::to_string(K_) + " exceeds m=" + std::to_string(m_));
  }
}

Template Template::linear(std::size_t m, std::size_t K) {
  return Template(
      Kind::Linear, "linear", m, K,
      [](std::size_t k, double lambda, std::size_t m) {
        return lambda * static_cast<double>(k) / static_cast<double>(m);
      },
      [](std::size_t k, double y, std::size_t m) {
        return std::min(y * static_cast<double>(m) / static_cast<double>(k), 1.0);
      });
}

Template Template::beta(std::size_t m, std::size_t K) {
  return Template(
      Kind::Beta, "beta", m, K,
      [](std::size_t k, double lambda, std::size_t m) {
        return beta_quantile(lambda, static_cast<double>(k), static_cast<double>(m - k + 1));
      },
      [](std::size_t k, double y, std::size_t m) {
        return beta_cdf(y, static_cast<double>(k), static_cast<double>(m - k + 1));
      });
}

Template Template::custom(std::string name, std::size_t m, std::size_t K, ThresholdFn threshold,
                          InverseFn inverse) {
  if (!threshold || !inverse) throw InputError("custom template needs both functions");
  return Template(Kind::Custom, std::move(name), m, K, std::move(threshold), std::move(inverse));
}

void Template::check_k(std::size_t k) const {
  if (k < 1 || k > K_) {
    throw InputError("template curve index k=" + std::to_string(k) + " outside [1," +
                     std::to_string(K_) + "]");
  }
}

double Template::threshold(std::size_t k, double lambda) const {
  check_k(k);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("template parameter lambda must lie in [0,1], got " + std::to_string(lambda));
  }
  return threshold_(k, lambda, m_);
}

double Template::inverse(std::size_t k, double y) const {
  check_k(k);
  if (!(y >= 0.0 && y <= 1.0)) {
    throw InputError("template inverse argument must lie in [0,1], got " + std::to_string(y));
  }
  return std::clamp(inverse_(k, y, m_), 0.0, 1.0);
}

std::vector<double> Template::curve(double lambda, std::size_t count) const {
  if (count > K_) throw InputError("requested more curves than the template holds");
  std::vector<double> out(count);
  for (std::size_t k = 1; k <= count; ++k) out[k - 1] = threshold(k, lambda);
  return out;
}

}  // namespace posthoc
