#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace posthoc {

/// A template is a family of threshold curves k -> t_k(lambda), k = 1..K,
/// indexed by lambda in [0, 1], together with the generalized inverse
/// t_k^{-1}(y) = max{x in [0,1] : t_k(x) <= y}.
///
/// Each t_k must satisfy t_k(0) = 0, be nondecreasing and left-continuous,
/// and stay within [0, 1]. K may be smaller than m, in which case bounds only
/// use the first K curves.
class Template {
 public:
  enum class Kind { Linear, Beta, Custom };

  /// (k, lambda, m) -> t_k(lambda)
  using ThresholdFn = std::function<double(std::size_t, double, std::size_t)>;
  /// (k, y, m) -> t_k^{-1}(y)
  using InverseFn = std::function<double(std::size_t, double, std::size_t)>;

  /// t_k(lambda) = lambda k / m.  K = 0 means K = m.
  static Template linear(std::size_t m, std::size_t K = 0);
  /// t_k(lambda) = lambda-quantile of Beta(k, m - k + 1).  K = 0 means K = m.
  static Template beta(std::size_t m, std::size_t K = 0);
  /// User-registered kind.
  static Template custom(std::string name, std::size_t m, std::size_t K, ThresholdFn threshold,
                         InverseFn inverse);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return K_; }
  std::size_t m() const noexcept { return m_; }

  /// t_k(lambda) for k in [1, K], lambda in [0, 1].
  double threshold(std::size_t k, double lambda) const;
  /// t_k^{-1}(y) for k in [1, K], y in [0, 1]; capped at 1.
  double inverse(std::size_t k, double y) const;

  /// (t_1(lambda), ..., t_count(lambda)) for count <= K.
  std::vector<double> curve(double lambda, std::size_t count) const;
  std::vector<double> curve(double lambda) const { return curve(lambda, K_); }

 private:
  Template(Kind kind, std::string name, std::size_t m, std::size_t K, ThresholdFn threshold,
           InverseFn inverse);
  void check_k(std::size_t k) const;

  Kind kind_;
  std::string name_;
  std::size_t m_;
  std::size_t K_;
  ThresholdFn threshold_;
  InverseFn inverse_;
};

}  // namespace posthoc
