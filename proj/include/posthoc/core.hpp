#pragma once

// Domain primitives shared by every bound: p-value vectors, index sets,
// two-sample datasets and the per-row statistics computed from them.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace posthoc {

/// Raised when caller-supplied data violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for parameter combinations that cannot be honoured (e.g. alpha too
/// large for the number of permutations).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// m p-values in [0,1]. NaN is rejected.
class PValueVector {
 public:
  explicit PValueVector(std::vector<double> values);
  PValueVector(std::initializer_list<double> values)
      : PValueVector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Strictly increasing set of 0-based hypothesis indices.
///
/// The set does not know m; operations taking a PValueVector check the
/// indices against it and raise InputError when one is out of range.
class IndexSet {
 public:
  IndexSet() = default;
  /// Sorts the indices; duplicates raise InputError.
  explicit IndexSet(std::vector<std::size_t> indices);
  IndexSet(std::initializer_list<std::size_t> indices)
      : IndexSet(std::vector<std::size_t>(indices)) {}

  /// {begin, ..., end-1}
  static IndexSet range(std::size_t begin, std::size_t end);
  static IndexSet all(std::size_t m) { return range(0, m); }

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t i) const;
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  /// Largest index + 1, or 0 for the empty set.
  std::size_t extent() const noexcept { return indices_.empty() ? 0 : indices_.back() + 1; }
  /// Throws InputError if any index is >= m.
  void check_within(std::size_t m) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

std::size_t intersection_size(const IndexSet& a, const IndexSet& b);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);

/// Ground truth of a simulated instance: the true null hypotheses.
struct GroundTruth {
  IndexSet h0;
};

/// Ascending p-values of the hypotheses in S; ties keep every copy.
std::vector<double> sorted_restriction(const PValueVector& p, const IndexSet& s);

/// m x n measurement matrix (rows are hypotheses, columns are samples) with a
/// group label in {1, 2} per column.
class TwoSampleDataset {
 public:
  TwoSampleDataset(std::size_t rows, std::size_t cols, std::vector<double> data,
                   std::vector<int> labels);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * cols_ + col]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const int> labels() const noexcept { return labels_; }

  /// Dataset restricted to the given rows, in index order.
  TwoSampleDataset select_rows(const IndexSet& rows) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<int> labels_;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
};

enum class TwoSampleStatistic {
  /// |mean2 - mean1| / sqrt(1/n1 + 1/n2), i.e. unit variance assumed known.
  KnownVariance,
  /// Welch-studentized mean difference referred to the normal distribution.
  Welch,
};

/// Two-sided Gaussian p-value per row.
PValueVector two_sample_pvalues(const TwoSampleDataset& ds,
                                TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

/// Same statistic with the column labels replaced by `labels`. Permuting the
/// columns with fixed labels is the same as relabelling the original columns,
/// which is how calibration evaluates permuted data without copying it.
std::vector<double> two_sample_pvalues(const TwoSampleDataset& ds, std::span<const int> labels,
                                       TwoSampleStatistic stat);

struct FoldChange {
  /// mean2 / mean1 per row; NaN where undefined.
  std::vector<double> ratio;
  /// log(ratio); NaN where the ratio is undefined or not positive.
  std::vector<double> log_ratio;
  /// Rows whose ratio could not be formed (zero group-1 mean).
  std::vector<std::size_t> undefined;
};

FoldChange fold_change(const TwoSampleDataset& ds);

}  // namespace posthoc
