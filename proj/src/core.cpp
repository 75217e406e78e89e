#include "posthoc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "posthoc/special.hpp"

namespace posthoc {

PValueVector::PValueVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("p-value vector must contain at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("p-value at index " + std::to_string(i) + " is outside [0,1]: " +
                       std::to_string(v));
    }
  }
}

IndexSet::IndexSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InputError("index set contains duplicate indices");
  }
}

IndexSet IndexSet::range(std::size_t begin, std::size_t end) {
  IndexSet s;
  if (end > begin) {
    s.indices_.resize(end - begin);
    std::iota(s.indices_.begin(), s.indices_.end(), begin);
  }
  return s;
}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

void IndexSet::check_within(std::size_t m) const {
  if (!indices_.empty() && indices_.back() >= m) {
    throw InputError("index " + std::to_string(indices_.back()) + " out of range for m=" +
                     std::to_string(m));
  }
}

std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

std::vector<double> sorted_restriction(const PValueVector& p, const IndexSet& s) {
  s.check_within(p.size());
  std::vector<double> out;
  out.reserve(s.size());
  for (std::size_t i : s) out.push_back(p[i]);
  std::sort(out.begin(), out.end());
  return out;
}

TwoSampleDataset::TwoSampleDataset(std::size_t rows, std::size_t cols, std::vector<double> data,
                                   std::vector<int> labels)
    : rows_(rows), cols_(cols), data_(std::move(data)), labels_(std::move(labels)) {
  if (rows_ == 0) throw InputError("dataset must have at least one row");
  if (data_.size() != rows_ * cols_) {
    throw InputError("dataset has " + std::to_string(data_.size()) + " cells, expected " +
                     std::to_string(rows_ * cols_));
  }
  if (labels_.size() != cols_) {
    throw InputError("dataset has " + std::to_string(cols_) + " columns but " +
                     std::to_string(labels_.size()) + " labels");
  }
  for (int g : labels_) {
    if (g == 1) {
      ++n1_;
    } else if (g == 2) {
      ++n2_;
    } else {
      throw InputError("group labels must be 1 or 2, got " + std::to_string(g));
    }
  }
  if (n1_ == 0 || n2_ == 0) throw InputError("both groups need at least one sample");
  for (double v : data_) {
    if (!std::isfinite(v)) throw InputError("dataset contains a non-finite measurement");
  }
}

TwoSampleDataset TwoSampleDataset::select_rows(const IndexSet& rows) const {
  rows.check_within(rows_);
  if (rows.empty()) throw InputError("row selection is empty");
  std::vector<double> out;
  out.reserve(rows.size() * cols_);
  for (std::size_t r : rows) {
    auto src = row(r);
    out.insert(out.end(), src.begin(), src.end());
  }
  return TwoSampleDataset(rows.size(), cols_, std::move(out), labels_);
}

std::vector<double> two_sample_pvalues(const TwoSampleDataset& ds, std::span<const int> labels,
                                       TwoSampleStatistic stat) {
  if (labels.size() != ds.cols()) throw InputError("label vector has the wrong length");
  const auto n1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double n2 = static_cast<double>(ds.cols()) - n1;
  if (n1 == 0.0 || n2 == 0.0) throw InputError("both groups need at least one sample");
  const double scale = std::sqrt(1.0 / n1 + 1.0 / n2);

  std::vector<double> p(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto row = ds.row(i);
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      (labels[j] == 1 ? sum1 : sum2) += row[j];
    }
    const double mean1 = sum1 / n1;
    const double mean2 = sum2 / n2;
    const double diff = std::fabs(mean2 - mean1);
    double z;
    if (stat == TwoSampleStatistic::KnownVariance) {
      z = diff / scale;
    } else {
      if (n1 < 2.0 || n2 < 2.0) throw InputError("Welch statistic needs two samples per group");
      double ss1 = 0.0;
      double ss2 = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (labels[j] == 1) {
          ss1 += (row[j] - mean1) * (row[j] - mean1);
        } else {
          ss2 += (row[j] - mean2) * (row[j] - mean2);
        }
      }
      const double se = std::sqrt(ss1 / (n1 - 1.0) / n1 + ss2 / (n2 - 1.0) / n2);
      if (se == 0.0) {
        z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      } else {
        z = diff / se;
      }
    }
    p[i] = std::min(1.0, 2.0 * gaussian_tail(z));
  }
  return p;
}

PValueVector two_sample_pvalues(const TwoSampleDataset& ds, TwoSampleStatistic stat) {
  return PValueVector(two_sample_pvalues(ds, ds.labels(), stat));
}

FoldChange fold_change(const TwoSampleDataset& ds) {
  FoldChange fc;
  fc.ratio.resize(ds.rows());
  fc.log_ratio.resize(ds.rows());
  const auto labels = ds.labels();
  const double n1 = static_cast<double>(ds.n1());
  const double n2 = static_cast<double>(ds.n2());
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    double sum1 = 0.0;
    double sum2 = 0.0;
    const auto row = ds.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) (labels[j] == 1 ? sum1 : sum2) += row[j];
    const double mean1 = sum1 / n1;
    const double mean2 = sum2 / n2;
    if (mean1 == 0.0) {
      fc.ratio[i] = nan;
      fc.log_ratio[i] = nan;
      fc.undefined.push_back(i);
      continue;
    }
    fc.ratio[i] = mean2 / mean1;
    fc.log_ratio[i] = fc.ratio[i] > 0.0 ? std::log(fc.ratio[i]) : nan;
  }
  return fc;
}

}  // namespace posthoc
