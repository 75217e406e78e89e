#pragma once

// Loading of p-value files, two-sample expression matrices, sample labels
// and per-hypothesis annotations from CSV.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posthoc/core.hpp"

namespace posthoc::app {

/// A parsed CSV table. Cells are trimmed; lines are 1-based file lines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  /// Column position of `name`, or throws InputError naming the file.
  std::size_t column(const std::string& name, const std::string& source) const;
};

/// Comma-separated, optional double quotes, blank lines ignored. Every row must
/// have as many cells as the header.
CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

struct InputFiles {
  std::string pvalues;      // `id,p`
  std::string data;         // header of sample ids, first column row id
  std::string labels;       // `sample_id,group`
  std::string annotations;  // `id,<columns>`; optional
  std::string chrom_col;    // chromosome column in the annotations or p-value file
};

struct Inputs {
  std::vector<std::string> ids;
  PValueVector pvalues{0.0};
  std::optional<TwoSampleDataset> dataset;
  std::optional<FoldChange> fold_change;
  /// Chromosome label per row when a chromosome column was requested.
  std::optional<std::vector<std::string>> chromosomes;
  /// SHA-256 of every input file, keyed by role.
  std::map<std::string, std::string> digests;

  std::size_t m() const noexcept { return ids.size(); }
  bool two_sample() const noexcept { return dataset.has_value(); }
  /// Row of each id; throws InputError when an id is unknown.
  std::size_t index_of(const std::string& id) const;
  /// Hypotheses per chromosome in order of appearance. Rows of a chromosome
  /// must be contiguous. A single chromosome when no column was given.
  std::vector<std::size_t> chromosome_sizes() const;

  std::map<std::string, std::size_t> index;
};

/// Reads either the p-value file or the data + labels pair.
Inputs load_inputs(const InputFiles& files,
                   TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

Inputs pvalue_inputs(const CsvTable& table, const std::string& source);
Inputs two_sample_inputs(const CsvTable& data, const std::string& data_source,
                         const CsvTable& labels, const std::string& labels_source,
                         TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace posthoc::app
