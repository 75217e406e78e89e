#include "posthoc/app/inputs.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace posthoc::app {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line, const std::string& where) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"' && trim(cell).empty()) {
      quoted = true;
      was_quoted = true;
      cell.clear();
    } else if (c == ',') {
      cells.push_back(was_quoted ? cell : trim(cell));
      cell.clear();
      was_quoted = false;
    } else {
      cell += c;
    }
  }
  if (quoted) throw InputError(where + ": unterminated quoted field");
  cells.push_back(was_quoted ? cell : trim(cell));
  return cells;
}

std::string location(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw InputError(where + ": '" + text + "' is not a number");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void index_ids(Inputs& inputs, const CsvTable& table, const std::string& source) {
  for (std::size_t i = 0; i < inputs.ids.size(); ++i) {
    const auto [it, inserted] = inputs.index.emplace(inputs.ids[i], i);
    if (!inserted) {
      throw InputError(location(source, table.lines[i]) + ": duplicate id '" + inputs.ids[i] +
                       "'");
    }
    if (inputs.ids[i].empty()) throw InputError(location(source, table.lines[i]) + ": empty id");
  }
}

}  // namespace

std::size_t CsvTable::column(const std::string& name, const std::string& source) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError(source + ": no column named '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split_line(line, location(source, line_no));
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw InputError(location(source, line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
    table.lines.push_back(line_no);
  }
  if (!have_header) throw InputError(source + ": file is empty");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_csv(in, path);
}

std::size_t Inputs::index_of(const std::string& id) const {
  const auto it = index.find(id);
  if (it == index.end()) throw InputError("unknown id '" + id + "'");
  return it->second;
}

std::vector<std::size_t> Inputs::chromosome_sizes() const {
  if (!chromosomes) return {m()};
  std::vector<std::size_t> sizes;
  std::set<std::string> closed;
  for (std::size_t i = 0; i < chromosomes->size(); ++i) {
    const auto& c = (*chromosomes)[i];
    if (i > 0 && c == (*chromosomes)[i - 1]) {
      ++sizes.back();
      continue;
    }
    if (!closed.insert(c).second) {
      throw InputError("rows of chromosome '" + c + "' are not contiguous (row " +
                       std::to_string(i + 1) + ")");
    }
    sizes.push_back(1);
  }
  return sizes;
}

Inputs pvalue_inputs(const CsvTable& table, const std::string& source) {
  const std::size_t id_col = table.column("id", source);
  const std::size_t p_col = table.column("p", source);
  if (table.rows.empty()) throw InputError(source + ": no p-values");
  Inputs inputs;
  std::vector<double> p;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto where = location(source, table.lines[r]);
    const double value = parse_number(table.rows[r][p_col], where);
    if (!(value >= 0.0 && value <= 1.0)) {
      throw InputError(where + ": p-value " + table.rows[r][p_col] + " outside [0,1]");
    }
    inputs.ids.push_back(table.rows[r][id_col]);
    p.push_back(value);
  }
  index_ids(inputs, table, source);
  inputs.pvalues = PValueVector(std::move(p));
  return inputs;
}

Inputs two_sample_inputs(const CsvTable& data, const std::string& data_source,
                         const CsvTable& labels, const std::string& labels_source,
                         TwoSampleStatistic stat) {
  if (data.header.size() < 2) throw InputError(data_source + ": no sample columns");
  if (data.rows.empty()) throw InputError(data_source + ": no rows");
  const std::size_t sample_col = labels.column("sample_id", labels_source);
  const std::size_t group_col = labels.column("group", labels_source);
  std::map<std::string, int> group_of;
  for (std::size_t r = 0; r < labels.rows.size(); ++r) {
    const auto where = location(labels_source, labels.lines[r]);
    const auto& g = labels.rows[r][group_col];
    if (g != "1" && g != "2") throw InputError(where + ": group must be 1 or 2, got '" + g + "'");
    if (!group_of.emplace(labels.rows[r][sample_col], g == "1" ? 1 : 2).second) {
      throw InputError(where + ": duplicate sample '" + labels.rows[r][sample_col] + "'");
    }
  }
  const std::size_t n = data.header.size() - 1;
  std::vector<int> lab(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& sample = data.header[j + 1];
    const auto it = group_of.find(sample);
    if (it == group_of.end()) {
      throw InputError(data_source + ": sample '" + sample + "' has no label in " +
                       labels_source);
    }
    lab[j] = it->second;
  }
  if (group_of.size() != n) {
    throw InputError(labels_source + ": " + std::to_string(group_of.size()) +
                     " labelled samples but " + data_source + " has " + std::to_string(n) +
                     " sample columns");
  }
  Inputs inputs;
  std::vector<double> values;
  values.reserve(data.rows.size() * n);
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const auto where = location(data_source, data.lines[r]);
    inputs.ids.push_back(data.rows[r][0]);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = parse_number(data.rows[r][j + 1], where);
      if (!std::isfinite(x)) throw InputError(where + ": non-finite value");
      values.push_back(x);
    }
  }
  index_ids(inputs, data, data_source);
  inputs.dataset.emplace(data.rows.size(), n, std::move(values), std::move(lab));
  inputs.pvalues = two_sample_pvalues(*inputs.dataset, stat);
  inputs.fold_change = fold_change(*inputs.dataset);
  return inputs;
}

Inputs load_inputs(const InputFiles& files, TwoSampleStatistic stat) {
  const bool pv = !files.pvalues.empty();
  const bool ts = !files.data.empty() || !files.labels.empty();
  if (pv == ts) throw InputError("give either a p-value file or a data file with labels");
  Inputs inputs;
  std::optional<CsvTable> pvalue_table;
  if (pv) {
    pvalue_table = read_csv_file(files.pvalues);
    inputs = pvalue_inputs(*pvalue_table, files.pvalues);
    inputs.digests["pvalues"] = sha256_file(files.pvalues);
  } else {
    if (files.data.empty() || files.labels.empty()) {
      throw InputError("two-sample mode needs both a data file and a labels file");
    }
    inputs = two_sample_inputs(read_csv_file(files.data), files.data,
                               read_csv_file(files.labels), files.labels, stat);
    inputs.digests["data"] = sha256_file(files.data);
    inputs.digests["labels"] = sha256_file(files.labels);
  }
  if (!files.annotations.empty()) inputs.digests["annotations"] = sha256_file(files.annotations);
  if (!files.chrom_col.empty()) {
    std::vector<std::string> chrom(inputs.m());
    if (!files.annotations.empty()) {
      const auto table = read_csv_file(files.annotations);
      const std::size_t id_col = table.column("id", files.annotations);
      const std::size_t c_col = table.column(files.chrom_col, files.annotations);
      std::vector<bool> seen(inputs.m(), false);
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto it = inputs.index.find(table.rows[r][id_col]);
        if (it == inputs.index.end()) {
          throw InputError(location(files.annotations, table.lines[r]) + ": unknown id '" +
                           table.rows[r][id_col] + "'");
        }
        chrom[it->second] = table.rows[r][c_col];
        seen[it->second] = true;
      }
      const auto missing = std::find(seen.begin(), seen.end(), false);
      if (missing != seen.end()) {
        throw InputError(files.annotations + ": no annotation for id '" +
                         inputs.ids[static_cast<std::size_t>(missing - seen.begin())] + "'");
      }
    } else if (pvalue_table) {
      const std::size_t c_col = pvalue_table->column(files.chrom_col, files.pvalues);
      for (std::size_t r = 0; r < pvalue_table->rows.size(); ++r) {
        chrom[r] = pvalue_table->rows[r][c_col];
      }
    } else {
      throw InputError("a chromosome column for two-sample data needs an annotations file");
    }
    inputs.chromosomes = std::move(chrom);
    inputs.chromosome_sizes();
  }
  return inputs;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

}  // namespace posthoc::app
