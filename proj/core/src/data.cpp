#include "tskd/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "tskd/rng.hpp"

namespace tskd {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one line; double quotes may wrap a cell containing the delimiter.
std::vector<std::string> split_cells(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == delimiter && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& cell, long long& out) {
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

RawTable parse_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_cells(line, options.delimiter);
    if (header_pending) {
      header = std::move(cells);
      header_pending = false;
      continue;
    }
    const std::size_t expected = !rows.empty() ? rows.front().size() : (!header.empty() ? header.size() : 0);
    if (expected != 0 && cells.size() != expected) {
      throw ParseError(fmt::format("expected {} cells, found {}", expected, cells.size()), line_no);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) throw ParseError("missing value", line_no, c + 1);
    }
    rows.push_back(std::move(cells));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ParseError("no data rows");

  const std::size_t width = rows.front().size();
  if (width < 2) throw ParseError("need at least one feature column and a label column", line_numbers.front());
  const long long label_col_signed =
      options.label_column < 0 ? static_cast<long long>(width) + options.label_column : options.label_column;
  if (label_col_signed < 0 || label_col_signed >= static_cast<long long>(width)) {
    throw ParseError(fmt::format("label column {} out of range for {} columns", options.label_column, width));
  }
  const auto label_col = static_cast<std::size_t>(label_col_signed);

  RawTable table;
  const Index n = static_cast<Index>(rows.size());
  table.features.resize(n, static_cast<Index>(width - 1));
  for (std::size_t c = 0, f = 0; c < width; ++c) {
    if (c == label_col) continue;
    table.feature_names.push_back(!header.empty() ? header[c] : fmt::format("x{}", f + 1));
    bool numeric = true;
    std::vector<double> values(rows.size());
    for (std::size_t r = 0; r < rows.size() && numeric; ++r) numeric = parse_double(rows[r][c], values[r]);
    if (!numeric) {
      std::map<std::string, int> codes;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto [it, inserted] = codes.emplace(rows[r][c], static_cast<int>(codes.size()));
        values[r] = it->second;
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) table.features(static_cast<Index>(r), static_cast<Index>(f)) = values[r];
    ++f;
  }

  std::vector<long long> ints(rows.size());
  bool integral = true;
  for (std::size_t r = 0; r < rows.size() && integral; ++r) integral = parse_int(rows[r][label_col], ints[r]);
  table.labels.resize(rows.size());
  if (integral) {
    std::vector<long long> distinct = ints;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (long long v : distinct) table.class_names.push_back(std::to_string(v));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      table.labels[r] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), ints[r]) - distinct.begin());
    }
  } else {
    std::map<std::string, int> codes;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto [it, inserted] = codes.emplace(rows[r][label_col], static_cast<int>(codes.size()));
      if (inserted) table.class_names.push_back(rows[r][label_col]);
      table.labels[r] = it->second;
    }
  }
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return parse_csv(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Normalizer Normalizer::fit(const Matrix& X) {
  if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument("cannot fit normalization on an empty matrix");
  return Normalizer{X.colwise().minCoeff().transpose(), X.colwise().maxCoeff().transpose()};
}

Matrix Normalizer::apply(const Matrix& X) const {
  if (X.cols() != min.size()) throw std::invalid_argument("normalization feature count mismatch");
  Matrix out(X.rows(), X.cols());
  for (Index i = 0; i < X.cols(); ++i) {
    const double range = max(i) - min(i);
    for (Index r = 0; r < X.rows(); ++r) {
      out(r, i) = range > 0.0 ? std::clamp((X(r, i) - min(i)) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

NormalizedPair normalize(const Matrix& train, const Matrix& apply) {
  if (apply.cols() != train.cols()) throw std::invalid_argument("train and apply matrices differ in feature count");
  NormalizedPair out;
  out.params = Normalizer::fit(train);
  out.train = out.params.apply(train);
  out.applied = out.params.apply(apply);
  return out;
}

void Dataset::validate() const {
  if (X.rows() == 0) throw std::invalid_argument("dataset is empty");
  if (static_cast<Index>(y.size()) != X.rows()) throw std::invalid_argument("label count differs from sample count");
  if (class_count < 2) throw std::invalid_argument("dataset needs at least two classes");
  std::vector<int> seen(static_cast<std::size_t>(class_count), 0);
  for (int label : y) {
    if (label < 0 || label >= class_count) throw std::invalid_argument("label outside 0..C-1");
    seen[label] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::invalid_argument("every class must appear at least once");
  }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  Dataset out;
  out.X.resize(static_cast<Index>(rows.size()), X.cols());
  out.y.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Index>(r)) = X.row(rows[r]);
    out.y[r] = y[rows[r]];
  }
  out.class_count = class_count;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.normalization = normalization;
  return out;
}

Dataset make_dataset(RawTable table) {
  Dataset ds;
  ds.X = std::move(table.features);
  ds.y = std::move(table.labels);
  ds.class_count = static_cast<Index>(table.class_names.size());
  ds.feature_names = std::move(table.feature_names);
  ds.class_names = std::move(table.class_names);
  ds.validate();
  return ds;
}

Dataset globally_normalized(Dataset ds) {
  Normalizer params = Normalizer::fit(ds.X);
  ds.X = params.apply(ds.X);
  ds.normalization = std::move(params);
  return ds;
}

std::vector<int> regroup_cleveland(std::span<const int> labels) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int v = labels[i];
    if (v < 0 || v > 4) throw std::invalid_argument("Cleveland labels must be in 0..4");
    out[i] = v == 0 ? 0 : (v == 4 ? 2 : 1);
  }
  return out;
}

std::vector<Index> FoldPlan::train_indices(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<Index> FoldPlan::test_indices(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(static_cast<Index>(i));
  }
  return out;
}

FoldPlan stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("fold count must be at least 2");
  if (labels.empty()) throw std::invalid_argument("cannot split an empty label set");
  int classes = 0;
  for (int label : labels) {
    if (label < 0) throw std::invalid_argument("labels must be non-negative");
    classes = std::max(classes, label + 1);
  }
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  Engine engine(seed);
  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.assignment.assign(labels.size(), -1);
  std::size_t deal = 0;
  for (auto& group : members) {
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[uniform_index(engine, i)]);
    }
    for (std::size_t idx : group) plan.assignment[idx] = static_cast<int>(deal++ % static_cast<std::size_t>(folds));
  }
  return plan;
}

namespace {

std::filesystem::path meta_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

}  // namespace

void write_dataset_cache(const std::filesystem::path& path, const Dataset& ds) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (Index i = 0; i < ds.features(); ++i) {
    out << (static_cast<std::size_t>(i) < ds.feature_names.size() ? ds.feature_names[i] : fmt::format("x{}", i + 1))
        << ',';
  }
  out << "label\n";
  for (Index r = 0; r < ds.samples(); ++r) {
    for (Index i = 0; i < ds.features(); ++i) out << fmt::format("{:.17g},", ds.X(r, i));
    out << ds.y[r] << '\n';
  }

  nlohmann::json meta;
  meta["format"] = "tskd-dataset";
  meta["version"] = 1;
  meta["class_names"] = ds.class_names;
  meta["feature_names"] = ds.feature_names;
  if (ds.normalization) {
    meta["normalization"]["min"] = std::vector<double>(ds.normalization->min.begin(), ds.normalization->min.end());
    meta["normalization"]["max"] = std::vector<double>(ds.normalization->max.begin(), ds.normalization->max.end());
  }
  std::ofstream meta_out(meta_path(path));
  if (!meta_out) throw std::runtime_error("cannot write " + meta_path(path).string());
  meta_out << meta.dump(2) << '\n';
}

Dataset read_dataset_cache(const std::filesystem::path& path) {
  CsvOptions options;
  options.header = true;
  Dataset ds = make_dataset(load_csv(path, options));
  std::ifstream meta_in(meta_path(path));
  if (!meta_in) throw ParseError("missing sidecar " + meta_path(path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(meta_path(path).string() + ": " + e.what());
  }
  if (meta.value("format", "") != "tskd-dataset") throw ParseError("sidecar is not a tskd dataset record");
  auto names = meta.at("class_names").get<std::vector<std::string>>();
  if (static_cast<Index>(names.size()) != ds.class_count) throw ParseError("sidecar class count mismatch");
  ds.class_names = std::move(names);
  if (meta.contains("normalization")) {
    const auto lo = meta["normalization"].at("min").get<std::vector<double>>();
    const auto hi = meta["normalization"].at("max").get<std::vector<double>>();
    ds.normalization = Normalizer{Eigen::Map<const Vector>(lo.data(), static_cast<Index>(lo.size())),
                                  Eigen::Map<const Vector>(hi.data(), static_cast<Index>(hi.size()))};
  }
  return ds;
}

}  // namespace tskd
