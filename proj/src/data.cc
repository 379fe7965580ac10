/*
 * Copyright 2026 The fairaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairaudit/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fairaudit/error.h"

namespace fairaudit {

namespace {

constexpr std::string_view kIdColumn = "ID";
constexpr std::string_view kSexColumn = "SEX";
constexpr std::string_view kTargetNames[] = {"default.payment.next.month",
                                             "default payment next month"};

std::string ToUpper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '"' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '"' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      break;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool IsTargetName(std::string_view name) {
  const std::string upper = ToUpper(name);
  return std::any_of(std::begin(kTargetNames), std::end(kTargetNames),
                     [&](std::string_view t) { return ToUpper(t) == upper; });
}

// Number formatting for CSV output: integers print without a fraction, other
// values with round-trip precision.
std::string FormatCell(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kStratification: return "stratification error";
    case ErrorKind::kNeighbor: return "neighbor error";
    case ErrorKind::kDegenerate: return "degenerate input";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kBound: return "bound error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

const char* FeatureRoleName(FeatureRole role) {
  switch (role) {
    case FeatureRole::kSensitive: return "sensitive";
    case FeatureRole::kNonFinancial: return "nonfinancial";
    case FeatureRole::kFinancial: return "financial";
  }
  return "?";
}

const char* FeatureSetName(FeatureSet fs) {
  return fs == FeatureSet::kWithNonFinancial ? "with_nonfinancial"
                                             : "financial_only";
}

const std::vector<FeatureSpec>& CanonicalSchema() {
  static const std::vector<FeatureSpec> schema = [] {
    using R = FeatureRole;
    std::vector<FeatureSpec> s = {
        {"LIMIT_BAL", R::kFinancial, false},
        {"SEX", R::kSensitive, true},
        {"EDUCATION", R::kNonFinancial, true},
        {"MARRIAGE", R::kNonFinancial, true},
        {"AGE", R::kNonFinancial, false},
        {"PAY_0", R::kFinancial, true},
    };
    for (int m = 2; m <= 6; ++m) {
      s.push_back({"PAY_" + std::to_string(m), R::kFinancial, true});
    }
    for (int m = 1; m <= 6; ++m) {
      s.push_back({"BILL_AMT" + std::to_string(m), R::kFinancial, false});
    }
    for (int m = 1; m <= 6; ++m) {
      s.push_back({"PAY_AMT" + std::to_string(m), R::kFinancial, false});
    }
    return s;
  }();
  return schema;
}

std::optional<std::size_t> FindFeature(std::span<const FeatureSpec> specs,
                                       std::string_view name) {
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (specs[j].name == name) return j;
  }
  return std::nullopt;
}

TabularDataset::TabularDataset(std::vector<double> features,
                               std::vector<FeatureSpec> specs,
                               std::vector<std::uint8_t> labels,
                               std::optional<std::vector<std::uint8_t>> group)
    : features_(std::move(features)),
      specs_(std::move(specs)),
      labels_(std::move(labels)),
      group_(std::move(group)) {
  if (features_.size() != labels_.size() * specs_.size()) {
    throw Error(ErrorKind::kSchema,
                "feature matrix size does not match rows x columns");
  }
  if (group_ && group_->size() != labels_.size()) {
    throw Error(ErrorKind::kSchema, "group length does not match row count");
  }
  for (std::size_t a = 0; a < specs_.size(); ++a) {
    for (std::size_t b = a + 1; b < specs_.size(); ++b) {
      if (specs_[a].name == specs_[b].name) {
        throw Error(ErrorKind::kSchema,
                    "duplicate feature name '" + specs_[a].name + "'");
      }
    }
  }
  auto binary = [](const std::vector<std::uint8_t>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](std::uint8_t x) { return x <= 1; });
  };
  if (!binary(labels_)) {
    throw Error(ErrorKind::kDomain, "labels must be 0/1");
  }
  if (group_ && !binary(*group_)) {
    throw Error(ErrorKind::kDomain, "group must be 0/1");
  }
}

const std::vector<std::uint8_t>& TabularDataset::group() const {
  if (!group_) {
    throw Error(ErrorKind::kDomain, "dataset carries no group vector");
  }
  return *group_;
}

std::vector<std::string> TabularDataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(specs_.size());
  for (const auto& s : specs_) names.push_back(s.name);
  return names;
}

std::size_t TabularDataset::count_label(std::uint8_t value) const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), value));
}

double TabularDataset::positive_rate() const {
  if (labels_.empty()) return 0.0;
  return static_cast<double>(count_label(1)) /
         static_cast<double>(labels_.size());
}

TabularDataset TabularDataset::take_rows(
    std::span<const std::size_t> indices) const {
  std::vector<double> features;
  features.reserve(indices.size() * cols());
  std::vector<std::uint8_t> labels;
  labels.reserve(indices.size());
  std::optional<std::vector<std::uint8_t>> group;
  if (group_) group.emplace().reserve(indices.size());
  for (std::size_t i : indices) {
    const auto r = row(i);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
    if (group_) group->push_back((*group_)[i]);
  }
  return TabularDataset(std::move(features), specs_, std::move(labels),
                        std::move(group));
}

TabularDataset parse_csv(std::string_view text, const GenderCoding& coding) {
  const auto& schema = CanonicalSchema();
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = text.substr(pos, end - pos);
      pos = end + 1;
      if (!Trim(line).empty()) return true;
    }
    return false;
  };

  std::string_view header_line;
  if (!next_line(header_line)) {
    throw Error(ErrorKind::kSchema, "missing header row");
  }
  const auto header = SplitLine(header_line);

  // Map file columns to canonical slots: -1 = ID, -2 = target.
  constexpr int kId = -1;
  constexpr int kTarget = -2;
  std::vector<int> slot(header.size());
  std::vector<bool> seen(schema.size(), false);
  bool have_id = false;
  bool have_target = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = ToUpper(header[c]);
    if (name == kIdColumn) {
      slot[c] = kId;
      have_id = true;
    } else if (IsTargetName(header[c])) {
      slot[c] = kTarget;
      have_target = true;
    } else {
      int found = -3;
      for (std::size_t j = 0; j < schema.size(); ++j) {
        if (schema[j].name == name) found = static_cast<int>(j);
      }
      if (found < 0) {
        throw Error(ErrorKind::kSchema,
                    "unknown column '" + std::string(header[c]) + "'");
      }
      if (seen[found]) {
        throw Error(ErrorKind::kSchema,
                    "duplicate column '" + std::string(header[c]) + "'");
      }
      seen[found] = true;
      slot[c] = found;
    }
  }
  if (!have_id) throw Error(ErrorKind::kSchema, "missing column 'ID'");
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!seen[j]) {
      throw Error(ErrorKind::kSchema,
                  "missing column '" + schema[j].name + "'");
    }
  }
  if (!have_target) {
    throw Error(ErrorKind::kSchema,
                "missing column 'default.payment.next.month'");
  }

  const std::size_t sex_col = *FindFeature(schema, kSexColumn);
  std::vector<double> features;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> group;
  std::vector<double> row(schema.size());
  std::string_view line;
  std::size_t row_number = 0;
  while (next_line(line)) {
    ++row_number;
    const auto cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kParse,
                  "row " + std::to_string(row_number) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    double target = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      const char* first = cells[c].data();
      const char* last = first + cells[c].size();
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (cells[c].empty() || ec != std::errc() || ptr != last ||
          !std::isfinite(value)) {
        throw Error(ErrorKind::kParse,
                    "row " + std::to_string(row_number) + ", column '" +
                        std::string(header[c]) + "': cannot parse '" +
                        std::string(cells[c]) + "' as a number");
      }
      if (slot[c] == kTarget) {
        target = value;
      } else if (slot[c] >= 0) {
        row[slot[c]] = value;
      }
    }
    if (target != 0.0 && target != 1.0) {
      throw Error(ErrorKind::kDomain,
                  "row " + std::to_string(row_number) +
                      ": target must be 0 or 1");
    }
    const double sex = row[sex_col];
    if (sex == coding.privileged_code) {
      group.push_back(0);
    } else if (sex == coding.unprivileged_code) {
      group.push_back(1);
    } else {
      throw Error(ErrorKind::kDomain, "row " + std::to_string(row_number) +
                                          ": SEX code must be " +
                                          std::to_string(coding.privileged_code) +
                                          " or " +
                                          std::to_string(coding.unprivileged_code));
    }
    labels.push_back(static_cast<std::uint8_t>(target));
    features.insert(features.end(), row.begin(), row.end());
  }
  return TabularDataset(std::move(features), schema, std::move(labels),
                        std::move(group));
}

TabularDataset load_csv(const std::filesystem::path& path,
                        const GenderCoding& coding) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kArgument,
                "cannot open data file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), coding);
}

std::string to_canonical_csv(const TabularDataset& ds,
                             const GenderCoding& coding) {
  if (ds.specs() != CanonicalSchema()) {
    throw Error(ErrorKind::kSchema, "dataset is not in the canonical schema");
  }
  const std::size_t sex_col = *FindFeature(ds.specs(), kSexColumn);
  std::string out = "ID";
  for (const auto& s : ds.specs()) out += "," + s.name;
  out += ",";
  out += kTargetNames[0];
  out += "\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    out += std::to_string(i + 1);
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      double v = ds.at(i, j);
      if (j == sex_col && ds.has_group()) {
        v = ds.group()[i] ? coding.unprivileged_code : coding.privileged_code;
      }
      out += ",";
      out += FormatCell(v);
    }
    out += ",";
    out += std::to_string(ds.labels()[i]);
    out += "\n";
  }
  return out;
}

TrainTestSplit split(const TabularDataset& ds, double test_fraction,
                     std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::kArgument, "test fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    by_class[ds.labels()[i]].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw Error(ErrorKind::kStratification,
                  "label class " + std::to_string(c) + " has fewer than 2 rows");
    }
  }
  const double n = static_cast<double>(ds.rows());
  const auto total = static_cast<std::size_t>(std::llround(test_fraction * n));
  std::size_t take[2];
  double remainder[2];
  for (int c = 0; c < 2; ++c) {
    const double exact = test_fraction * static_cast<double>(by_class[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
  }
  std::size_t assigned = take[0] + take[1];
  while (assigned < total) {
    const int c = remainder[1] > remainder[0] ? 1 : 0;
    ++take[c];
    remainder[c] = -1.0;
    ++assigned;
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> test_idx;
  std::vector<std::size_t> train_idx;
  for (int c = 0; c < 2; ++c) {
    auto idx = by_class[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + take[c]);
    train_idx.insert(train_idx.end(), idx.begin() + take[c], idx.end());
  }
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {ds.take_rows(train_idx), ds.take_rows(test_idx)};
}

TabularDataset select_columns(const TabularDataset& ds,
                              std::span<const std::string> names) {
  std::vector<std::size_t> cols;
  std::vector<FeatureSpec> specs;
  for (const auto& name : names) {
    const auto j = FindFeature(ds.specs(), name);
    if (!j) {
      throw Error(ErrorKind::kSchema, "missing column '" + name + "'");
    }
    cols.push_back(*j);
    specs.push_back(ds.specs()[*j]);
  }
  std::vector<double> features;
  features.reserve(ds.rows() * cols.size());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j : cols) features.push_back(ds.at(i, j));
  }
  return TabularDataset(std::move(features), std::move(specs), ds.labels(),
                        ds.maybe_group());
}

TabularDataset select_features(const TabularDataset& ds, FeatureSet fs) {
  std::vector<std::string> names;
  for (const auto& s : ds.specs()) {
    const bool keep =
        s.role == FeatureRole::kFinancial ||
        (fs == FeatureSet::kWithNonFinancial &&
         s.role == FeatureRole::kNonFinancial);
    if (keep) names.push_back(s.name);
  }
  return select_columns(ds, names);
}

ScalingParams fit_scaling(const TabularDataset& train) {
  if (train.rows() == 0) {
    throw Error(ErrorKind::kArgument, "cannot standardize an empty dataset");
  }
  const std::size_t m = train.cols();
  const double n = static_cast<double>(train.rows());
  ScalingParams sp{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) sp.mean[j] += train.at(i, j);
  }
  for (auto& v : sp.mean) v /= n;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = train.at(i, j) - sp.mean[j];
      sp.stddev[j] += d * d;
    }
  }
  for (auto& v : sp.stddev) v = std::sqrt(v / n);
  return sp;
}

TabularDataset apply_scaling(const TabularDataset& ds,
                             const ScalingParams& sp) {
  if (sp.mean.size() != ds.cols() || sp.stddev.size() != ds.cols()) {
    throw Error(ErrorKind::kSchema,
                "scaling parameters do not match the column count");
  }
  std::vector<double> out(ds.features().size());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      out[i * ds.cols() + j] =
          sp.stddev[j] > 0.0 ? (ds.at(i, j) - sp.mean[j]) / sp.stddev[j] : 0.0;
    }
  }
  return TabularDataset(std::move(out), ds.specs(), ds.labels(),
                        ds.maybe_group());
}

StandardizedSplit standardize(const TabularDataset& train,
                              const TabularDataset& test) {
  if (train.specs() != test.specs()) {
    throw Error(ErrorKind::kSchema, "train and test columns differ");
  }
  ScalingParams sp = fit_scaling(train);
  TabularDataset train_std = apply_scaling(train, sp);
  TabularDataset test_std = apply_scaling(test, sp);
  return {std::move(train_std), std::move(test_std), std::move(sp)};
}

}  // namespace fairaudit
