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

#ifndef FAIRAUDIT_DATA_H_
#define FAIRAUDIT_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fairaudit {

enum class FeatureRole { kSensitive, kNonFinancial, kFinancial };

const char* FeatureRoleName(FeatureRole role);

struct FeatureSpec {
  std::string name;
  FeatureRole role = FeatureRole::kFinancial;
  // Ordinal or categorical codes (EDUCATION, MARRIAGE, PAY_*). SMOTE rounds
  // these back to integers after interpolation.
  bool integer_coded = false;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// The 23 feature columns of the credit-default table, in file order.
const std::vector<FeatureSpec>& CanonicalSchema();

// Index of `name` in `specs`, or std::nullopt.
std::optional<std::size_t> FindFeature(std::span<const FeatureSpec> specs,
                                       std::string_view name);

// Immutable numeric table: row-major features, binary labels and an optional
// binary protected-group vector (0 = male / privileged, 1 = female).
class TabularDataset {
 public:
  TabularDataset() = default;
  TabularDataset(std::vector<double> features, std::vector<FeatureSpec> specs,
                 std::vector<std::uint8_t> labels,
                 std::optional<std::vector<std::uint8_t>> group);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return specs_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const {
    return features_[i * cols() + j];
  }
  const std::vector<double>& features() const { return features_; }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  bool has_group() const { return group_.has_value(); }
  // Throws kDomain when the dataset carries no group vector.
  const std::vector<std::uint8_t>& group() const;
  const std::optional<std::vector<std::uint8_t>>& maybe_group() const {
    return group_;
  }

  std::vector<std::string> feature_names() const;
  std::size_t count_label(std::uint8_t value) const;
  double positive_rate() const;

  // New dataset holding the given rows, in the given order.
  TabularDataset take_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const TabularDataset&,
                         const TabularDataset&) = default;

 private:
  std::vector<double> features_;
  std::vector<FeatureSpec> specs_;
  std::vector<std::uint8_t> labels_;
  std::optional<std::vector<std::uint8_t>> group_;
};

enum class FeatureSet { kWithNonFinancial, kFinancialOnly };

const char* FeatureSetName(FeatureSet fs);

struct ScalingParams {
  std::vector<double> mean;
  // Population standard deviation (divisor n). Zero for constant columns.
  std::vector<double> stddev;
};

struct TrainTestSplit {
  TabularDataset train;
  TabularDataset test;
};

struct StandardizedSplit {
  TabularDataset train;
  TabularDataset test;
  ScalingParams scaling;
};

// Gender code mapping used by the loader. Defaults: code 1 (male) is the
// privileged group 0, code 2 (female) is group 1.
struct GenderCoding {
  int privileged_code = 1;
  int unprivileged_code = 2;
};

TabularDataset load_csv(const std::filesystem::path& path,
                        const GenderCoding& coding = {});
TabularDataset parse_csv(std::string_view text,
                         const GenderCoding& coding = {});

// Writes the canonical CSV layout (ID, 23 features, target). The dataset
// must use the canonical schema.
std::string to_canonical_csv(const TabularDataset& ds,
                             const GenderCoding& coding = {});

// Stratified by label. Test rows per class follow largest-remainder rounding
// of test_fraction * n_c, which sums to round(test_fraction * n).
TrainTestSplit split(const TabularDataset& ds, double test_fraction,
                     std::uint64_t seed);

TabularDataset select_features(const TabularDataset& ds, FeatureSet fs);

// Column subset by name, in the order given.
TabularDataset select_columns(const TabularDataset& ds,
                              std::span<const std::string> names);

ScalingParams fit_scaling(const TabularDataset& train);
TabularDataset apply_scaling(const TabularDataset& ds,
                             const ScalingParams& sp);
StandardizedSplit standardize(const TabularDataset& train,
                              const TabularDataset& test);

}  // namespace fairaudit

#endif  // FAIRAUDIT_DATA_H_
