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

#ifndef FAIRAUDIT_ATTRIBUTION_H_
#define FAIRAUDIT_ATTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/data.h"
#include "fairaudit/models.h"

namespace fairaudit {

// Per-instance Shapley values on the margin (log-odds) scale. For every row
// i, baseline + sum_j value(i, j) reproduces the model margin.
struct AttributionMatrix {
  std::size_t rows = 0;
  std::vector<double> values;  // row-major, rows x feature_names.size()
  double baseline = 0.0;
  std::vector<std::string> feature_names;

  std::size_t cols() const { return feature_names.size(); }
  double value(std::size_t i, std::size_t j) const {
    return values[i * cols() + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
};

// phi[i][j] = w_j * (x[i][j] - mu_j); baseline = w . mu + b. X and mu must
// be in the model's standardized space.
AttributionMatrix linear_shap(const LinearModel& model,
                              const TabularDataset& X,
                              std::span<const double> mu);

// Path-dependent TreeSHAP: node covers act as the conditional distribution
// of features outside the coalition.
AttributionMatrix tree_shap(const TreeEnsemble& model, const TabularDataset& X);

// Single-tree, single-instance TreeSHAP (unscaled leaf values). `phi` must
// have one slot per feature; values are added to it.
void tree_shap_single(const RegressionTree& tree, std::span<const double> x,
                      std::span<double> phi);

// Cover-weighted mean leaf value of a tree.
double expected_value(const RegressionTree& tree);

AttributionMatrix attribute(const Model& model, const TabularDataset& X,
                            std::span<const double> mu);

// Exact Shapley values by enumerating all coalitions. Bit j of the mask
// marks feature j as present. Limited to 15 features.
using CoalitionValue = std::function<double(std::uint32_t mask)>;
std::vector<double> brute_force_shapley(const CoalitionValue& value_fn,
                                        int n_features);

// mean_i |phi[i][j]|, L1-normalized to sum to one.
std::vector<double> normalize_importance(const AttributionMatrix& am);

struct FeatureDivergence {
  std::string feature;
  // Welch t of |phi| between cohorts, male minus female. +/-inf when both
  // cohorts are constant with different means.
  double t = 0.0;
  double mean_male = 0.0;
  double mean_female = 0.0;
  std::size_t n_male = 0;
  std::size_t n_female = 0;
};

using CohortDivergence = std::vector<FeatureDivergence>;

// Welch two-sample t statistic with unbiased variances.
double welch_t(std::span<const double> a, std::span<const double> b);

// Group 0 is the male cohort, group 1 the female cohort.
CohortDivergence cohort_t_statistics(const AttributionMatrix& am,
                                     std::span<const std::uint8_t> group);

}  // namespace fairaudit

#endif  // FAIRAUDIT_ATTRIBUTION_H_
