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

#ifndef FAIRAUDIT_BALANCE_H_
#define FAIRAUDIT_BALANCE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fairaudit/data.h"

namespace fairaudit {

struct BalancingStrategy {
  enum class Kind { kClassWeight, kSmote, kSubsample };
  Kind kind = Kind::kClassWeight;
  int smote_k = 5;

  static BalancingStrategy ClassWeight() { return {Kind::kClassWeight, 5}; }
  static BalancingStrategy Smote(int k = 5) { return {Kind::kSmote, k}; }
  static BalancingStrategy Subsample() { return {Kind::kSubsample, 5}; }
};

const char* BalancingName(BalancingStrategy::Kind kind);

struct BalancedTrainSet {
  TabularDataset data;
  std::vector<double> weights;
  // For SMOTE output: (base, neighbor) row indices into the input dataset
  // for every synthetic row, in the order the rows were appended.
  std::vector<std::pair<std::size_t, std::size_t>> synthetic_parents;
};

// Unit weights over the dataset as given.
BalancedTrainSet unit_weights(TabularDataset ds);

BalancedTrainSet class_weights(const TabularDataset& ds);

BalancedTrainSet smote(const TabularDataset& ds, int k, std::uint64_t seed);

BalancedTrainSet subsample(const TabularDataset& ds, std::uint64_t seed);

BalancedTrainSet apply_balancing(const TabularDataset& ds,
                                 const BalancingStrategy& strategy,
                                 std::uint64_t seed);

// base + lambda * (neighbor - base), rounding integer-coded columns.
std::vector<double> interpolate(std::span<const double> base,
                                std::span<const double> neighbor,
                                double lambda,
                                std::span<const FeatureSpec> specs);

// Indices (into `rows`) of the k Euclidean-nearest rows of rows[query],
// excluding itself. Ties resolve to the lower index. `points` is row-major
// with `dim` columns.
std::vector<std::size_t> nearest_neighbors(std::span<const double> points,
                                           std::size_t dim, std::size_t query,
                                           int k);

}  // namespace fairaudit

#endif  // FAIRAUDIT_BALANCE_H_
