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

#ifndef FAIRAUDIT_FAIRNESS_H_
#define FAIRAUDIT_FAIRNESS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace fairaudit {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double selection_rate() const;
  double tpr() const;
  double fpr() const;

  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

// Index 0 is the privileged group, index 1 the unprivileged group.
struct GroupConfusion {
  ConfusionCounts group[2];
};

struct FairnessMetrics {
  // Unset when the privileged selection rate is zero.
  std::optional<double> disparate_impact;
  double demographic_parity_diff = 0.0;
  double equalized_odds_diff = 0.0;
  double tpr_gap = 0.0;
  double fpr_gap = 0.0;
};

GroupConfusion group_rates(std::span<const std::uint8_t> predictions,
                           std::span<const std::uint8_t> labels,
                           std::span<const std::uint8_t> group);

// selection_rate(1) / selection_rate(0).
double disparate_impact(const GroupConfusion& gc);

// |selection_rate(1) - selection_rate(0)|.
double demographic_parity_diff(const GroupConfusion& gc);

// max(|tpr(1) - tpr(0)|, |fpr(1) - fpr(0)|).
double equalized_odds_diff(const GroupConfusion& gc);

FairnessMetrics fairness_metrics(const GroupConfusion& gc);

}  // namespace fairaudit

#endif  // FAIRAUDIT_FAIRNESS_H_
