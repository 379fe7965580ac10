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

#include "fairaudit/fairness.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairaudit/error.h"

namespace fairaudit {

namespace {

double Ratio(std::size_t num, std::size_t den, const char* what) {
  if (den == 0) {
    throw Error(ErrorKind::kUndefinedMetric,
                std::string(what) + " has a zero denominator");
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double ConfusionCounts::selection_rate() const {
  return Ratio(tp + fp, total(), "selection rate");
}

double ConfusionCounts::tpr() const { return Ratio(tp, tp + fn, "TPR"); }

double ConfusionCounts::fpr() const { return Ratio(fp, fp + tn, "FPR"); }

GroupConfusion group_rates(std::span<const std::uint8_t> predictions,
                           std::span<const std::uint8_t> labels,
                           std::span<const std::uint8_t> group) {
  if (predictions.size() != labels.size() || labels.size() != group.size()) {
    throw Error(ErrorKind::kSchema,
                "predictions, labels and group differ in length");
  }
  GroupConfusion gc;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ConfusionCounts& c = gc.group[group[i] ? 1 : 0];
    const bool pred = predictions[i] != 0;
    const bool truth = labels[i] != 0;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  for (int g = 0; g < 2; ++g) {
    if (gc.group[g].total() == 0) {
      throw Error(ErrorKind::kDegenerate,
                  std::string(g == 0 ? "privileged" : "unprivileged") +
                      " group (" + std::to_string(g) + ") is empty");
    }
  }
  return gc;
}

double disparate_impact(const GroupConfusion& gc) {
  const double privileged = gc.group[0].selection_rate();
  if (privileged == 0.0) {
    throw Error(ErrorKind::kUndefinedMetric,
                "disparate impact is undefined: privileged selection rate "
                "is zero");
  }
  return gc.group[1].selection_rate() / privileged;
}

double demographic_parity_diff(const GroupConfusion& gc) {
  return std::abs(gc.group[1].selection_rate() - gc.group[0].selection_rate());
}

double equalized_odds_diff(const GroupConfusion& gc) {
  const double tpr_gap = std::abs(gc.group[1].tpr() - gc.group[0].tpr());
  const double fpr_gap = std::abs(gc.group[1].fpr() - gc.group[0].fpr());
  return std::max(tpr_gap, fpr_gap);
}

FairnessMetrics fairness_metrics(const GroupConfusion& gc) {
  FairnessMetrics fm;
  if (gc.group[0].selection_rate() > 0.0) {
    fm.disparate_impact = disparate_impact(gc);
  }
  fm.demographic_parity_diff = demographic_parity_diff(gc);
  fm.tpr_gap = std::abs(gc.group[1].tpr() - gc.group[0].tpr());
  fm.fpr_gap = std::abs(gc.group[1].fpr() - gc.group[0].fpr());
  fm.equalized_odds_diff = std::max(fm.tpr_gap, fm.fpr_gap);
  return fm;
}

}  // namespace fairaudit
