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

#ifndef FAIRAUDIT_LEAKAGE_H_
#define FAIRAUDIT_LEAKAGE_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairaudit/attribution.h"
#include "fairaudit/balance.h"
#include "fairaudit/data.h"
#include "fairaudit/models.h"

namespace fairaudit {

enum class ModelKind { kLinear, kBoostedTrees };

const char* ModelKindName(ModelKind kind);

// A model trained on a balanced, standardized training split and explained
// on the matching test split.
struct ModelRun {
  Model model;
  Prediction test_prediction;
  AttributionMatrix test_attribution;
  // max_i |baseline + sum_j phi[i][j] - margin_i| over the test rows.
  double max_local_accuracy_error = 0.0;
};

// Balances `train` (original units), standardizes both splits with the
// balanced training statistics, fits the model and attributes the test rows.
// The linear SHAP reference is the mean of the standardized training rows.
ModelRun train_and_explain(const TabularDataset& train,
                           const TabularDataset& test, ModelKind kind,
                           const BalancingStrategy& balancing,
                           const Hyperparams& hp, std::uint64_t seed);

enum class AttackFeatureSet { kDemographicPlusFinancial, kFinancialOnly };

const char* AttackFeatureSetName(AttackFeatureSet afs);

struct LeakageReport {
  AttackFeatureSet feature_set = AttackFeatureSet::kDemographicPlusFinancial;
  ModelKind model_kind = ModelKind::kLinear;
  BalancingStrategy balancing;
  double attacker_auc = 0.5;
  double attacker_accuracy = 0.0;
  std::vector<std::string> feature_names;
  // Normalized mean |phi| of the attacker, aligned with feature_names.
  std::vector<double> proxy_importances;
  double max_local_accuracy_error = 0.0;
};

// Labels become the protected group (female = 1); the group vector and the
// original target are dropped.
TabularDataset build_attack_dataset(const TabularDataset& ds,
                                    AttackFeatureSet afs);

LeakageReport run_attack(const TabularDataset& train,
                         const TabularDataset& test, AttackFeatureSet afs,
                         ModelKind model_kind,
                         const BalancingStrategy& balancing,
                         const Hyperparams& hp, std::uint64_t seed);

// Features by descending importance; ties keep column order.
std::vector<std::pair<std::string, double>> rank_proxies(
    const LeakageReport& report, int top_k);

}  // namespace fairaudit

#endif  // FAIRAUDIT_LEAKAGE_H_
