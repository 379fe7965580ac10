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

#include "fairaudit/leakage.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairaudit/error.h"

namespace fairaudit {

const char* ModelKindName(ModelKind kind) {
  return kind == ModelKind::kLinear ? "logistic_regression" : "boosted_trees";
}

const char* AttackFeatureSetName(AttackFeatureSet afs) {
  return afs == AttackFeatureSet::kDemographicPlusFinancial
             ? "demographic_plus_financial"
             : "financial_only";
}

ModelRun train_and_explain(const TabularDataset& train,
                           const TabularDataset& test, ModelKind kind,
                           const BalancingStrategy& balancing,
                           const Hyperparams& hp, std::uint64_t seed) {
  BalancedTrainSet balanced = apply_balancing(train, balancing, seed);
  StandardizedSplit scaled = standardize(balanced.data, test);
  BalancedTrainSet fit_set{std::move(scaled.train), std::move(balanced.weights),
                           {}};

  ModelRun run;
  std::vector<double> mu(fit_set.data.cols(), 0.0);
  if (kind == ModelKind::kLinear) {
    LinearModel lm = fit_logistic(fit_set, hp, seed);
    lm.scaling = scaled.scaling;
    for (std::size_t i = 0; i < fit_set.data.rows(); ++i) {
      for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += fit_set.data.at(i, j);
    }
    for (double& v : mu) v /= static_cast<double>(fit_set.data.rows());
    run.model = std::move(lm);
  } else {
    run.model = fit_gbt(fit_set, hp, seed);
  }
  run.test_prediction = predict(run.model, scaled.test);
  run.test_attribution = attribute(run.model, scaled.test, mu);

  const AttributionMatrix& am = run.test_attribution;
  for (std::size_t i = 0; i < am.rows; ++i) {
    const auto phi = am.row(i);
    const double total = std::accumulate(phi.begin(), phi.end(), am.baseline);
    run.max_local_accuracy_error =
        std::max(run.max_local_accuracy_error,
                 std::abs(total - run.test_prediction.margins[i]));
  }
  return run;
}

TabularDataset build_attack_dataset(const TabularDataset& ds,
                                    AttackFeatureSet afs) {
  if (!ds.has_group()) {
    throw Error(ErrorKind::kDomain,
                "attack dataset requires a protected-group vector");
  }
  const FeatureSet fs = afs == AttackFeatureSet::kDemographicPlusFinancial
                            ? FeatureSet::kWithNonFinancial
                            : FeatureSet::kFinancialOnly;
  TabularDataset selected = select_features(ds, fs);
  return TabularDataset(selected.features(), selected.specs(), ds.group(),
                        std::nullopt);
}

LeakageReport run_attack(const TabularDataset& train,
                         const TabularDataset& test, AttackFeatureSet afs,
                         ModelKind model_kind,
                         const BalancingStrategy& balancing,
                         const Hyperparams& hp, std::uint64_t seed) {
  if (train.specs() != test.specs()) {
    throw Error(ErrorKind::kSchema, "train and test columns differ");
  }
  const TabularDataset attack_train = build_attack_dataset(train, afs);
  const TabularDataset attack_test = build_attack_dataset(test, afs);
  ModelRun run = train_and_explain(attack_train, attack_test, model_kind,
                                   balancing, hp, seed);
  const EvalMetrics em =
      evaluate(run.test_prediction.probabilities, attack_test.labels());

  LeakageReport report;
  report.feature_set = afs;
  report.model_kind = model_kind;
  report.balancing = balancing;
  report.attacker_auc = em.roc_auc;
  report.attacker_accuracy = em.accuracy;
  report.feature_names = attack_test.feature_names();
  report.proxy_importances = normalize_importance(run.test_attribution);
  report.max_local_accuracy_error = run.max_local_accuracy_error;
  return report;
}

std::vector<std::pair<std::string, double>> rank_proxies(
    const LeakageReport& report, int top_k) {
  if (top_k < 1) throw Error(ErrorKind::kArgument, "top_k must be >= 1");
  std::vector<std::size_t> order(report.proxy_importances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.proxy_importances[a] > report.proxy_importances[b];
  });
  const std::size_t k = std::min<std::size_t>(order.size(), top_k);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    out.emplace_back(report.feature_names[order[r]],
                     report.proxy_importances[order[r]]);
  }
  return out;
}

}  // namespace fairaudit
