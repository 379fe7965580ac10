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

#ifndef FAIRAUDIT_PIPELINE_H_
#define FAIRAUDIT_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/attribution.h"
#include "fairaudit/balance.h"
#include "fairaudit/data.h"
#include "fairaudit/fairness.h"
#include "fairaudit/leakage.h"
#include "fairaudit/models.h"

namespace fairaudit {

inline constexpr std::string_view kToolkitVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

struct AuditConfig {
  int id = 0;
  ModelKind model_kind = ModelKind::kLinear;
  BalancingStrategy balancing;
  FeatureSet feature_set = FeatureSet::kWithNonFinancial;
};

// Model kind (linear, boosted trees) x balancing (class weight, SMOTE,
// subsample) x feature set (with non-financial, financial only); ids are
// 1-based positions in that order.
std::vector<AuditConfig> enumerate_configs(int smote_k = 5);

// The attacker mirrors the configuration's feature set.
AttackFeatureSet attack_feature_set_for(FeatureSet fs);

struct ConfigResult {
  AuditConfig config;
  EvalMetrics eval;
  FairnessMetrics fairness;
  std::vector<std::string> feature_names;
  std::vector<double> importances;
  CohortDivergence divergence;
  LeakageReport leakage;
  double max_local_accuracy_error = 0.0;
};

// Per-configuration seed: base_seed + cfg.id.
ConfigResult run_config(const AuditConfig& cfg, const TabularDataset& train,
                        const TabularDataset& test, const Hyperparams& hp,
                        std::uint64_t base_seed);

struct DatasetFingerprint {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double positive_rate = 0.0;
};

struct AuditReport {
  std::uint64_t seed = 0;
  DatasetFingerprint dataset;
  std::vector<ConfigResult> results;
  std::string toolkit_version{kToolkitVersion};
  // Result-affecting options of the producing invocation, as key/value
  // pairs in a fixed order.
  std::vector<std::pair<std::string, std::string>> invocation;
};

struct AuditOptions {
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  std::vector<int> config_ids;  // empty = all
  Hyperparams hp;
  int jobs = 1;
};

// Splits `ds`, runs the selected configurations (possibly on `jobs`
// threads) and assembles results ordered by id.
AuditReport run_audit(const TabularDataset& ds, const AuditOptions& options);

struct SyntheticSpec {
  std::size_t n_rows = 10000;
  double leakage_alpha = 0.0;
  double noise_sigma = 1.0;
  double gender_rate = 0.6;
  double default_rate = 0.22;
  // Standard-normal columns after the proxy, at most 21.
  int n_noise_features = 21;
};

// Canonical-schema table: LIMIT_BAL carries the Gaussian proxy
// N(alpha * gender, sigma^2), the next n_noise_features non-sensitive
// columns hold independent standard normals, the remaining columns are
// zero, and the default label is independent of everything.
TabularDataset generate_synthetic(const SyntheticSpec& spec,
                                  std::uint64_t seed);

// "section.key = value" lines; '#' starts a comment. Unknown keys and
// non-positive values are argument errors.
Hyperparams parse_hyperparams(std::string_view text,
                              const Hyperparams& defaults = {});

std::string report_to_json(const AuditReport& report);
std::string metrics_csv(const AuditReport& report);
std::string shap_financial_csv(const AuditReport& report);
std::string divergence_csv(const AuditReport& report);
std::string leakage_financial_csv(const AuditReport& report);

// Writes audit.json, metrics.csv, shap_financial.csv, divergence.csv and
// leakage_financial.csv into out_dir (created if needed). Returns the paths.
std::vector<std::filesystem::path> emit_report(
    const AuditReport& report, const std::filesystem::path& out_dir);

// "%.6g" formatting used by every CSV emitter.
std::string format_sig6(double v);

}  // namespace fairaudit

#endif  // FAIRAUDIT_PIPELINE_H_
