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

#include "fairaudit/pipeline.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "fairaudit/error.h"

namespace fairaudit {
namespace {

Hyperparams SmallHyperparams() {
  Hyperparams hp;
  hp.lr.max_epochs = 300;
  hp.gbt.n_trees = 8;
  hp.gbt.max_depth = 3;
  return hp;
}

TabularDataset SmallSynthetic(std::uint64_t seed = 17) {
  SyntheticSpec spec;
  spec.n_rows = 1200;
  spec.leakage_alpha = 1.0;
  return generate_synthetic(spec, seed);
}

const AuditReport& SharedReport() {
  static const AuditReport report = [] {
    AuditOptions options;
    options.hp = SmallHyperparams();
    return run_audit(SmallSynthetic(), options);
  }();
  return report;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CountLines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

TEST(EnumerateConfigs, GridOrder) {
  const auto configs = enumerate_configs();
  ASSERT_EQ(configs.size(), 12u);
  EXPECT_EQ(configs[0].id, 1);
  EXPECT_EQ(configs[0].model_kind, ModelKind::kLinear);
  EXPECT_EQ(configs[0].balancing.kind, BalancingStrategy::Kind::kClassWeight);
  EXPECT_EQ(configs[0].feature_set, FeatureSet::kWithNonFinancial);
  EXPECT_EQ(configs[1].feature_set, FeatureSet::kFinancialOnly);
  EXPECT_EQ(configs[2].balancing.kind, BalancingStrategy::Kind::kSmote);
  EXPECT_EQ(configs[6].model_kind, ModelKind::kBoostedTrees);
  EXPECT_EQ(configs[11].balancing.kind, BalancingStrategy::Kind::kSubsample);
  EXPECT_EQ(configs[11].feature_set, FeatureSet::kFinancialOnly);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(configs[i].id, i + 1);
}

TEST(Synthetic, NoSignalWhenAlphaZero) {
  SyntheticSpec spec;
  const TabularDataset ds = generate_synthetic(spec, 3);
  ASSERT_EQ(ds.rows(), 10000u);
  const std::size_t proxy = *FindFeature(ds.specs(), "LIMIT_BAL");
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const double n = static_cast<double>(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const double x = ds.at(i, proxy);
    const double y = ds.group()[i];
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double corr = (sxy - sx * sy / n) /
                      std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  EXPECT_LT(std::abs(corr), 0.03);
  EXPECT_NEAR(sy / n, 0.6, 0.02);
  EXPECT_NEAR(ds.positive_rate(), 0.22, 0.02);
}

TEST(Synthetic, DeterministicAndValidated) {
  EXPECT_EQ(SmallSynthetic(5), SmallSynthetic(5));
  EXPECT_FALSE(SmallSynthetic(5) == SmallSynthetic(6));
  SyntheticSpec bad;
  bad.gender_rate = 1.0;
  EXPECT_THROW(generate_synthetic(bad, 1), Error);
  bad = {};
  bad.n_noise_features = 22;
  EXPECT_THROW(generate_synthetic(bad, 1), Error);
}

TEST(Hyperparams, ParsesAndRejects) {
  const Hyperparams hp = parse_hyperparams(
      "# comment\nlr.l2_penalty = 0.5\n\ngbt.n_trees=30  # trailing\n"
      "smote.k = 3\n");
  EXPECT_EQ(hp.lr.l2_penalty, 0.5);
  EXPECT_EQ(hp.gbt.n_trees, 30);
  EXPECT_EQ(hp.smote_k, 3);
  EXPECT_EQ(hp.gbt.max_depth, Hyperparams{}.gbt.max_depth);
  for (const char* bad : {"lr.l2_penalty", "nope.key = 1", "gbt.n_trees = 0",
                          "gbt.n_trees = 2.5", "lr.tolerance = -1",
                          "gbt.learning_rate = 2", "smote.k = x"}) {
    try {
      parse_hyperparams(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kArgument) << bad;
    }
  }
}

TEST(Audit, ReportShape) {
  const AuditReport& report = SharedReport();
  ASSERT_EQ(report.results.size(), 12u);
  for (const ConfigResult& r : report.results) {
    const std::size_t m =
        r.config.feature_set == FeatureSet::kFinancialOnly ? 19u : 22u;
    EXPECT_EQ(r.feature_names.size(), m);
    for (const auto& name : r.feature_names) EXPECT_NE(name, "SEX");
    double total = 0.0;
    for (double v : r.importances) total += v;
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_LT(r.max_local_accuracy_error, 1e-6);
    EXPECT_LT(r.leakage.max_local_accuracy_error, 1e-6);
    EXPECT_EQ(r.divergence.size(), m);
    // Default labels carry no signal in the synthetic data.
    EXPECT_NEAR(r.eval.roc_auc, 0.5, 0.1);
  }
}

TEST(Audit, CsvLayout) {
  const AuditReport& report = SharedReport();
  const std::string metrics = metrics_csv(report);
  EXPECT_EQ(CountLines(metrics), 13);
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')),
            "config,accuracy,auc,di,dpd,eod");
  const std::string div = divergence_csv(report);
  EXPECT_EQ(div.substr(0, div.find('\n')),
            "feature,config_1,config_3,config_5,config_7,config_9,config_11");
  EXPECT_EQ(CountLines(div), 4);
  EXPECT_NE(div.find("\nEDUCATION,"), std::string::npos);
  EXPECT_NE(div.find("\nMARRIAGE,"), std::string::npos);
  EXPECT_NE(div.find("\nAGE,"), std::string::npos);
  EXPECT_EQ(CountLines(shap_financial_csv(report)), 20);
  EXPECT_EQ(CountLines(leakage_financial_csv(report)), 20);
}

TEST(Audit, JsonParsesAndRoundsConsistently) {
  const auto j = nlohmann::json::parse(report_to_json(SharedReport()));
  EXPECT_EQ(j["version"], kReportSchemaVersion);
  EXPECT_EQ(j["configs"].size(), 12u);
  EXPECT_EQ(j["configs"][0]["id"], 1);
  EXPECT_TRUE(j["configs"][0]["importances"].contains("AGE"));
  EXPECT_FALSE(j["configs"][1]["importances"].contains("AGE"));
  EXPECT_TRUE(j["configs"][1]["leakage"].contains("financial_only"));
}

TEST(Audit, EmitIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "fairaudit_emit";
  std::filesystem::remove_all(dir);
  const auto first = emit_report(SharedReport(), dir / "a");
  const auto second = emit_report(SharedReport(), dir / "b");
  ASSERT_EQ(first.size(), 5u);
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].filename(), second[i].filename());
    EXPECT_EQ(ReadFile(first[i]), ReadFile(second[i]));
  }
  std::filesystem::remove_all(dir);
}

TEST(Audit, DeterministicAcrossJobCounts) {
  AuditOptions options;
  options.hp = SmallHyperparams();
  options.config_ids = {2, 3, 8, 12};
  options.jobs = 1;
  const TabularDataset ds = SmallSynthetic(23);
  const TabularDataset copy = ds;
  const std::string serial = report_to_json(run_audit(ds, options));
  options.jobs = 4;
  const std::string parallel = report_to_json(run_audit(ds, options));
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(ds, copy);
}

TEST(Audit, ConfigSubsetAndErrors) {
  AuditOptions options;
  options.hp = SmallHyperparams();
  options.config_ids = {3, 1, 3};
  const AuditReport r = run_audit(SmallSynthetic(), options);
  ASSERT_EQ(r.results.size(), 2u);
  EXPECT_EQ(r.results[0].config.id, 1);
  EXPECT_EQ(r.results[1].config.id, 3);
  options.config_ids = {13};
  EXPECT_THROW(run_audit(SmallSynthetic(), options), Error);
}

TEST(FormatSig6, Examples) {
  EXPECT_EQ(format_sig6(0.5), "0.5");
  EXPECT_EQ(format_sig6(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_sig6(1234567.0), "1.23457e+06");
}

}  // namespace
}  // namespace fairaudit
