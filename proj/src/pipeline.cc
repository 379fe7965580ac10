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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "fairaudit/error.h"
#include "json.hpp"

namespace fairaudit {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kDemographicFeatures[] = {"EDUCATION", "MARRIAGE", "AGE"};

std::vector<std::string> FinancialFeatureNames() {
  std::vector<std::string> names;
  for (const auto& s : CanonicalSchema()) {
    if (s.role == FeatureRole::kFinancial) names.push_back(s.name);
  }
  return names;
}

std::string Trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double ParsePositive(const std::string& key, const std::string& value) {
  double v = 0.0;
  std::size_t used = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw Error(ErrorKind::kArgument,
                "hyperparameter '" + key + "': cannot parse '" + value + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::kArgument,
                "hyperparameter '" + key + "' must be positive");
  }
  return v;
}

int ParsePositiveInt(const std::string& key, const std::string& value) {
  const double v = ParsePositive(key, value);
  if (v != std::floor(v)) {
    throw Error(ErrorKind::kArgument,
                "hyperparameter '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

// Looks up a value by feature name, or returns NaN when absent.
double ValueFor(const std::vector<std::string>& names,
                const std::vector<double>& values, const std::string& name) {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return values[j];
  }
  return std::nan("");
}

std::string CsvCell(double v) {
  return std::isnan(v) ? std::string("NA") : format_sig6(v);
}

Json ImportanceObject(const std::vector<std::string>& names,
                      const std::vector<double>& values) {
  Json obj = Json::object();
  for (std::size_t j = 0; j < names.size(); ++j) obj[names[j]] = values[j];
  return obj;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw Error(ErrorKind::kIo, "failed writing '" + path.string() + "'");
  }
}

std::string HyperparamSummary(const Hyperparams& hp) {
  std::ostringstream os;
  os.precision(17);
  os << "lr.l2_penalty=" << hp.lr.l2_penalty
     << ";lr.learning_rate=" << hp.lr.learning_rate
     << ";lr.max_epochs=" << hp.lr.max_epochs
     << ";lr.tolerance=" << hp.lr.tolerance
     << ";gbt.n_trees=" << hp.gbt.n_trees
     << ";gbt.max_depth=" << hp.gbt.max_depth
     << ";gbt.learning_rate=" << hp.gbt.learning_rate
     << ";gbt.min_child_weight=" << hp.gbt.min_child_weight
     << ";gbt.lambda_l2=" << hp.gbt.lambda_l2 << ";smote.k=" << hp.smote_k;
  return os.str();
}

}  // namespace

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<AuditConfig> enumerate_configs(int smote_k) {
  std::vector<AuditConfig> configs;
  int id = 1;
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kBoostedTrees}) {
    for (const BalancingStrategy& b :
         {BalancingStrategy::ClassWeight(), BalancingStrategy::Smote(smote_k),
          BalancingStrategy::Subsample()}) {
      for (FeatureSet fs :
           {FeatureSet::kWithNonFinancial, FeatureSet::kFinancialOnly}) {
        configs.push_back({id++, kind, b, fs});
      }
    }
  }
  return configs;
}

AttackFeatureSet attack_feature_set_for(FeatureSet fs) {
  return fs == FeatureSet::kWithNonFinancial
             ? AttackFeatureSet::kDemographicPlusFinancial
             : AttackFeatureSet::kFinancialOnly;
}

ConfigResult run_config(const AuditConfig& cfg, const TabularDataset& train,
                        const TabularDataset& test, const Hyperparams& hp,
                        std::uint64_t base_seed) {
  const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(cfg.id);
  const TabularDataset train_fs = select_features(train, cfg.feature_set);
  const TabularDataset test_fs = select_features(test, cfg.feature_set);
  ModelRun run = train_and_explain(train_fs, test_fs, cfg.model_kind,
                                   cfg.balancing, hp, seed);

  ConfigResult result;
  result.config = cfg;
  result.eval = evaluate(run.test_prediction.probabilities, test_fs.labels());
  const auto predicted = classify(run.test_prediction.probabilities);
  result.fairness = fairness_metrics(
      group_rates(predicted, test_fs.labels(), test_fs.group()));
  result.feature_names = test_fs.feature_names();
  result.importances = normalize_importance(run.test_attribution);
  result.divergence =
      cohort_t_statistics(run.test_attribution, test_fs.group());
  result.max_local_accuracy_error = run.max_local_accuracy_error;
  result.leakage =
      run_attack(train, test, attack_feature_set_for(cfg.feature_set),
                 cfg.model_kind, cfg.balancing, hp, seed);
  return result;
}

AuditReport run_audit(const TabularDataset& ds, const AuditOptions& options) {
  std::vector<AuditConfig> all = enumerate_configs(options.hp.smote_k);
  std::vector<AuditConfig> selected;
  if (options.config_ids.empty()) {
    selected = all;
  } else {
    std::vector<int> ids = options.config_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int id : ids) {
      if (id < 1 || id > static_cast<int>(all.size())) {
        throw Error(ErrorKind::kArgument,
                    "configuration id " + std::to_string(id) +
                        " is outside 1.." + std::to_string(all.size()));
      }
      selected.push_back(all[id - 1]);
    }
  }

  const TrainTestSplit parts = split(ds, options.test_fraction, options.seed);

  AuditReport report;
  report.seed = options.seed;
  report.dataset = {ds.rows(), ds.cols(), ds.positive_rate()};
  std::string id_list;
  for (const auto& c : selected) {
    id_list += (id_list.empty() ? "" : ",") + std::to_string(c.id);
  }
  report.invocation = {
      {"seed", std::to_string(options.seed)},
      {"test_fraction", format_sig6(options.test_fraction)},
      {"configs", id_list},
      {"hyperparams", HyperparamSummary(options.hp)},
  };

  report.results.resize(selected.size());
  std::vector<std::exception_ptr> errors(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < selected.size(); k = next++) {
      try {
        report.results[k] = run_config(selected[k], parts.train, parts.test,
                                       options.hp, options.seed);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs,
                                             static_cast<int>(selected.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

TabularDataset generate_synthetic(const SyntheticSpec& spec,
                                  std::uint64_t seed) {
  if (!(spec.leakage_alpha >= 0.0) || !(spec.noise_sigma > 0.0) ||
      !(spec.gender_rate > 0.0 && spec.gender_rate < 1.0) ||
      !(spec.default_rate > 0.0 && spec.default_rate < 1.0) ||
      spec.n_noise_features < 0 || spec.n_noise_features > 21) {
    throw Error(ErrorKind::kArgument, "invalid synthetic dataset spec");
  }
  const auto& schema = CanonicalSchema();
  const std::size_t m = schema.size();
  const std::size_t proxy_col = *FindFeature(schema, "LIMIT_BAL");
  const std::size_t sex_col = *FindFeature(schema, "SEX");
  std::vector<std::size_t> noise_cols;
  for (std::size_t j = 0; j < m; ++j) {
    if (j == proxy_col || j == sex_col) continue;
    if (noise_cols.size() < static_cast<std::size_t>(spec.n_noise_features)) {
      noise_cols.push_back(j);
    }
  }

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution gender_dist(spec.gender_rate);
  std::bernoulli_distribution default_dist(spec.default_rate);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> features(spec.n_rows * m, 0.0);
  std::vector<std::uint8_t> labels(spec.n_rows);
  std::vector<std::uint8_t> group(spec.n_rows);
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    const std::uint8_t g = gender_dist(rng) ? 1 : 0;
    group[i] = g;
    double* row = features.data() + i * m;
    row[sex_col] = g ? 2.0 : 1.0;
    row[proxy_col] = spec.leakage_alpha * g + spec.noise_sigma * normal(rng);
    for (std::size_t j : noise_cols) row[j] = normal(rng);
    labels[i] = default_dist(rng) ? 1 : 0;
  }
  return TabularDataset(std::move(features), schema, std::move(labels),
                        std::move(group));
}

Hyperparams parse_hyperparams(std::string_view text,
                              const Hyperparams& defaults) {
  Hyperparams hp = defaults;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string content = Trimmed(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kArgument, "hyperparameter file line " +
                                            std::to_string(line_no) +
                                            ": expected 'section.key = value'");
    }
    const std::string key = Trimmed(std::string_view(content).substr(0, eq));
    const std::string value = Trimmed(std::string_view(content).substr(eq + 1));
    if (key == "lr.l2_penalty") hp.lr.l2_penalty = ParsePositive(key, value);
    else if (key == "lr.learning_rate") hp.lr.learning_rate = ParsePositive(key, value);
    else if (key == "lr.max_epochs") hp.lr.max_epochs = ParsePositiveInt(key, value);
    else if (key == "lr.tolerance") hp.lr.tolerance = ParsePositive(key, value);
    else if (key == "gbt.n_trees") hp.gbt.n_trees = ParsePositiveInt(key, value);
    else if (key == "gbt.max_depth") hp.gbt.max_depth = ParsePositiveInt(key, value);
    else if (key == "gbt.learning_rate") hp.gbt.learning_rate = ParsePositive(key, value);
    else if (key == "gbt.min_child_weight") hp.gbt.min_child_weight = ParsePositive(key, value);
    else if (key == "gbt.lambda_l2") hp.gbt.lambda_l2 = ParsePositive(key, value);
    else if (key == "smote.k") hp.smote_k = ParsePositiveInt(key, value);
    else {
      throw Error(ErrorKind::kArgument,
                  "unknown hyperparameter '" + key + "' on line " +
                      std::to_string(line_no));
    }
  }
  if (hp.gbt.learning_rate > 1.0) {
    throw Error(ErrorKind::kArgument, "gbt.learning_rate must be in (0, 1]");
  }
  return hp;
}

std::string report_to_json(const AuditReport& report) {
  Json root;
  root["version"] = kReportSchemaVersion;
  root["toolkit_version"] = report.toolkit_version;
  root["seed"] = report.seed;
  Json inv = Json::object();
  for (const auto& [k, v] : report.invocation) inv[k] = v;
  root["invocation"] = inv;
  root["dataset"] = {{"rows", report.dataset.rows},
                     {"cols", report.dataset.cols},
                     {"positive_rate", report.dataset.positive_rate}};
  Json configs = Json::array();
  for (const ConfigResult& r : report.results) {
    Json c;
    c["id"] = r.config.id;
    c["model"] = ModelKindName(r.config.model_kind);
    c["balancing"] = BalancingName(r.config.balancing.kind);
    c["feature_set"] = FeatureSetName(r.config.feature_set);
    c["eval"] = {{"accuracy", r.eval.accuracy}, {"auc", r.eval.roc_auc}};
    Json fair;
    if (r.fairness.disparate_impact) {
      fair["di"] = *r.fairness.disparate_impact;
    } else {
      fair["di"] = nullptr;
    }
    fair["dpd"] = r.fairness.demographic_parity_diff;
    fair["eod"] = r.fairness.equalized_odds_diff;
    fair["tpr_gap"] = r.fairness.tpr_gap;
    fair["fpr_gap"] = r.fairness.fpr_gap;
    c["fairness"] = fair;
    c["importances"] = ImportanceObject(r.feature_names, r.importances);
    Json div = Json::array();
    for (const FeatureDivergence& d : r.divergence) {
      Json e;
      e["feature"] = d.feature;
      if (std::isfinite(d.t)) {
        e["t"] = d.t;
      } else {
        e["t"] = nullptr;
        e["t_flag"] = d.t > 0 ? "+inf" : "-inf";
      }
      e["mean_male"] = d.mean_male;
      e["mean_female"] = d.mean_female;
      e["n_male"] = d.n_male;
      e["n_female"] = d.n_female;
      div.push_back(e);
    }
    c["divergence"] = div;
    c["local_accuracy_max_error"] = r.max_local_accuracy_error;
    const LeakageReport& lk = r.leakage;
    Json attack;
    attack["model"] = ModelKindName(lk.model_kind);
    attack["balancing"] = BalancingName(lk.balancing.kind);
    attack["auc"] = lk.attacker_auc;
    attack["accuracy"] = lk.attacker_accuracy;
    attack["importances"] =
        ImportanceObject(lk.feature_names, lk.proxy_importances);
    attack["local_accuracy_max_error"] = lk.max_local_accuracy_error;
    c["leakage"] = {{AttackFeatureSetName(lk.feature_set), attack}};
    configs.push_back(c);
  }
  root["configs"] = configs;
  return root.dump(2) + "\n";
}

std::string metrics_csv(const AuditReport& report) {
  std::string out = "config,accuracy,auc,di,dpd,eod\n";
  for (const ConfigResult& r : report.results) {
    out += std::to_string(r.config.id) + "," + format_sig6(r.eval.accuracy) +
           "," + format_sig6(r.eval.roc_auc) + "," +
           (r.fairness.disparate_impact
                ? format_sig6(*r.fairness.disparate_impact)
                : std::string("NA")) +
           "," + format_sig6(r.fairness.demographic_parity_diff) + "," +
           format_sig6(r.fairness.equalized_odds_diff) + "\n";
  }
  return out;
}

std::string shap_financial_csv(const AuditReport& report) {
  std::vector<const ConfigResult*> cols;
  for (const auto& r : report.results) {
    if (r.config.feature_set == FeatureSet::kFinancialOnly) cols.push_back(&r);
  }
  std::string out = "feature";
  for (const auto* r : cols) out += ",config_" + std::to_string(r->config.id);
  out += "\n";
  for (const auto& name : FinancialFeatureNames()) {
    out += name;
    for (const auto* r : cols) {
      out += "," + CsvCell(ValueFor(r->feature_names, r->importances, name));
    }
    out += "\n";
  }
  return out;
}

std::string divergence_csv(const AuditReport& report) {
  std::vector<const ConfigResult*> cols;
  for (const auto& r : report.results) {
    if (r.config.feature_set == FeatureSet::kWithNonFinancial) {
      cols.push_back(&r);
    }
  }
  std::string out = "feature";
  for (const auto* r : cols) out += ",config_" + std::to_string(r->config.id);
  out += "\n";
  for (const char* name : kDemographicFeatures) {
    out += name;
    for (const auto* r : cols) {
      double t = std::nan("");
      for (const auto& d : r->divergence) {
        if (d.feature == name) t = d.t;
      }
      out += "," + CsvCell(t);
    }
    out += "\n";
  }
  return out;
}

std::string leakage_financial_csv(const AuditReport& report) {
  std::string out = "feature";
  for (const auto& r : report.results) {
    out += ",config_" + std::to_string(r.config.id);
  }
  out += "\n";
  for (const auto& name : FinancialFeatureNames()) {
    out += name;
    for (const auto& r : report.results) {
      out += "," + CsvCell(ValueFor(r.leakage.feature_names,
                                    r.leakage.proxy_importances, name));
    }
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(
    const AuditReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "cannot create output directory '" +
                                    out_dir.string() + "': " + ec.message());
  }
  const std::pair<const char*, std::string> files[] = {
      {"audit.json", report_to_json(report)},
      {"metrics.csv", metrics_csv(report)},
      {"shap_financial.csv", shap_financial_csv(report)},
      {"divergence.csv", divergence_csv(report)},
      {"leakage_financial.csv", leakage_financial_csv(report)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    const auto path = out_dir / name;
    WriteFile(path, content);
    written.push_back(path);
  }
  return written;
}

}  // namespace fairaudit
