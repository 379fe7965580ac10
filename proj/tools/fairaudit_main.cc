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

// Command-line front end: audit, leakage, synth and validate.
//
// Exit codes: 0 success, 1 internal failure, 2 user or input error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairaudit/data.h"
#include "fairaudit/error.h"
#include "fairaudit/leakage.h"
#include "fairaudit/pipeline.h"
#include "json.hpp"

namespace {

using fairaudit::Error;
using fairaudit::ErrorKind;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kArgument, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

std::vector<int> ParseIdList(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      ids.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kArgument, "invalid configuration id '" + item + "'");
    }
  }
  return ids;
}

fairaudit::Hyperparams LoadHyperparams(const std::string& path) {
  if (path.empty()) return {};
  return fairaudit::parse_hyperparams(ReadFile(path));
}

struct AuditArgs {
  std::string data;
  std::string out;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  std::string configs;
  std::string hp;
  int jobs = 1;
};

int RunAudit(const AuditArgs& a) {
  const fairaudit::TabularDataset ds = fairaudit::load_csv(a.data);
  fairaudit::AuditOptions options;
  options.seed = a.seed;
  options.test_fraction = a.test_fraction;
  options.config_ids = ParseIdList(a.configs);
  options.hp = LoadHyperparams(a.hp);
  options.jobs = a.jobs;
  fairaudit::AuditReport report = fairaudit::run_audit(ds, options);
  report.invocation.insert(report.invocation.begin(),
                           {{"command", "audit"}, {"data", a.data}});
  const auto files = fairaudit::emit_report(report, a.out);
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  return kExitOk;
}

struct LeakageArgs {
  std::string data;
  std::string out;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  std::string feature_set = "demo";
  std::string model = "gbt";
  std::string balancing = "weight";
  std::string hp;
};

int RunLeakage(const LeakageArgs& a) {
  const fairaudit::TabularDataset ds = fairaudit::load_csv(a.data);
  const fairaudit::Hyperparams hp = LoadHyperparams(a.hp);
  const auto afs = a.feature_set == "demo"
                       ? fairaudit::AttackFeatureSet::kDemographicPlusFinancial
                       : fairaudit::AttackFeatureSet::kFinancialOnly;
  const auto kind = a.model == "lr" ? fairaudit::ModelKind::kLinear
                                    : fairaudit::ModelKind::kBoostedTrees;
  fairaudit::BalancingStrategy balancing =
      a.balancing == "weight"  ? fairaudit::BalancingStrategy::ClassWeight()
      : a.balancing == "smote" ? fairaudit::BalancingStrategy::Smote(hp.smote_k)
                               : fairaudit::BalancingStrategy::Subsample();

  const auto parts = fairaudit::split(ds, a.test_fraction, a.seed);
  const fairaudit::LeakageReport report = fairaudit::run_attack(
      parts.train, parts.test, afs, kind, balancing, hp, a.seed);

  nlohmann::ordered_json j;
  j["version"] = fairaudit::kReportSchemaVersion;
  j["invocation"] = {{"command", "leakage"},
                     {"data", a.data},
                     {"seed", a.seed},
                     {"test_fraction", a.test_fraction},
                     {"feature_set", a.feature_set},
                     {"model", a.model},
                     {"balancing", a.balancing}};
  j["feature_set"] = fairaudit::AttackFeatureSetName(report.feature_set);
  j["model"] = fairaudit::ModelKindName(report.model_kind);
  j["balancing"] = fairaudit::BalancingName(report.balancing.kind);
  j["auc"] = report.attacker_auc;
  j["accuracy"] = report.attacker_accuracy;
  nlohmann::ordered_json ranked = nlohmann::ordered_json::array();
  for (const auto& [name, value] :
       fairaudit::rank_proxies(report, static_cast<int>(
                                           report.feature_names.size()))) {
    ranked.push_back({{"feature", name}, {"importance", value}});
  }
  j["proxies"] = ranked;
  const auto path = std::filesystem::path(a.out) / "leakage.json";
  WriteFile(path, j.dump(2) + "\n");
  std::printf("attacker auc=%.4f accuracy=%.4f\nwrote %s\n",
              report.attacker_auc, report.attacker_accuracy,
              path.string().c_str());
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  std::size_t rows = 10000;
  double alpha = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 42;
  double gender_rate = 0.6;
  double default_rate = 0.22;
  int noise_features = 21;
};

int RunSynth(const SynthArgs& a) {
  fairaudit::SyntheticSpec spec;
  spec.n_rows = a.rows;
  spec.leakage_alpha = a.alpha;
  spec.noise_sigma = a.sigma;
  spec.gender_rate = a.gender_rate;
  spec.default_rate = a.default_rate;
  spec.n_noise_features = a.noise_features;
  const auto ds = fairaudit::generate_synthetic(spec, a.seed);
  WriteFile(a.out, fairaudit::to_canonical_csv(ds));
  std::cout << "wrote " << a.out << " (" << ds.rows() << " rows)\n";
  return kExitOk;
}

int RunValidate(const std::string& data) {
  const fairaudit::TabularDataset ds = fairaudit::load_csv(data);
  std::size_t female = 0;
  for (auto g : ds.group()) female += g;
  std::printf("rows: %zu\ncolumns: %zu\npositive_rate: %.4f\n", ds.rows(),
              ds.cols(), ds.positive_rate());
  std::printf("male: %zu\nfemale: %zu\n", ds.rows() - female, female);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairaudit: fairness, attribution and proxy-leakage audit "
               "for credit-default models"};
  app.require_subcommand(1);

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "run the audit configurations");
  audit_cmd->add_option("--data", audit.data, "input CSV")->required();
  audit_cmd->add_option("--out", audit.out, "output directory")->required();
  audit_cmd->add_option("--seed", audit.seed, "base seed");
  audit_cmd->add_option("--test-fraction", audit.test_fraction)
      ->check(CLI::Range(0.0, 1.0));
  audit_cmd->add_option("--configs", audit.configs,
                        "comma-separated configuration ids (default: all)");
  audit_cmd->add_option("--hp", audit.hp, "hyperparameter file");
  audit_cmd->add_option("--jobs", audit.jobs, "parallel configurations")
      ->check(CLI::PositiveNumber);

  LeakageArgs leak;
  auto* leak_cmd = app.add_subcommand("leakage", "run one attribute-inference attack");
  leak_cmd->add_option("--data", leak.data, "input CSV")->required();
  leak_cmd->add_option("--out", leak.out, "output directory")->required();
  leak_cmd->add_option("--seed", leak.seed, "seed");
  leak_cmd->add_option("--test-fraction", leak.test_fraction)
      ->check(CLI::Range(0.0, 1.0));
  leak_cmd->add_option("--feature-set", leak.feature_set)
      ->check(CLI::IsMember({"demo", "fin"}));
  leak_cmd->add_option("--model", leak.model)->check(CLI::IsMember({"lr", "gbt"}));
  leak_cmd->add_option("--balancing", leak.balancing)
      ->check(CLI::IsMember({"weight", "smote", "sub"}));
  leak_cmd->add_option("--hp", leak.hp, "hyperparameter file");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic calibration CSV");
  synth_cmd->add_option("--out", synth.out, "output CSV path")->required();
  synth_cmd->add_option("--rows", synth.rows);
  synth_cmd->add_option("--alpha", synth.alpha, "proxy mean shift between genders");
  synth_cmd->add_option("--sigma", synth.sigma, "proxy noise standard deviation");
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--gender-rate", synth.gender_rate);
  synth_cmd->add_option("--default-rate", synth.default_rate);
  synth_cmd->add_option("--noise-features", synth.noise_features);

  std::string validate_data;
  auto* validate_cmd = app.add_subcommand("validate", "check a CSV and summarize it");
  validate_cmd->add_option("--data", validate_data, "input CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*audit_cmd) return RunAudit(audit);
    if (*leak_cmd) return RunLeakage(leak);
    if (*synth_cmd) return RunSynth(synth);
    if (*validate_cmd) return RunValidate(validate_data);
  } catch (const Error& e) {
    std::cerr << "fairaudit: " << fairaudit::ErrorKindName(e.kind()) << ": "
              << e.what() << "\n";
    return e.is_input_error() ? kExitInput : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "fairaudit: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
