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

#ifndef FAIRAUDIT_MODELS_H_
#define FAIRAUDIT_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairaudit/balance.h"
#include "fairaudit/data.h"

namespace fairaudit {

struct LogisticParams {
  double l2_penalty = 1.0;
  double learning_rate = 0.1;
  int max_epochs = 2000;
  double tolerance = 1e-6;
};

struct BoostingParams {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double min_child_weight = 1.0;
  double lambda_l2 = 1.0;
};

struct Hyperparams {
  LogisticParams lr;
  BoostingParams gbt;
  int smote_k = 5;
};

struct LinearModel {
  // Per-feature weights in standardized space.
  std::vector<double> weights;
  double intercept = 0.0;
  ScalingParams scaling;
};

// One node of a regression tree. Leaves have feature == -1. Rows go left
// iff x[feature] < threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Training instance-weight mass reaching the node.
  double cover = 0.0;
  // Leaf output on the log-odds scale (before shrinkage).
  double value = 0.0;
  // Split gain at construction time; zero for leaves.
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

// Nodes stored in creation order; index 0 is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int leaf_index(std::span<const double> x) const;
  int depth() const;
};

struct TreeEnsemble {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;
  std::size_t n_features = 0;
};

using Model = std::variant<LinearModel, TreeEnsemble>;

struct Prediction {
  std::vector<double> margins;
  std::vector<double> probabilities;
};

struct EvalMetrics {
  double accuracy = 0.0;
  double roc_auc = 0.0;
};

// Optional training diagnostics.
struct FitTrace {
  // Objective value after every accepted step (LR) or boosting round (GBT),
  // starting with the initial model.
  std::vector<double> loss;
};

double sigmoid(double margin);

// Weighted, L2-regularized logistic objective used by fit_logistic:
//   (1/W) sum_i w_i * logloss_i + l2 / (2W) * ||weights||^2
// with W the total instance weight. The intercept is not penalized.
struct LogisticObjective {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_intercept = 0.0;
};

LogisticObjective logistic_objective(const BalancedTrainSet& bt,
                                     std::span<const double> weights,
                                     double intercept, double l2_penalty);

LinearModel fit_logistic(const BalancedTrainSet& bt, const Hyperparams& hp,
                         std::uint64_t seed, FitTrace* trace = nullptr);

TreeEnsemble fit_gbt(const BalancedTrainSet& bt, const Hyperparams& hp,
                     std::uint64_t seed, FitTrace* trace = nullptr);

// Weighted mean log-loss of probabilities against labels.
double weighted_log_loss(std::span<const double> probabilities,
                         std::span<const std::uint8_t> labels,
                         std::span<const double> weights);

Prediction predict(const LinearModel& model, const TabularDataset& X);
Prediction predict(const TreeEnsemble& model, const TabularDataset& X);
Prediction predict(const Model& model, const TabularDataset& X);

// Hard labels: 1 iff probability >= threshold.
std::vector<std::uint8_t> classify(std::span<const double> probabilities,
                                   double threshold = 0.5);

double accuracy(std::span<const double> scores,
                std::span<const std::uint8_t> labels, double threshold);

// Mann-Whitney ROC-AUC with mid-ranks for ties. Throws kUndefinedMetric if
// either class is absent.
double roc_auc(std::span<const double> scores,
               std::span<const std::uint8_t> labels);

EvalMetrics evaluate(std::span<const double> scores,
                     std::span<const std::uint8_t> labels,
                     double threshold = 0.5);

// Plain-text dump: one block per tree, nodes in pre-order, one line each.
std::string dump_model(const TreeEnsemble& model,
                       std::span<const std::string> feature_names);

}  // namespace fairaudit

#endif  // FAIRAUDIT_MODELS_H_
