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

#include "fairaudit/attribution.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "fairaudit/error.h"

namespace fairaudit {

namespace {

// One entry of the feature path tracked by TreeSHAP. `weight` is the
// proportion of coalition orderings of each size that reach this path.
struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

void ExtendPath(PathElement* path, int depth, double zero_fraction,
                double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].weight +=
        one_fraction * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight =
        zero_fraction * path[i].weight * (depth - i) / static_cast<double>(depth + 1);
  }
}

void UnwindPath(PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next * (depth + 1) / ((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) /
                       static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

// Total path weight after removing element `index`, without modifying it.
double UnwoundPathSum(const PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  double total = 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = next * (depth + 1) / ((i + 1) * one);
      total += tmp;
      next = path[i].weight -
             tmp * zero * (depth - i) / static_cast<double>(depth + 1);
    } else if (zero != 0.0) {
      total += path[i].weight / zero /
               ((depth - i) / static_cast<double>(depth + 1));
    }
  }
  return total;
}

void Recurse(const RegressionTree& tree, std::span<const double> x,
             std::span<double> phi, int node_index, PathElement* parent_path,
             int depth, double zero_fraction, double one_fraction,
             int feature) {
  PathElement* path = parent_path + depth + 1;
  std::copy(parent_path, parent_path + depth + 1, path);
  ExtendPath(path, depth, zero_fraction, one_fraction, feature);

  const TreeNode& node = tree.nodes[node_index];
  if (node.is_leaf()) {
    for (int i = 1; i <= depth; ++i) {
      const double w = UnwoundPathSum(path, depth, i);
      const PathElement& el = path[i];
      phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * node.value;
    }
    return;
  }

  const int hot = x[node.feature] < node.threshold ? node.left : node.right;
  const int cold = hot == node.left ? node.right : node.left;
  const double hot_fraction = tree.nodes[hot].cover / node.cover;
  const double cold_fraction = tree.nodes[cold].cover / node.cover;

  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  int index = 0;
  while (index <= depth && path[index].feature != node.feature) ++index;
  if (index <= depth) {
    // Feature already on the path: undo that split before redoing it here.
    incoming_zero = path[index].zero_fraction;
    incoming_one = path[index].one_fraction;
    UnwindPath(path, depth, index);
    --depth;
  }
  Recurse(tree, x, phi, hot, path, depth + 1, hot_fraction * incoming_zero,
          incoming_one, node.feature);
  Recurse(tree, x, phi, cold, path, depth + 1, cold_fraction * incoming_zero,
          0.0, node.feature);
}

AttributionMatrix EmptyMatrix(const TabularDataset& X) {
  AttributionMatrix am;
  am.rows = X.rows();
  am.feature_names = X.feature_names();
  am.values.assign(X.rows() * X.cols(), 0.0);
  return am;
}

}  // namespace

AttributionMatrix linear_shap(const LinearModel& model,
                              const TabularDataset& X,
                              std::span<const double> mu) {
  const std::size_t m = model.weights.size();
  if (X.cols() != m || mu.size() != m) {
    throw Error(ErrorKind::kSchema,
                "linear SHAP: weights, reference and input columns differ");
  }
  AttributionMatrix am = EmptyMatrix(X);
  am.baseline = model.intercept;
  for (std::size_t j = 0; j < m; ++j) am.baseline += model.weights[j] * mu[j];
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      am.values[i * m + j] = model.weights[j] * (X.at(i, j) - mu[j]);
    }
  }
  return am;
}

double expected_value(const RegressionTree& tree) {
  // Reverse creation order visits children before parents.
  std::vector<double> ev(tree.nodes.size());
  for (std::size_t k = tree.nodes.size(); k-- > 0;) {
    const TreeNode& node = tree.nodes[k];
    if (node.is_leaf()) {
      ev[k] = node.value;
    } else {
      ev[k] = (tree.nodes[node.left].cover * ev[node.left] +
               tree.nodes[node.right].cover * ev[node.right]) /
              node.cover;
    }
  }
  return ev.empty() ? 0.0 : ev[0];
}

void tree_shap_single(const RegressionTree& tree, std::span<const double> x,
                      std::span<double> phi) {
  const int max_depth = tree.depth() + 2;
  std::vector<PathElement> storage(
      static_cast<std::size_t>((max_depth + 1) * (max_depth + 2) / 2));
  Recurse(tree, x, phi, 0, storage.data(), 0, 1.0, 1.0, -1);
}

AttributionMatrix tree_shap(const TreeEnsemble& model,
                            const TabularDataset& X) {
  if (X.cols() != model.n_features) {
    throw Error(ErrorKind::kSchema,
                "tree SHAP: input column count does not match the model");
  }
  AttributionMatrix am = EmptyMatrix(X);
  double expected = 0.0;
  for (const auto& tree : model.trees) expected += expected_value(tree);
  am.baseline = model.base_score + model.learning_rate * expected;

  const std::size_t m = X.cols();
  std::vector<double> phi(m);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    std::fill(phi.begin(), phi.end(), 0.0);
    for (const auto& tree : model.trees) tree_shap_single(tree, X.row(i), phi);
    for (std::size_t j = 0; j < m; ++j) {
      am.values[i * m + j] = model.learning_rate * phi[j];
    }
  }
  return am;
}

AttributionMatrix attribute(const Model& model, const TabularDataset& X,
                            std::span<const double> mu) {
  if (const auto* linear = std::get_if<LinearModel>(&model)) {
    return linear_shap(*linear, X, mu);
  }
  return tree_shap(std::get<TreeEnsemble>(model), X);
}

std::vector<double> brute_force_shapley(const CoalitionValue& value_fn,
                                        int n_features) {
  if (n_features < 0 || n_features > 15) {
    throw Error(ErrorKind::kBound,
                "brute-force Shapley supports at most 15 features");
  }
  const std::uint32_t n_masks = 1u << n_features;
  std::vector<double> v(n_masks);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) v[mask] = value_fn(mask);

  // weight[s] = s! (n - s - 1)! / n!
  std::vector<double> weight(static_cast<std::size_t>(std::max(n_features, 1)));
  for (int s = 0; s < n_features; ++s) {
    weight[s] = std::exp(std::lgamma(s + 1.0) +
                         std::lgamma(n_features - s + 0.0) -
                         std::lgamma(n_features + 1.0));
  }
  std::vector<double> phi(n_features, 0.0);
  for (int j = 0; j < n_features; ++j) {
    const std::uint32_t bit = 1u << j;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      const int size = std::popcount(mask);
      phi[j] += weight[size] * (v[mask | bit] - v[mask]);
    }
  }
  return phi;
}

std::vector<double> normalize_importance(const AttributionMatrix& am) {
  if (am.rows == 0) {
    throw Error(ErrorKind::kDegenerate, "no rows to aggregate importance over");
  }
  const std::size_t m = am.cols();
  std::vector<double> imp(m, 0.0);
  for (std::size_t i = 0; i < am.rows; ++i) {
    for (std::size_t j = 0; j < m; ++j) imp[j] += std::abs(am.value(i, j));
  }
  double total = 0.0;
  for (double& v : imp) {
    v /= static_cast<double>(am.rows);
    total += v;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kDegenerate,
                "all attributions are zero; importance cannot be normalized");
  }
  for (double& v : imp) v /= total;
  return imp;
}

double welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorKind::kDegenerate,
                "Welch t needs at least 2 observations per cohort");
  }
  auto moments = [](std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double se2 = va / static_cast<double>(a.size()) +
                     vb / static_cast<double>(b.size());
  const double diff = ma - mb;
  if (se2 == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  }
  return diff / std::sqrt(se2);
}

CohortDivergence cohort_t_statistics(const AttributionMatrix& am,
                                     std::span<const std::uint8_t> group) {
  if (group.size() != am.rows) {
    throw Error(ErrorKind::kSchema, "group length does not match attributions");
  }
  CohortDivergence out;
  std::vector<double> male;
  std::vector<double> female;
  for (std::size_t j = 0; j < am.cols(); ++j) {
    male.clear();
    female.clear();
    for (std::size_t i = 0; i < am.rows; ++i) {
      (group[i] ? female : male).push_back(std::abs(am.value(i, j)));
    }
    FeatureDivergence d;
    d.feature = am.feature_names[j];
    d.t = welch_t(male, female);
    d.n_male = male.size();
    d.n_female = female.size();
    for (double v : male) d.mean_male += v;
    for (double v : female) d.mean_female += v;
    d.mean_male /= static_cast<double>(male.size());
    d.mean_female /= static_cast<double>(female.size());
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace fairaudit
