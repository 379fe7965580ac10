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

#include "fairaudit/models.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "fairaudit/error.h"

namespace fairaudit {

namespace {

// log(1 + exp(m)) without overflow.
double Softplus(double m) {
  return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

void CheckTrainable(const BalancedTrainSet& bt) {
  if (bt.weights.size() != bt.data.rows()) {
    throw Error(ErrorKind::kSchema, "weights length does not match row count");
  }
  double mass[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < bt.data.rows(); ++i) {
    if (!(bt.weights[i] > 0.0)) {
      throw Error(ErrorKind::kArgument, "instance weights must be positive");
    }
    mass[bt.data.labels()[i]] += bt.weights[i];
  }
  if (mass[0] <= 0.0 || mass[1] <= 0.0) {
    throw Error(ErrorKind::kDegenerate,
                "training requires positive weight mass in both classes");
  }
}

void CheckColumns(std::size_t expected, const TabularDataset& X) {
  if (X.cols() != expected) {
    throw Error(ErrorKind::kSchema,
                "model expects " + std::to_string(expected) +
                    " columns, input has " + std::to_string(X.cols()));
  }
}

// Per-node accumulators for one boosting round.
struct NodeStats {
  double grad = 0.0;
  double hess = 0.0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

double LeafWeight(const NodeStats& s, double lambda) {
  return -s.grad / (s.hess + lambda);
}

double Score(double g, double h, double lambda) { return g * g / (h + lambda); }

// Grows one depth-limited tree level by level with exact greedy search.
// `sorted` holds, per feature, row indices ordered by (value, row).
RegressionTree GrowTree(const std::vector<std::vector<double>>& columns,
                        const std::vector<std::vector<std::uint32_t>>& sorted,
                        std::span<const double> grad,
                        std::span<const double> hess,
                        std::span<const double> inst_weight,
                        const BoostingParams& p) {
  const std::size_t n = grad.size();
  const std::size_t m = columns.size();
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<int> node_of(n, 0);
  std::vector<NodeStats> stats(1);
  for (std::size_t i = 0; i < n; ++i) {
    stats[0].grad += grad[i];
    stats[0].hess += hess[i];
  }
  std::vector<int> frontier = {0};

  for (int depth = 0; depth < p.max_depth && !frontier.empty(); ++depth) {
    const int first_node = frontier.front();
    const int n_frontier = static_cast<int>(frontier.size());
    // Frontier nodes are contiguous in creation order.
    auto local = [&](int node) { return node - first_node; };
    std::vector<SplitCandidate> best(n_frontier);

    struct ScanState {
      double gl = 0.0;
      double hl = 0.0;
      double last = 0.0;
      bool seen = false;
    };
    std::vector<ScanState> scan(n_frontier);
    for (std::size_t f = 0; f < m; ++f) {
      std::fill(scan.begin(), scan.end(), ScanState{});
      const auto& col = columns[f];
      for (std::uint32_t row : sorted[f]) {
        const int node = node_of[row];
        if (node < first_node) continue;
        const int k = local(node);
        ScanState& st = scan[k];
        const double v = col[row];
        if (st.seen && v > st.last) {
          const NodeStats& tot = stats[node];
          const double gr = tot.grad - st.gl;
          const double hr = tot.hess - st.hl;
          if (st.hl >= p.min_child_weight && hr >= p.min_child_weight) {
            const double gain = Score(st.gl, st.hl, p.lambda_l2) +
                                Score(gr, hr, p.lambda_l2) -
                                Score(tot.grad, tot.hess, p.lambda_l2);
            if (gain > best[k].gain) {
              double thr = st.last + (v - st.last) / 2.0;
              if (!(thr > st.last)) thr = v;
              best[k] = {gain, static_cast<int>(f), thr};
            }
          }
        }
        st.gl += grad[row];
        st.hl += hess[row];
        st.last = v;
        st.seen = true;
      }
    }

    std::vector<int> next;
    std::vector<int> remap(n_frontier, -1);
    for (int k = 0; k < n_frontier; ++k) {
      if (best[k].feature < 0) continue;
      const int node = frontier[k];
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[node];
      parent.feature = best[k].feature;
      parent.threshold = best[k].threshold;
      parent.gain = best[k].gain;
      parent.left = left;
      parent.right = left + 1;
      stats.resize(tree.nodes.size());
      next.push_back(left);
      next.push_back(left + 1);
      remap[k] = left;
    }
    // Route rows of split nodes to their children.
    for (std::size_t i = 0; i < n; ++i) {
      const int node = node_of[i];
      if (node < first_node) continue;
      const int left = remap[local(node)];
      if (left < 0) {
        node_of[i] = -1 - node;  // parked in a finished leaf
        continue;
      }
      const TreeNode& parent = tree.nodes[node];
      const int child =
          columns[parent.feature][i] < parent.threshold ? left : left + 1;
      node_of[i] = child;
      stats[child].grad += grad[i];
      stats[child].hess += hess[i];
    }
    frontier = std::move(next);
  }

  // Finalize leaves and covers.
  for (std::size_t i = 0; i < n; ++i) {
    const int node = node_of[i] >= 0 ? node_of[i] : -1 - node_of[i];
    tree.nodes[node].cover += inst_weight[i];
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    TreeNode& node = tree.nodes[k];
    if (node.is_leaf()) node.value = LeafWeight(stats[k], p.lambda_l2);
  }
  // Children are always created after their parent, so a reverse sweep sees
  // children first.
  for (std::size_t k = tree.nodes.size(); k-- > 0;) {
    TreeNode& node = tree.nodes[k];
    if (!node.is_leaf()) {
      node.cover = tree.nodes[node.left].cover + tree.nodes[node.right].cover;
    }
  }
  return tree;
}

void DumpNode(const RegressionTree& tree, int index,
              std::span<const std::string> names, int depth,
              std::string& out) {
  const TreeNode& node = tree.nodes[index];
  char buf[256];
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  if (node.is_leaf()) {
    std::snprintf(buf, sizeof(buf), "leaf value=%.17g cover=%.17g\n",
                  node.value, node.cover);
    out += buf;
    return;
  }
  const std::string name =
      static_cast<std::size_t>(node.feature) < names.size()
          ? names[node.feature]
          : "f" + std::to_string(node.feature);
  std::snprintf(buf, sizeof(buf),
                "split feature=%s threshold=%.17g cover=%.17g gain=%.17g\n",
                name.c_str(), node.threshold, node.cover, node.gain);
  out += buf;
  DumpNode(tree, node.left, names, depth + 1, out);
  DumpNode(tree, node.right, names, depth + 1, out);
}

}  // namespace

double sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

double RegressionTree::predict(std::span<const double> x) const {
  return nodes[leaf_index(x)].value;
}

int RegressionTree::leaf_index(std::span<const double> x) const {
  int k = 0;
  while (!nodes[k].is_leaf()) {
    k = x[nodes[k].feature] < nodes[k].threshold ? nodes[k].left
                                                 : nodes[k].right;
  }
  return k;
}

int RegressionTree::depth() const {
  std::function<int(int)> rec = [&](int k) -> int {
    if (nodes[k].is_leaf()) return 0;
    return 1 + std::max(rec(nodes[k].left), rec(nodes[k].right));
  };
  return nodes.empty() ? 0 : rec(0);
}

LogisticObjective logistic_objective(const BalancedTrainSet& bt,
                                     std::span<const double> weights,
                                     double intercept, double l2_penalty) {
  const TabularDataset& ds = bt.data;
  const std::size_t m = ds.cols();
  LogisticObjective obj;
  obj.grad_weights.assign(m, 0.0);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto x = ds.row(i);
    double margin = intercept;
    for (std::size_t j = 0; j < m; ++j) margin += weights[j] * x[j];
    const double y = ds.labels()[i];
    const double w = bt.weights[i];
    obj.loss += w * (Softplus(margin) - y * margin);
    const double r = w * (sigmoid(margin) - y);
    for (std::size_t j = 0; j < m; ++j) obj.grad_weights[j] += r * x[j];
    obj.grad_intercept += r;
    total_weight += w;
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    sq += weights[j] * weights[j];
    obj.grad_weights[j] =
        (obj.grad_weights[j] + l2_penalty * weights[j]) / total_weight;
  }
  obj.loss = (obj.loss + 0.5 * l2_penalty * sq) / total_weight;
  obj.grad_intercept /= total_weight;
  return obj;
}

LinearModel fit_logistic(const BalancedTrainSet& bt, const Hyperparams& hp,
                         std::uint64_t /*seed*/, FitTrace* trace) {
  CheckTrainable(bt);
  const LogisticParams& p = hp.lr;
  const std::size_t m = bt.data.cols();
  std::vector<double> w(m, 0.0);
  double b = 0.0;
  double step = p.learning_rate;

  LogisticObjective cur = logistic_objective(bt, w, b, p.l2_penalty);
  if (trace) trace->loss.push_back(cur.loss);
  std::vector<double> w_next(m);
  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    double max_grad = std::abs(cur.grad_intercept);
    for (double g : cur.grad_weights) max_grad = std::max(max_grad, std::abs(g));
    if (max_grad < p.tolerance) break;

    // Shrink the step until the objective does not increase.
    while (true) {
      for (std::size_t j = 0; j < m; ++j) {
        w_next[j] = w[j] - step * cur.grad_weights[j];
      }
      const double b_next = b - step * cur.grad_intercept;
      LogisticObjective cand =
          logistic_objective(bt, w_next, b_next, p.l2_penalty);
      if (!std::isfinite(cand.loss)) {
        throw Error(ErrorKind::kDivergence,
                    "logistic regression loss became non-finite; lower the "
                    "learning rate");
      }
      if (cand.loss <= cur.loss) {
        w.swap(w_next);
        b = b_next;
        cur = std::move(cand);
        if (trace) trace->loss.push_back(cur.loss);
        break;
      }
      step /= 2.0;
      if (step < 1e-15) {
        epoch = p.max_epochs;  // no descent direction left at this precision
        break;
      }
    }
  }
  return LinearModel{std::move(w), b, {}};
}

double weighted_log_loss(std::span<const double> probabilities,
                         std::span<const std::uint8_t> labels,
                         std::span<const double> weights) {
  double total = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], 1e-300, 1.0 - 1e-16);
    total -= weights[i] * (labels[i] ? std::log(p) : std::log1p(-p));
    mass += weights[i];
  }
  return total / mass;
}

TreeEnsemble fit_gbt(const BalancedTrainSet& bt, const Hyperparams& hp,
                     std::uint64_t /*seed*/, FitTrace* trace) {
  CheckTrainable(bt);
  const TabularDataset& ds = bt.data;
  const BoostingParams& p = hp.gbt;
  const std::size_t n = ds.rows();
  const std::size_t m = ds.cols();
  if (n < 2) throw Error(ErrorKind::kDegenerate, "need at least 2 rows");

  double pos = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pos += bt.weights[i] * ds.labels()[i];
    total += bt.weights[i];
  }
  const double base_rate = pos / total;

  TreeEnsemble model;
  model.learning_rate = p.learning_rate;
  model.base_score = std::log(base_rate / (1.0 - base_rate));
  model.n_features = m;

  std::vector<std::vector<double>> columns(m, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) columns[j][i] = ds.at(i, j);
  }
  std::vector<std::vector<std::uint32_t>> sorted(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& order = sorted[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    const auto& col = columns[j];
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return col[a] < col[b];
                     });
  }

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<double> prob(n);
  auto record_loss = [&] {
    if (!trace) return;
    for (std::size_t i = 0; i < n; ++i) prob[i] = sigmoid(margin[i]);
    trace->loss.push_back(weighted_log_loss(prob, ds.labels(), bt.weights));
  };
  record_loss();
  for (int t = 0; t < p.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pr = sigmoid(margin[i]);
      grad[i] = bt.weights[i] * (pr - ds.labels()[i]);
      hess[i] = bt.weights[i] * pr * (1.0 - pr);
    }
    RegressionTree tree = GrowTree(columns, sorted, grad, hess, bt.weights, p);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += p.learning_rate * tree.predict(ds.row(i));
    }
    model.trees.push_back(std::move(tree));
    record_loss();
  }
  return model;
}

Prediction predict(const LinearModel& model, const TabularDataset& X) {
  CheckColumns(model.weights.size(), X);
  Prediction out;
  out.margins.resize(X.rows());
  out.probabilities.resize(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    double margin = model.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) margin += model.weights[j] * x[j];
    out.margins[i] = margin;
    out.probabilities[i] = sigmoid(margin);
  }
  return out;
}

Prediction predict(const TreeEnsemble& model, const TabularDataset& X) {
  CheckColumns(model.n_features, X);
  Prediction out;
  out.margins.resize(X.rows());
  out.probabilities.resize(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto x = X.row(i);
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.predict(x);
    out.margins[i] = model.base_score + model.learning_rate * sum;
    out.probabilities[i] = sigmoid(out.margins[i]);
  }
  return out;
}

Prediction predict(const Model& model, const TabularDataset& X) {
  return std::visit([&](const auto& m) { return predict(m, X); }, model);
}

std::vector<std::uint8_t> classify(std::span<const double> probabilities,
                                   double threshold) {
  std::vector<std::uint8_t> out(probabilities.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = probabilities[i] >= threshold ? 1 : 0;
  }
  return out;
}

double accuracy(std::span<const double> scores,
                std::span<const std::uint8_t> labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kSchema, "scores and labels differ in length");
  }
  if (scores.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    correct += (scores[i] >= threshold ? 1 : 0) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double roc_auc(std::span<const double> scores,
               std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kSchema, "scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Sum of 1-based mid-ranks of positives, doubled to stay integral.
  double rank_sum_x2 = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    const double mid_rank_x2 = static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) {
      if (labels[order[k]]) {
        rank_sum_x2 += mid_rank_x2;
        ++n_pos;
      }
    }
    start = end;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorKind::kUndefinedMetric,
                "ROC-AUC is undefined when only one class is present");
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum_x2 / 2.0 - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

EvalMetrics evaluate(std::span<const double> scores,
                     std::span<const std::uint8_t> labels, double threshold) {
  return {accuracy(scores, labels, threshold), roc_auc(scores, labels)};
}

std::string dump_model(const TreeEnsemble& model,
                       std::span<const std::string> feature_names) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "base_score=%.17g learning_rate=%.17g\n",
                model.base_score, model.learning_rate);
  out += buf;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    out += "tree " + std::to_string(t) + "\n";
    DumpNode(model.trees[t], 0, feature_names, 1, out);
  }
  return out;
}

}  // namespace fairaudit
