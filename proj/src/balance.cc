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

#include "fairaudit/balance.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "fairaudit/error.h"

namespace fairaudit {

namespace {

struct ClassCounts {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

ClassCounts CountClasses(const TabularDataset& ds) {
  ClassCounts c{ds.count_label(0), ds.count_label(1)};
  if (c.n0 == 0 || c.n1 == 0) {
    throw Error(ErrorKind::kDegenerate,
                "balancing requires both label classes to be present");
  }
  return c;
}

}  // namespace

const char* BalancingName(BalancingStrategy::Kind kind) {
  switch (kind) {
    case BalancingStrategy::Kind::kClassWeight: return "class_weight";
    case BalancingStrategy::Kind::kSmote: return "smote";
    case BalancingStrategy::Kind::kSubsample: return "subsample";
  }
  return "?";
}

BalancedTrainSet unit_weights(TabularDataset ds) {
  std::vector<double> w(ds.rows(), 1.0);
  return {std::move(ds), std::move(w), {}};
}

BalancedTrainSet class_weights(const TabularDataset& ds) {
  const ClassCounts c = CountClasses(ds);
  const double n = static_cast<double>(ds.rows());
  const double w0 = n / (2.0 * static_cast<double>(c.n0));
  const double w1 = n / (2.0 * static_cast<double>(c.n1));
  std::vector<double> w(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    w[i] = ds.labels()[i] ? w1 : w0;
  }
  return {ds, std::move(w), {}};
}

std::vector<double> interpolate(std::span<const double> base,
                                std::span<const double> neighbor,
                                double lambda,
                                std::span<const FeatureSpec> specs) {
  std::vector<double> out(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) {
    out[j] = base[j] + lambda * (neighbor[j] - base[j]);
    if (j < specs.size() && specs[j].integer_coded) {
      out[j] = std::round(out[j]);
    }
  }
  return out;
}

std::vector<std::size_t> nearest_neighbors(std::span<const double> points,
                                           std::size_t dim, std::size_t query,
                                           int k) {
  const std::size_t n = dim == 0 ? 0 : points.size() / dim;
  if (k < 1 || static_cast<std::size_t>(k) >= n) {
    throw Error(ErrorKind::kNeighbor,
                "need more than k=" + std::to_string(k) + " points, have " +
                    std::to_string(n));
  }
  const double* q = points.data() + query * dim;
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == query) continue;
    const double* p = points.data() + i * dim;
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = p[j] - q[j];
      d += diff * diff;
    }
    dist.emplace_back(d, i);
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<std::size_t> out(k);
  for (int i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

BalancedTrainSet smote(const TabularDataset& ds, int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::kArgument, "SMOTE k must be >= 1");
  const ClassCounts c = CountClasses(ds);
  const std::uint8_t minority = c.n1 < c.n0 ? 1 : 0;
  const std::size_t n_min = std::min(c.n0, c.n1);
  const std::size_t n_maj = std::max(c.n0, c.n1);
  if (n_min <= static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::kNeighbor,
                "minority class has " + std::to_string(n_min) +
                    " rows; SMOTE with k=" + std::to_string(k) +
                    " needs at least " + std::to_string(k + 1));
  }

  std::vector<std::size_t> minority_rows;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    if (ds.labels()[i] == minority) minority_rows.push_back(i);
  }
  // Distances are measured on z-scored features so large-scale columns do
  // not dominate; interpolation happens in original units.
  const ScalingParams sp = fit_scaling(ds);
  const std::size_t dim = ds.cols();
  std::vector<double> points(minority_rows.size() * dim);
  for (std::size_t r = 0; r < minority_rows.size(); ++r) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = ds.at(minority_rows[r], j);
      points[r * dim + j] =
          sp.stddev[j] > 0.0 ? (v - sp.mean[j]) / sp.stddev[j] : 0.0;
    }
  }

  std::vector<double> features = ds.features();
  std::vector<std::uint8_t> labels = ds.labels();
  std::optional<std::vector<std::uint8_t>> group = ds.maybe_group();
  std::vector<std::pair<std::size_t, std::size_t>> parents;
  std::vector<std::vector<std::size_t>> neighbor_cache(minority_rows.size());

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_base(0, n_min - 1);
  std::uniform_int_distribution<int> pick_neighbor(0, k - 1);
  std::uniform_real_distribution<double> pick_lambda(0.0, 1.0);
  const std::size_t needed = n_maj - n_min;
  for (std::size_t s = 0; s < needed; ++s) {
    const std::size_t b = pick_base(rng);
    auto& nn = neighbor_cache[b];
    if (nn.empty()) nn = nearest_neighbors(points, dim, b, k);
    const std::size_t z = nn[pick_neighbor(rng)];
    const double lambda = pick_lambda(rng);
    const std::size_t base_row = minority_rows[b];
    const std::size_t nb_row = minority_rows[z];
    const auto synth =
        interpolate(ds.row(base_row), ds.row(nb_row), lambda, ds.specs());
    features.insert(features.end(), synth.begin(), synth.end());
    labels.push_back(minority);
    // The group of a synthetic row is inherited from its base row.
    if (group) group->push_back((*group)[base_row]);
    parents.emplace_back(base_row, nb_row);
  }
  TabularDataset out(std::move(features), ds.specs(), std::move(labels),
                     std::move(group));
  std::vector<double> w(out.rows(), 1.0);
  return {std::move(out), std::move(w), std::move(parents)};
}

BalancedTrainSet subsample(const TabularDataset& ds, std::uint64_t seed) {
  const ClassCounts c = CountClasses(ds);
  const std::uint8_t majority = c.n1 > c.n0 ? 1 : 0;
  const std::size_t n_min = std::min(c.n0, c.n1);
  std::vector<std::size_t> keep;
  std::vector<std::size_t> majority_rows;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    if (ds.labels()[i] == majority) {
      majority_rows.push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(majority_rows.begin(), majority_rows.end(), rng);
  keep.insert(keep.end(), majority_rows.begin(),
              majority_rows.begin() + n_min);
  std::sort(keep.begin(), keep.end());
  return unit_weights(ds.take_rows(keep));
}

BalancedTrainSet apply_balancing(const TabularDataset& ds,
                                 const BalancingStrategy& strategy,
                                 std::uint64_t seed) {
  switch (strategy.kind) {
    case BalancingStrategy::Kind::kClassWeight: return class_weights(ds);
    case BalancingStrategy::Kind::kSmote:
      return smote(ds, strategy.smote_k, seed);
    case BalancingStrategy::Kind::kSubsample: return subsample(ds, seed);
  }
  throw Error(ErrorKind::kArgument, "unknown balancing strategy");
}

}  // namespace fairaudit
