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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "fairaudit/error.h"
#include "test_util.h"

namespace fairaudit {
namespace {

TabularDataset Imbalanced(std::size_t zeros, std::size_t ones,
                          std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> rows;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < zeros + ones; ++i) {
    const bool one = i >= zeros;
    rows.push_back({normal(rng) + (one ? 2.0 : 0.0), normal(rng) * 100.0,
                    std::round(normal(rng) * 2.0)});
    labels.push_back(one ? 1 : 0);
  }
  auto ds = testing::MakeDataset(rows, labels);
  auto specs = ds.specs();
  specs[2].integer_coded = true;
  return TabularDataset(ds.features(), specs, ds.labels(), std::nullopt);
}

double ClassMass(const BalancedTrainSet& bt, std::uint8_t c) {
  double m = 0.0;
  for (std::size_t i = 0; i < bt.data.rows(); ++i) {
    if (bt.data.labels()[i] == c) m += bt.weights[i];
  }
  return m;
}

TEST(ClassWeights, SeventyFiveTwentyFive) {
  const auto bt = class_weights(Imbalanced(75, 25));
  EXPECT_NEAR(bt.weights.front(), 100.0 / 150.0, 1e-15);
  EXPECT_NEAR(bt.weights.back(), 2.0, 1e-15);
  EXPECT_NEAR(ClassMass(bt, 0), ClassMass(bt, 1), 1e-9);
  EXPECT_EQ(bt.data, Imbalanced(75, 25));
}

TEST(ClassWeights, BalancedIsIdentity) {
  const auto bt = class_weights(Imbalanced(50, 50));
  for (double w : bt.weights) EXPECT_EQ(w, 1.0);
}

TEST(ClassWeights, SingleClassIsError) {
  EXPECT_THROW(class_weights(Imbalanced(10, 0)), Error);
  EXPECT_THROW(subsample(Imbalanced(0, 10), 1), Error);
}

TEST(Smote, MidpointAndEndpoint) {
  const std::vector<FeatureSpec> specs = {
      {"a", FeatureRole::kFinancial, false},
      {"b", FeatureRole::kFinancial, false}};
  const std::vector<double> x = {0, 0};
  const std::vector<double> z = {1, 1};
  EXPECT_EQ(interpolate(x, z, 0.5, specs), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(interpolate(x, z, 0.0, specs), x);
  const std::vector<FeatureSpec> coded = {{"a", FeatureRole::kFinancial, true},
                                          {"b", FeatureRole::kFinancial, false}};
  const auto rounded = interpolate(std::vector<double>{0, 0},
                                   std::vector<double>{3, 3}, 0.4, coded);
  EXPECT_EQ(rounded[0], 1.0);
  EXPECT_DOUBLE_EQ(rounded[1], 1.2);
}

TEST(Smote, TwoMinorityRowsAreEachOthersNeighbor) {
  const std::vector<double> points = {0, 0, 1, 1};
  EXPECT_EQ(nearest_neighbors(points, 2, 0, 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(nearest_neighbors(points, 2, 1, 1), (std::vector<std::size_t>{0}));
}

TEST(Smote, CountsAndLabels) {
  const auto in = Imbalanced(75, 25);
  const auto bt = smote(in, 5, 11);
  EXPECT_EQ(bt.data.count_label(0), 75u);
  EXPECT_EQ(bt.data.count_label(1), 75u);
  ASSERT_EQ(bt.synthetic_parents.size(), 50u);
  for (std::size_t i = in.rows(); i < bt.data.rows(); ++i) {
    EXPECT_EQ(bt.data.labels()[i], 1);
  }
  for (double w : bt.weights) EXPECT_EQ(w, 1.0);
  // Original rows come first, untouched.
  for (std::size_t i = 0; i < in.rows(); ++i) {
    EXPECT_TRUE(std::equal(in.row(i).begin(), in.row(i).end(),
                           bt.data.row(i).begin()));
  }
}

TEST(Smote, DeterministicForSeed) {
  const auto in = Imbalanced(60, 20);
  EXPECT_EQ(smote(in, 3, 5).data, smote(in, 3, 5).data);
}

TEST(Smote, TooFewMinorityRows) {
  try {
    smote(Imbalanced(20, 5), 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNeighbor);
  }
  EXPECT_NO_THROW(smote(Imbalanced(20, 6), 5, 1));
}

// Every synthetic point lies on the segment between its recorded parents
// (integer-coded column excepted, which is rounded), and the neighbor is one
// of the base row's k nearest minority rows.
TEST(Smote, PropertySyntheticOnParentSegment) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto in = Imbalanced(40 + seed, 10 + seed % 7, seed);
    const int k = 1 + static_cast<int>(seed % 4);
    const auto bt = smote(in, k, seed);
    for (std::size_t s = 0; s < bt.synthetic_parents.size(); ++s) {
      const auto [b, z] = bt.synthetic_parents[s];
      EXPECT_EQ(in.labels()[b], 1);
      EXPECT_EQ(in.labels()[z], 1);
      const auto row = bt.data.row(in.rows() + s);
      double lambda = -1.0;
      for (std::size_t j = 0; j < 2; ++j) {
        const double lo = std::min(in.at(b, j), in.at(z, j));
        const double hi = std::max(in.at(b, j), in.at(z, j));
        EXPECT_GE(row[j], lo - 1e-12);
        EXPECT_LE(row[j], hi + 1e-12);
        if (in.at(z, j) != in.at(b, j)) {
          const double l = (row[j] - in.at(b, j)) / (in.at(z, j) - in.at(b, j));
          if (lambda >= 0.0) EXPECT_NEAR(l, lambda, 1e-9);
          lambda = l;
        }
      }
      EXPECT_EQ(row[2], std::round(row[2]));
      EXPECT_GE(row[2], std::min(in.at(b, 2), in.at(z, 2)) - 0.5);
      EXPECT_LE(row[2], std::max(in.at(b, 2), in.at(z, 2)) + 0.5);
    }
  }
}

TEST(Subsample, CountsAndSubset) {
  const auto in = Imbalanced(75, 25);
  const auto bt = subsample(in, 4);
  EXPECT_EQ(bt.data.count_label(0), 25u);
  EXPECT_EQ(bt.data.count_label(1), 25u);
  EXPECT_EQ(ClassMass(bt, 0), ClassMass(bt, 1));
  std::multimap<double, std::size_t> originals;
  for (std::size_t i = 0; i < in.rows(); ++i) originals.emplace(in.at(i, 0), i);
  for (std::size_t i = 0; i < bt.data.rows(); ++i) {
    const auto it = originals.find(bt.data.at(i, 0));
    ASSERT_NE(it, originals.end());
    EXPECT_TRUE(std::equal(bt.data.row(i).begin(), bt.data.row(i).end(),
                           in.row(it->second).begin()));
    originals.erase(it);
  }
}

TEST(Subsample, BalancedInputUnchangedAndDeterministic) {
  const auto in = Imbalanced(30, 30);
  EXPECT_EQ(subsample(in, 1).data, in);
  const auto skewed = Imbalanced(80, 20);
  EXPECT_EQ(subsample(skewed, 8).data, subsample(skewed, 8).data);
}

TEST(Balancing, PropertyEqualClassMass) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto in = Imbalanced(30 + 13 * seed, 10 + 3 * seed, seed);
    for (const auto& strategy :
         {BalancingStrategy::ClassWeight(), BalancingStrategy::Smote(3),
          BalancingStrategy::Subsample()}) {
      const auto bt = apply_balancing(in, strategy, seed);
      const double m0 = ClassMass(bt, 0);
      const double m1 = ClassMass(bt, 1);
      if (strategy.kind == BalancingStrategy::Kind::kClassWeight) {
        EXPECT_NEAR(m0, m1, 1e-9 * m0);
      } else {
        EXPECT_LE(std::abs(m0 - m1), 1.0);
      }
    }
  }
}

}  // namespace
}  // namespace fairaudit
