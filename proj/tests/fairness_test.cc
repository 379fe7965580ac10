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

#include "fairaudit/fairness.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fairaudit/error.h"

namespace fairaudit {
namespace {

using Bytes = std::vector<std::uint8_t>;

// Builds a confusion block directly from counts.
GroupConfusion Make(ConfusionCounts g0, ConfusionCounts g1) {
  GroupConfusion gc;
  gc.group[0] = g0;
  gc.group[1] = g1;
  return gc;
}

TEST(GroupRates, HandCount) {
  const auto gc = group_rates(Bytes{1, 0, 0, 1}, Bytes{1, 0, 1, 0},
                              Bytes{0, 0, 1, 1});
  EXPECT_EQ(gc.group[0], (ConfusionCounts{1, 0, 1, 0}));
  EXPECT_EQ(gc.group[1], (ConfusionCounts{0, 1, 0, 1}));
}

TEST(GroupRates, PerfectClassifier) {
  const Bytes y = {1, 0, 1, 1, 0, 0};
  const auto gc = group_rates(y, y, Bytes{0, 1, 0, 1, 0, 1});
  for (const auto& c : gc.group) {
    EXPECT_EQ(c.fp, 0u);
    EXPECT_EQ(c.fn, 0u);
  }
}

TEST(GroupRates, SwappingGroupCodesSwapsBlocks) {
  const Bytes p = {1, 0, 0, 1, 1};
  const Bytes y = {1, 1, 0, 0, 1};
  const auto a = group_rates(p, y, Bytes{0, 1, 0, 1, 1});
  const auto b = group_rates(p, y, Bytes{1, 0, 1, 0, 0});
  EXPECT_EQ(a.group[0], b.group[1]);
  EXPECT_EQ(a.group[1], b.group[0]);
}

TEST(GroupRates, EmptyGroupNamed) {
  try {
    group_rates(Bytes{1, 0}, Bytes{1, 0}, Bytes{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unprivileged"), std::string::npos);
  }
}

TEST(Metrics, DisparateImpactAndParity) {
  // Selection rates: privileged 0.8, unprivileged 0.6.
  const auto gc = Make({6, 2, 1, 1}, {4, 2, 3, 1});
  EXPECT_DOUBLE_EQ(disparate_impact(gc), 0.75);
  EXPECT_DOUBLE_EQ(demographic_parity_diff(gc), 0.2);
  const auto equal = Make({3, 2, 4, 1}, {2, 3, 1, 4});
  EXPECT_DOUBLE_EQ(disparate_impact(equal), 1.0);
  EXPECT_DOUBLE_EQ(demographic_parity_diff(equal), 0.0);
}

TEST(Metrics, EqualizedOdds) {
  // Privileged tpr 0.8, fpr 0.25; unprivileged tpr 0.9, fpr 0.2.
  const auto gc = Make({8, 5, 15, 2}, {9, 4, 16, 1});
  EXPECT_NEAR(equalized_odds_diff(gc), 0.1, 1e-15);
  const auto fm = fairness_metrics(gc);
  EXPECT_NEAR(fm.tpr_gap, 0.1, 1e-15);
  EXPECT_NEAR(fm.fpr_gap, 0.05, 1e-15);
  EXPECT_EQ(equalized_odds_diff(Make({1, 2, 3, 4}, {1, 2, 3, 4})), 0.0);
}

TEST(Metrics, UndefinedCases) {
  const auto none_selected = Make({0, 0, 5, 5}, {1, 1, 4, 4});
  EXPECT_THROW(disparate_impact(none_selected), Error);
  EXPECT_FALSE(fairness_metrics(none_selected).disparate_impact.has_value());
  const auto no_positives = Make({0, 1, 4, 0}, {1, 1, 4, 4});
  try {
    equalized_odds_diff(no_positives);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUndefinedMetric);
    EXPECT_NE(std::string(e.what()).find("TPR"), std::string::npos);
  }
}

TEST(Metrics, PropertySwapAndPermutation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 20 + rng() % 100;
    Bytes p(n), y(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng() % 2;
      y[i] = rng() % 2;
      g[i] = rng() % 2;
    }
    // Guarantee every denominator is positive.
    for (int k = 0; k < 8; ++k) {
      p[k] = k & 1;
      y[k] = (k >> 1) & 1;
      g[k] = (k >> 2) & 1;
    }
    const auto gc = group_rates(p, y, g);
    Bytes swapped(g);
    for (auto& v : swapped) v ^= 1;
    const auto sw = group_rates(p, y, swapped);
    const auto a = fairness_metrics(gc);
    const auto b = fairness_metrics(sw);
    EXPECT_NEAR(*a.disparate_impact * *b.disparate_impact, 1.0, 1e-12);
    EXPECT_EQ(a.demographic_parity_diff, b.demographic_parity_diff);
    EXPECT_EQ(a.equalized_odds_diff, b.equalized_odds_diff);
    EXPECT_EQ(a.demographic_parity_diff == 0.0, *a.disparate_impact == 1.0);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Bytes pp(n), yy(n), gg(n);
    for (std::size_t i = 0; i < n; ++i) {
      pp[i] = p[perm[i]];
      yy[i] = y[perm[i]];
      gg[i] = g[perm[i]];
    }
    const auto c = fairness_metrics(group_rates(pp, yy, gg));
    EXPECT_EQ(*a.disparate_impact, *c.disparate_impact);
    EXPECT_EQ(a.demographic_parity_diff, c.demographic_parity_diff);
    EXPECT_EQ(a.equalized_odds_diff, c.equalized_odds_diff);
  }
}

}  // namespace
}  // namespace fairaudit
