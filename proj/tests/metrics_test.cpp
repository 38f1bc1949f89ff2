// Copyright 2026 The agentpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "agentpath/metrics.hpp"

#include <random>

#include "gtest/gtest.h"

namespace agentpath {
namespace {

constexpr double kTol = 1e-12;
using S = CoarsePolicy;

TEST(PtfTest, Examples) {
  EXPECT_EQ(ptf(PolicySequence{S::Single, S::Single, S::Single}), 0u);
  EXPECT_EQ(ptf(PolicySequence{S::Single, S::Multi, S::Single}), 2u);
  EXPECT_EQ(ptf(PolicySequence{S::Chat}), 0u);
  EXPECT_THROW(ptf(PolicySequence{}), Error);
}

TEST(PtfTest, SubtypesProjectBeforeCounting) {
  const std::vector<PolicyType> fine{PolicyType::MultiSerial, PolicyType::MultiParallel, PolicyType::MultiMixed};
  EXPECT_EQ(ptf(fine), 0u);
  const std::vector<PolicyType> mixed{PolicyType::Single, PolicyType::MultiMixed, PolicyType::Chat,
                                      PolicyType::Chat};
  EXPECT_EQ(ptf(mixed), 2u);
}

TEST(CrossTabTest, Counts) {
  const std::map<std::string, bool> c2{{"a", true}, {"b", true}, {"c", false}, {"d", false}};
  const std::map<std::string, bool> c3{{"a", true}, {"b", false}, {"c", true}, {"d", false}};
  EXPECT_EQ(cross_tab(c2, c3), (CrossTab{1, 1, 1, 1}));
  EXPECT_EQ(cross_tab(c2, c2), (CrossTab{2, 0, 0, 2}));
}

TEST(CrossTabTest, AllRight) {
  std::map<std::string, bool> all;
  for (int i = 0; i < 7; ++i) all["c" + std::to_string(i)] = true;
  EXPECT_EQ(cross_tab(all, all), (CrossTab{7, 0, 0, 0}));
}

TEST(CrossTabTest, KeySetMismatch) {
  try {
    cross_tab({{"a", true}}, {{"b", true}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KeySetMismatch);
  }
  EXPECT_THROW(cross_tab({{"a", true}}, {{"a", true}, {"b", true}}), Error);
}

TEST(CrossTabMetricsTest, Acc2) {
  EXPECT_NEAR(acc2({5, 1, 1, 3}), 0.5, kTol);
  EXPECT_NEAR(acc2({0, 0, 0, 4}), 0.0, kTol);
  EXPECT_NEAR(acc2({10, 0, 0, 0}), 1.0, kTol);
  EXPECT_THROW(acc2({}), Error);
}

TEST(CrossTabMetricsTest, Vf) {
  EXPECT_NEAR(vf({5, 1, 1, 3}), 0.2, kTol);
  EXPECT_NEAR(vf({5, 0, 0, 5}), 0.0, kTol);
  EXPECT_NEAR(vf({0, 3, 2, 0}), 1.0, kTol);
  EXPECT_THROW(vf({}), Error);
}

TEST(CrossTabMetricsTest, Ddd) {
  const auto d = ddd({5, 2, 1, 2});
  ASSERT_TRUE(d.is_finite());
  EXPECT_NEAR(d.value, 4.0, kTol);
  EXPECT_EQ(ddd({5, 0, 0, 5}).kind, ExtendedNumber::Kind::Undefined);
  EXPECT_EQ(ddd({4, 3, 0, 1}).kind, ExtendedNumber::Kind::PosInfinity);
  EXPECT_EQ(ddd({0, 2, 1, 3}).kind, ExtendedNumber::Kind::Undefined);  // acc2 = 0
  EXPECT_EQ(ddd({0, 2, 0, 3}).kind, ExtendedNumber::Kind::Undefined);
  EXPECT_THROW(ddd({}), Error);
}

TEST(CrossTabMetricsTest, Rendering) {
  EXPECT_EQ(ddd({5, 2, 1, 2}).render(), "4.00");
  EXPECT_EQ(ddd({4, 3, 0, 1}).render(), "inf");
  EXPECT_EQ(ddd({5, 0, 0, 5}).render(), "n/a");
}

TEST(CrossTabMetricsTest, Properties) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const CrossTab t{rng() % 20, rng() % 20, rng() % 20, rng() % 20};
    if (t.total() == 0) continue;
    const double stable = static_cast<double>(t.rr + t.ww) / static_cast<double>(t.total());
    EXPECT_NEAR(vf(t) + stable, 1.0, kTol);
    for (std::size_t k : {2u, 10u}) {
      const CrossTab s{t.rr * k, t.rw * k, t.wr * k, t.ww * k};
      EXPECT_NEAR(acc2(s), acc2(t), kTol);
      EXPECT_NEAR(vf(s), vf(t), kTol);
      EXPECT_EQ(ddd(s).kind, ddd(t).kind);
      if (ddd(t).is_finite()) {
        EXPECT_NEAR(ddd(s).value, ddd(t).value, kTol);
      }
    }
  }
}

CaseOutcome outcome(std::string id, std::size_t ptf_value, std::size_t tasks, HidingStrategy hiding,
                    PolicyType subtype, bool correct, double ap, bool optimal) {
  CaseOutcome o;
  o.case_id = std::move(id);
  o.labels = CaseLabels{ptf_value, tasks, hiding, subtype};
  o.result.correct = correct;
  o.result.ap = ap;
  o.result.optimal = optimal;
  return o;
}

TEST(GroupMetricsTest, ByPtf) {
  std::vector<CaseOutcome> results{
      outcome("a", 0, 3, HidingStrategy::Omit, PolicyType::Single, true, 1.0, true),
      outcome("b", 2, 3, HidingStrategy::Reference, PolicyType::MultiSerial, false, 0.5, false),
      outcome("c", 2, 3, HidingStrategy::LongContext, PolicyType::MultiMixed, true, 1.0, false),
  };
  const auto groups = group_metrics(results, GroupKey::Ptf);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_NEAR(*groups.at("0").accuracy, 1.0, kTol);
  EXPECT_NEAR(*groups.at("2").accuracy, 0.5, kTol);
  EXPECT_NEAR(*groups.at("2").ap_mean, 0.75, kTol);
  EXPECT_NEAR(*groups.at("2").op_rate, 0.0, kTol);
  for (const auto& [k, _] : groups) EXPECT_TRUE(k == "0" || k == "1" || k == "2");
}

TEST(GroupMetricsTest, ByHidingAndTaskCount) {
  std::vector<CaseOutcome> results{
      outcome("a", 0, 2, HidingStrategy::Omit, PolicyType::Single, true, 1.0, true),
      outcome("b", 1, 4, HidingStrategy::Omit, PolicyType::Chat, false, 0.0, false),
      outcome("c", 1, 1, HidingStrategy::None, PolicyType::Chat, true, 1.0, true),
  };
  const auto hiding = group_metrics(results, GroupKey::Hiding);
  EXPECT_EQ(hiding.size(), 2u);
  EXPECT_NEAR(*hiding.at("Omit").accuracy, 0.5, kTol);
  const auto counts = group_metrics(results, GroupKey::TaskCount);
  EXPECT_EQ(counts.size(), 3u);
  EXPECT_TRUE(counts.contains("1") && counts.contains("2") && counts.contains("4"));
}

TEST(GroupMetricsTest, MissingLabel) {
  std::vector<CaseOutcome> results{outcome("a", 0, 2, HidingStrategy::Omit, PolicyType::Single, true, 1, true)};
  results[0].labels.hiding.reset();
  try {
    group_metrics(results, GroupKey::Hiding);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingLabel);
  }
}

TEST(GroupMetricsTest, PairedGroupsCarryCrossTabMetrics) {
  std::vector<PairedOutcome> pairs;
  const bool outcomes[][2] = {{true, true}, {true, false}, {false, true}, {false, false}, {true, true}};
  for (int i = 0; i < 5; ++i) {
    pairs.push_back({"c" + std::to_string(i), CaseLabels{static_cast<std::size_t>(i % 2), 2, {}, {}},
                     outcomes[i][0], outcomes[i][1]});
  }
  const auto all = summarize<PairedOutcome>(pairs);
  EXPECT_EQ(*all.tab, (CrossTab{2, 1, 1, 1}));
  EXPECT_NEAR(*all.vf, 0.4, kTol);
  const auto by_ptf = group_metrics(pairs, GroupKey::Ptf);
  EXPECT_EQ(by_ptf.at("0").tab->total() + by_ptf.at("1").tab->total(), 5u);
}

TEST(MetricAccumulatorTest, ShardMergeEqualsUnion) {
  std::mt19937_64 rng(8);
  std::vector<CaseOutcome> all;
  for (int i = 0; i < 200; ++i) {
    const bool ok = rng() % 2 == 0;
    all.push_back(outcome("c" + std::to_string(i), rng() % 3, 3, HidingStrategy::Omit, PolicyType::Single, ok,
                          ok ? 1.0 : static_cast<double>(rng() % 4) / 4.0, ok && rng() % 2 == 0));
  }
  const auto whole = summarize<CaseOutcome>(all);
  for (std::size_t cut : {0u, 1u, 57u, 199u, 200u}) {
    MetricAccumulator left, right;
    for (std::size_t i = 0; i < all.size(); ++i) (i < cut ? left : right).add(all[i]);
    left.merge(right);
    const auto merged = left.report();
    EXPECT_EQ(merged.count, whole.count);
    EXPECT_NEAR(*merged.accuracy, *whole.accuracy, kTol);
    EXPECT_NEAR(*merged.ap_mean, *whole.ap_mean, kTol);
    EXPECT_NEAR(*merged.op_rate, *whole.op_rate, kTol);
  }
}

TEST(MetricReportTest, JsonIsStable) {
  std::vector<CaseOutcome> results{outcome("a", 0, 2, HidingStrategy::Omit, PolicyType::Single, true, 1, true)};
  auto report = summarize<CaseOutcome>(results);
  report.grouped = group_metrics(results, GroupKey::Ptf);
  EXPECT_EQ(report.to_json().dump(), report.to_json().dump());
  EXPECT_EQ(report.to_json()["grouped"]["0"]["accuracy"], 1.0);
}

}  // namespace
}  // namespace agentpath
