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

#include "agentpath/matcher.hpp"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "oracle.hpp"
#include "test_support.hpp"

namespace agentpath {
namespace {

using testing_support::call;
using testing_support::calls;
using testing_support::step;
using testing_support::toy_graph;

class ToyMatchTest : public ::testing::Test {
 protected:
  DependencyGraph graph = toy_graph();
  PathSet paths = enumerate_paths(graph);
  DecisionTree tree = build_decision_tree(paths, graph.nodes());

  MatchResult run(const std::vector<StepGroup>& steps) const {
    return finalize(match_steps(tree, steps), tree, paths.optimal_length);
  }
};

TEST_F(ToyMatchTest, AdvanceDescends) {
  MatchState s = advance({}, tree, step({1}));
  EXPECT_FALSE(s.failed());
  EXPECT_EQ(s.matched_calls, 1u);
  s = advance(s, tree, step({0}));
  EXPECT_FALSE(s.failed());
  EXPECT_EQ(s.matched_calls, 2u);
  EXPECT_EQ(s.steps_taken, 2u);
}

TEST_F(ToyMatchTest, AdvanceFailsOnUnreachableStep) {
  const MatchState s = advance({}, tree, step({3}));
  ASSERT_TRUE(s.failed());
  EXPECT_EQ(*s.failure_step, 0u);
  EXPECT_EQ(s.matched_calls, 0u);
}

TEST_F(ToyMatchTest, OptimalTraversal) {
  const auto r = run({step({0, 1}), step({2}), step({3})});
  EXPECT_TRUE(r.correct);
  EXPECT_DOUBLE_EQ(r.ap, 1.0);
  EXPECT_TRUE(r.optimal);
  EXPECT_FALSE(r.failure_step);
}

TEST_F(ToyMatchTest, ValidButLongerTraversal) {
  const auto r = run({step({1}), step({0}), step({2}), step({3})});
  EXPECT_TRUE(r.correct);
  EXPECT_DOUBLE_EQ(r.ap, 1.0);
  EXPECT_FALSE(r.optimal);
}

TEST_F(ToyMatchTest, FailureAfterOneMatchedCall) {
  const auto r = run({step({1}), step({3})});
  EXPECT_FALSE(r.correct);
  EXPECT_DOUBLE_EQ(r.ap, 0.25);
  ASSERT_TRUE(r.failure_step);
  EXPECT_EQ(*r.failure_step, 1u);
  EXPECT_FALSE(r.optimal);
}

TEST_F(ToyMatchTest, ExtraStepAfterTerminalIsOverCalling) {
  const auto r = run({step({0, 1}), step({2}), step({3}), step({3})});
  EXPECT_FALSE(r.correct);
  EXPECT_EQ(*r.failure_step, 3u);
  EXPECT_DOUBLE_EQ(r.ap, 1.0);
}

TEST_F(ToyMatchTest, StoppingEarlyIsIncomplete) {
  const auto r = run({step({0, 1})});
  EXPECT_FALSE(r.correct);
  EXPECT_DOUBLE_EQ(r.ap, 0.5);
  EXPECT_EQ(*r.failure_step, 1u);
}

TEST_F(ToyMatchTest, ApNeverDecreasesWhileSteppingAlongAPath) {
  for (const auto& path : to_call_paths(paths, graph.nodes())) {
    double last = 0.0;
    MatchState s;
    for (const auto& st : path) {
      s = advance(s, tree, st);
      const double ap = finalize(s, tree, paths.optimal_length).ap;
      EXPECT_GE(ap, last);
      last = ap;
    }
    EXPECT_DOUBLE_EQ(last, 1.0);
  }
}

TEST(MatcherOracleTest, CorrectnessEqualsPathMembership) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const auto edges = oracle::random_dag(n, 0.3, rng);
    const auto g = build_graph(calls(n), std::vector<Edge>(edges.begin(), edges.end()));
    const auto set = enumerate_paths(g);
    const auto tree = build_decision_tree(set, g.nodes());
    const auto valid = oracle::all_paths(n, edges);
    std::size_t min_len = SIZE_MAX;
    for (const auto& p : valid) min_len = std::min(min_len, p.size());

    for (int q = 0; q < 50; ++q) {
      oracle::Path seq;
      if (q % 2 == 0) {
        // Start from a valid path and maybe perturb it.
        auto it = valid.begin();
        std::advance(it, static_cast<long>(rng() % valid.size()));
        seq = *it;
        if (rng() % 2 == 0 && !seq.empty()) {
          switch (rng() % 3) {
            case 0: seq.pop_back(); break;
            case 1: std::swap(seq.front(), seq.back()); break;
            default: seq.push_back({rng() % n}); break;
          }
        }
      } else {
        const std::size_t len = 1 + rng() % (n + 1);
        for (std::size_t i = 0; i < len; ++i) {
          oracle::Step s;
          for (std::size_t v = 0; v < n; ++v) {
            if (rng() % 3 == 0) s.push_back(v);
          }
          if (s.empty()) s.push_back(rng() % n);
          seq.push_back(s);
        }
      }
      std::vector<StepGroup> steps;
      for (const auto& s : seq) steps.push_back(resolve_step(s, g.nodes()));
      const auto r = finalize(match_steps(tree, steps), tree, set.optimal_length);
      const bool member = valid.count(seq) > 0;
      ASSERT_EQ(r.correct, member) << "trial " << trial << " query " << q;
      EXPECT_EQ(r.optimal, member && seq.size() == min_len);
      if (r.correct) {
        EXPECT_DOUBLE_EQ(r.ap, 1.0);
        EXPECT_FALSE(r.failure_step);
      }
    }
  }
}

TEST(MatcherTest, SerializedParallelCallsAreCorrectButNotOptimal) {
  const auto g = build_graph(calls(3), {});
  const auto set = enumerate_paths(g);
  const auto tree = build_decision_tree(set, g.nodes());
  const auto r = finalize(match_steps(tree, std::vector<StepGroup>{step({2}), step({0}), step({1})}), tree,
                          set.optimal_length);
  EXPECT_TRUE(r.correct);
  EXPECT_FALSE(r.optimal);
}

TEST(MatcherTest, DuplicateGoldCallsMatchAsMultiset) {
  const ToolCall same("lookup", Json{{"q", "x"}});
  const auto g = build_graph({same, same, call(5)}, {{0, 2}, {1, 2}});
  const auto set = enumerate_paths(g);
  const auto tree = build_decision_tree(set, g.nodes());
  const auto r = finalize(match_steps(tree, std::vector<StepGroup>{StepGroup{same, same}, step({5})}), tree,
                          set.optimal_length);
  EXPECT_TRUE(r.correct);
  EXPECT_TRUE(r.optimal);
  // Only one of the duplicates is not enough.
  const auto partial = finalize(match_steps(tree, std::vector<StepGroup>{StepGroup{same}, step({5})}), tree,
                                set.optimal_length);
  EXPECT_FALSE(partial.correct);
  EXPECT_NEAR(partial.ap, 1.0 / 3.0, 1e-12);
}

class ClassifyErrorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* name : {"getCityForecast", "getWeatherAlerts"}) {
      ToolSpec t;
      t.name = name;
      t.parameters["city"] = ParamSpec{"string", true, Json::object()};
      t.parameters["date"] = ParamSpec{"string", false, Json::object()};
      schemas.push_back(t);
    }
    expected = {StepGroup{ToolCall("getCityForecast", Json{{"city", "Chicago"}, {"date", "2024-07-13"}})}};
  }

  std::vector<ToolSpec> schemas;
  std::vector<StepGroup> expected;
  std::string context = "Please check the weather in Chicago this weekend.";
};

TEST_F(ClassifyErrorTest, WrongTool) {
  EXPECT_EQ(classify_error(ToolCall("getWeatherAlerts", Json{{"city", "Chicago"}}), expected, schemas, context),
            ErrorClass::ToolError);
}

TEST_F(ClassifyErrorTest, UnknownParameterName) {
  EXPECT_EQ(classify_error(ToolCall("getCityForecast", Json{{"citty", "Chicago"}}), expected, schemas, context),
            ErrorClass::ParamNameHallucination);
}

TEST_F(ClassifyErrorTest, InventedValue) {
  EXPECT_EQ(classify_error(ToolCall("getCityForecast", Json{{"city", "Boston"}, {"date", "2024-07-13"}}),
                           expected, schemas, context),
            ErrorClass::ParamValueHallucination);
}

TEST_F(ClassifyErrorTest, ValueFromContextButWrong) {
  const std::string ctx = context + " I was in Boston last week.";
  EXPECT_EQ(classify_error(ToolCall("getCityForecast", Json{{"city", "boston"}, {"date", "2024-07-13"}}),
                           expected, schemas, ctx),
            ErrorClass::ParamValueError);
  // Values present in gold but misplaced are value errors, not hallucinations.
  EXPECT_EQ(classify_error(ToolCall("getCityForecast", Json{{"city", "Chicago"}}), expected, schemas, ""),
            ErrorClass::ParamValueError);
}

TEST_F(ClassifyErrorTest, MultiCallStepUsesFirstOffendingCall) {
  const StepGroup bad{ToolCall("getCityForecast", Json{{"city", "Chicago"}, {"date", "2024-07-13"}}),
                      ToolCall("getWeatherAlerts", Json{{"city", "Chicago"}})};
  EXPECT_EQ(classify_step_error(bad, expected, schemas, context), ErrorClass::ToolError);
}

}  // namespace
}  // namespace agentpath
