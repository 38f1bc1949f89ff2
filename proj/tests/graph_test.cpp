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

#include "agentpath/graph.hpp"

#include <random>

#include "gtest/gtest.h"
#include "oracle.hpp"
#include "test_support.hpp"

namespace agentpath {
namespace {

using testing_support::calls;
using testing_support::toy_graph;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

TEST(BuildGraphTest, ToyGraphIsValid) {
  const auto g = toy_graph();
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.predecessors(3), (std::vector<NodeIndex>{0, 2}));
}

TEST(BuildGraphTest, SingleNode) {
  const auto g = build_graph(calls(1), {});
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(BuildGraphTest, Errors) {
  EXPECT_EQ(code_of([] { build_graph(calls(2), {{0, 1}, {1, 0}}); }), ErrorCode::CyclicDependency);
  EXPECT_EQ(code_of([] { build_graph(calls(2), {{0, 2}}); }), ErrorCode::IndexOutOfRange);
  EXPECT_EQ(code_of([] { build_graph(calls(2), {{1, 1}}); }), ErrorCode::SelfEdge);
}

TEST(BuildGraphTest, CycleIsListed) {
  try {
    build_graph(calls(4), {{0, 1}, {1, 2}, {2, 3}, {3, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("1 -> 2 -> 3 -> 1"), std::string::npos) << e.what();
  }
}

TEST(BuildGraphTest, DuplicateEdgesCollapse) {
  EXPECT_EQ(build_graph(calls(2), {{0, 1}, {0, 1}}).edges().size(), 1u);
}

TEST(FrontierTest, ToyGraph) {
  const auto g = toy_graph();
  EXPECT_EQ(frontier(g, {}).eligible, (NodeSet{0, 1}));
  EXPECT_EQ(frontier(g, {1}).eligible, (NodeSet{0, 2}));
  EXPECT_EQ(frontier(g, {0, 1, 2}).eligible, (NodeSet{3}));
  EXPECT_TRUE(frontier(g, {0, 1, 2, 3}).eligible.empty());
}

TEST(FrontierTest, RejectsVisitedSetThatSkipsPrerequisites) {
  const auto g = toy_graph();
  EXPECT_EQ(code_of([&] { frontier(g, {2}); }), ErrorCode::InvalidVisitedSet);
  EXPECT_EQ(code_of([&] { frontier(g, {9}); }), ErrorCode::IndexOutOfRange);
}

// Walks random valid visited sets and checks against the indegree oracle.
TEST(FrontierTest, MatchesIndegreeOracleAndStaysNonEmpty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    const auto edges = oracle::random_dag(n, 0.35, rng);
    const auto g = build_graph(calls(n), std::vector<Edge>(edges.begin(), edges.end()));
    NodeSet visited;
    while (visited.size() < n) {
      const auto f = frontier(g, visited);
      ASSERT_EQ(f.eligible, oracle::ready(n, edges, visited));
      ASSERT_FALSE(f.eligible.empty());
      EXPECT_EQ(g.frontier_mask([&] {
        std::uint64_t m = 0;
        for (auto v : visited) m |= std::uint64_t{1} << v;
        return m;
      }()), [&] {
        std::uint64_t m = 0;
        for (auto v : f.eligible) m |= std::uint64_t{1} << v;
        return m;
      }());

      auto it = f.eligible.begin();
      std::advance(it, static_cast<long>(rng() % f.eligible.size()));
      const NodeIndex pick = *it;
      visited.insert(pick);
      // Monotonicity: the rest of the old frontier is still eligible.
      const auto next = frontier(g, visited);
      for (auto v : f.eligible) {
        if (v != pick) EXPECT_TRUE(next.eligible.contains(v));
      }
    }
  }
}

}  // namespace
}  // namespace agentpath
