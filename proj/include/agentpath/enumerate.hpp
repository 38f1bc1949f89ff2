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

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentpath/call.hpp"
#include "agentpath/error.hpp"
#include "agentpath/graph.hpp"

namespace agentpath {

/// One valid schedule: successive groups of node indices, each group
/// eligible at once given everything before it.
struct ExecutionPath {
  std::vector<std::vector<NodeIndex>> steps;

  std::size_t length() const noexcept { return steps.size(); }

  friend bool operator==(const ExecutionPath&, const ExecutionPath&) = default;
  friend auto operator<=>(const ExecutionPath&, const ExecutionPath&) = default;
};

struct PathSet {
  std::vector<ExecutionPath> paths;
  std::size_t optimal_length = 0;
};

struct EnumerationLimits {
  std::size_t max_nodes = 12;
  // Edgeless graphs grow as the ordered Bell numbers; 10 nodes is ~1e8 paths.
  std::size_t max_paths = 5'000'000;
};

namespace detail {

inline std::vector<NodeIndex> mask_to_nodes(std::uint64_t mask) {
  std::vector<NodeIndex> out;
  while (mask) {
    out.push_back(static_cast<NodeIndex>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

// Non-empty subsets of `mask`, smallest first, ties broken by sorted index list.
inline std::vector<std::uint64_t> ordered_submasks(std::uint64_t mask) {
  std::vector<std::uint64_t> subs;
  for (std::uint64_t s = mask; s; s = (s - 1) & mask) subs.push_back(s);
  std::sort(subs.begin(), subs.end(), [](std::uint64_t a, std::uint64_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return mask_to_nodes(a) < mask_to_nodes(b);
  });
  return subs;
}

class PathEnumerator {
 public:
  PathEnumerator(const DependencyGraph& g, std::size_t max_paths)
      : graph_(g), full_((g.size() == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << g.size()) - 1)),
        max_paths_(max_paths) {}

  std::vector<ExecutionPath> run() {
    walk(0);
    return std::move(out_);
  }

 private:
  void walk(std::uint64_t visited) {
    if (visited == full_) {
      if (out_.size() >= max_paths_) {
        throw Error(ErrorCode::GraphTooLarge,
                    "more than " + std::to_string(max_paths_) + " execution paths");
      }
      ExecutionPath p;
      p.steps.reserve(current_.size());
      for (auto m : current_) p.steps.push_back(mask_to_nodes(m));
      out_.push_back(std::move(p));
      return;
    }
    const std::uint64_t ready = graph_.frontier_mask(visited);
    auto it = subsets_.find(ready);
    if (it == subsets_.end()) it = subsets_.emplace(ready, ordered_submasks(ready)).first;
    for (std::uint64_t step : it->second) {
      current_.push_back(step);
      walk(visited | step);
      current_.pop_back();
    }
  }

  const DependencyGraph& graph_;
  std::uint64_t full_;
  std::size_t max_paths_;
  std::vector<std::uint64_t> current_;
  std::vector<ExecutionPath> out_;
  std::map<std::uint64_t, std::vector<std::uint64_t>> subsets_;
};

}  // namespace detail

/// Every way to run the graph to completion, where each step is any
/// non-empty subset of the nodes currently ready. Paths are returned in
/// lexicographic order of their sorted steps.
inline PathSet enumerate_paths(const DependencyGraph& graph, EnumerationLimits limits = {}) {
  if (graph.empty()) throw Error(ErrorCode::EmptyGraph, "nothing to enumerate");
  if (graph.size() > limits.max_nodes || graph.size() > 64) {
    throw Error(ErrorCode::GraphTooLarge, std::to_string(graph.size()) + " nodes exceeds cap of " +
                                              std::to_string(limits.max_nodes));
  }
  PathSet set;
  set.paths = detail::PathEnumerator(graph, limits.max_paths).run();
  std::sort(set.paths.begin(), set.paths.end());
  set.optimal_length = set.paths.front().length();
  for (const auto& p : set.paths) set.optimal_length = std::min(set.optimal_length, p.length());
  return set;
}

struct PathClasses {
  std::vector<ExecutionPath> optimal;
  std::vector<ExecutionPath> suboptimal;
};

inline PathClasses classify_paths(const PathSet& set) {
  PathClasses out;
  for (const auto& p : set.paths) {
    (p.length() == set.optimal_length ? out.optimal : out.suboptimal).push_back(p);
  }
  return out;
}

/// First optimal path in enumeration order; used as the annotated gold order.
inline const ExecutionPath& gold_order(const PathSet& set) {
  for (const auto& p : set.paths) {
    if (p.length() == set.optimal_length) return p;
  }
  throw Error(ErrorCode::EmptyGraph, "empty path set");
}

inline StepGroup resolve_step(const std::vector<NodeIndex>& step, const std::vector<ToolCall>& nodes) {
  std::vector<ToolCall> calls;
  calls.reserve(step.size());
  for (NodeIndex i : step) calls.push_back(nodes.at(i));
  return StepGroup(std::move(calls));
}

using CallPath = std::vector<StepGroup>;

/// Index paths mapped to call level; paths that become identical merge.
inline std::vector<CallPath> to_call_paths(const PathSet& set, const std::vector<ToolCall>& nodes) {
  std::vector<CallPath> out;
  out.reserve(set.paths.size());
  for (const auto& p : set.paths) {
    CallPath cp;
    for (const auto& s : p.steps) cp.push_back(resolve_step(s, nodes));
    out.push_back(std::move(cp));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Trie over call-level paths. Node 0 is the root.
class DecisionTree {
 public:
  using NodeId = std::size_t;

  struct Node {
    std::map<StepGroup, NodeId> children;
    bool terminal = false;
    std::size_t matched_calls = 0;   // gold calls consumed from the root to here
    std::size_t terminal_count = 0;  // terminals in this subtree
  };

  static constexpr NodeId root() noexcept { return 0; }

  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t total_calls() const noexcept { return total_calls_; }
  std::size_t terminal_count() const { return nodes_.front().terminal_count; }

  std::optional<NodeId> child(NodeId id, const StepGroup& step) const {
    const auto& children = nodes_.at(id).children;
    if (auto it = children.find(step); it != children.end()) return it->second;
    return std::nullopt;
  }

  std::vector<StepGroup> edges(NodeId id) const {
    std::vector<StepGroup> out;
    for (const auto& [step, _] : nodes_.at(id).children) out.push_back(step);
    return out;
  }

  /// Root-to-terminal step sequences, in trie order.
  std::vector<CallPath> flatten() const {
    std::vector<CallPath> out;
    CallPath prefix;
    flatten_from(root(), prefix, out);
    return out;
  }

  Json to_json() const { return subtree_json(root()); }

  friend DecisionTree build_decision_tree(const PathSet& set, const std::vector<ToolCall>& nodes);

 private:
  void flatten_from(NodeId id, CallPath& prefix, std::vector<CallPath>& out) const {
    const Node& n = nodes_[id];
    if (n.terminal) out.push_back(prefix);
    for (const auto& [step, child] : n.children) {
      prefix.push_back(step);
      flatten_from(child, prefix, out);
      prefix.pop_back();
    }
  }

  Json subtree_json(NodeId id) const {
    const Node& n = nodes_[id];
    Json children = Json::array();
    for (const auto& [step, child] : n.children) {
      children.push_back(Json{{"step", step.to_json()}, {"node", subtree_json(child)}});
    }
    return Json{{"terminal", n.terminal},
                {"matched_calls", n.matched_calls},
                {"terminals", n.terminal_count},
                {"children", std::move(children)}};
  }

  std::vector<Node> nodes_{Node{}};
  std::size_t total_calls_ = 0;
};

inline DecisionTree build_decision_tree(const PathSet& set, const std::vector<ToolCall>& nodes) {
  DecisionTree tree;
  tree.total_calls_ = nodes.size();
  for (const auto& path : to_call_paths(set, nodes)) {
    DecisionTree::NodeId at = DecisionTree::root();
    tree.nodes_[at].terminal_count++;
    for (const auto& step : path) {
      auto found = tree.nodes_[at].children.find(step);
      DecisionTree::NodeId next;
      if (found == tree.nodes_[at].children.end()) {
        next = tree.nodes_.size();
        DecisionTree::Node fresh;
        fresh.matched_calls = tree.nodes_[at].matched_calls + step.size();
        tree.nodes_.push_back(std::move(fresh));
        tree.nodes_[at].children.emplace(step, next);
      } else {
        next = found->second;
      }
      at = next;
      tree.nodes_[at].terminal_count++;
    }
    tree.nodes_[at].terminal = true;
  }
  return tree;
}

inline Json path_set_to_json(const PathSet& set) {
  Json paths = Json::array();
  for (const auto& p : set.paths) {
    paths.push_back(Json{{"steps", p.steps},
                         {"length", p.length()},
                         {"optimal", p.length() == set.optimal_length}});
  }
  return Json{{"optimal_length", set.optimal_length}, {"paths", std::move(paths)}};
}

}  // namespace agentpath
