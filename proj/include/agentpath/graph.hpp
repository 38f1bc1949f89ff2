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
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agentpath/call.hpp"
#include "agentpath/error.hpp"

namespace agentpath {

using NodeIndex = std::size_t;
using NodeSet = std::set<NodeIndex>;
using Edge = std::pair<NodeIndex, NodeIndex>;

/// Unvisited nodes whose every prerequisite has been visited.
struct Frontier {
  NodeSet eligible;

  friend bool operator==(const Frontier&, const Frontier&) = default;
};

/// Gold dependency DAG for one task. Edge (a, b) means a must complete
/// before b starts. Only constructible through build_graph() or as the empty
/// graph used by chat/clarify tasks.
class DependencyGraph {
 public:
  DependencyGraph() = default;

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<ToolCall>& nodes() const noexcept { return nodes_; }
  const ToolCall& node(NodeIndex i) const { return nodes_.at(i); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<NodeIndex>& predecessors(NodeIndex i) const { return preds_.at(i); }
  const std::vector<NodeIndex>& successors(NodeIndex i) const { return succs_.at(i); }

  /// Bitmask of direct predecessors; valid while size() <= 64.
  std::uint64_t predecessor_mask(NodeIndex i) const { return pred_masks_.at(i); }

  /// Frontier over a bitmask visited set; valid while size() <= 64.
  std::uint64_t frontier_mask(std::uint64_t visited) const {
    std::uint64_t out = 0;
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((visited & bit) == 0 && (pred_masks_[i] & ~visited) == 0) out |= bit;
    }
    return out;
  }

  Json to_json() const {
    Json nodes = Json::array();
    for (const auto& n : nodes_) nodes.push_back(n.to_json());
    Json edges = Json::array();
    for (const auto& [a, b] : edges_) edges.push_back(Json::array({a, b}));
    return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  }

  friend bool operator==(const DependencyGraph& a, const DependencyGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

  friend DependencyGraph build_graph(std::vector<ToolCall> nodes, std::vector<Edge> edges);

 private:
  std::vector<ToolCall> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeIndex>> preds_;
  std::vector<std::vector<NodeIndex>> succs_;
  std::vector<std::uint64_t> pred_masks_;
};

namespace detail {

// Returns one cycle as a node sequence (first node repeated at the end),
// or an empty vector when the graph is acyclic.
inline std::vector<NodeIndex> find_cycle(const std::vector<std::vector<NodeIndex>>& succs) {
  enum class Color { White, Grey, Black };
  const std::size_t n = succs.size();
  std::vector<Color> color(n, Color::White);
  std::vector<NodeIndex> parent(n, n);

  for (NodeIndex root = 0; root < n; ++root) {
    if (color[root] != Color::White) continue;
    // Iterative DFS: (node, next successor position).
    std::vector<std::pair<NodeIndex, std::size_t>> stack{{root, 0}};
    color[root] = Color::Grey;
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos == succs[v].size()) {
        color[v] = Color::Black;
        stack.pop_back();
        continue;
      }
      const NodeIndex w = succs[v][pos++];
      if (color[w] == Color::Grey) {
        std::vector<NodeIndex> cycle{w};
        for (NodeIndex u = v; u != w; u = parent[u]) cycle.push_back(u);
        cycle.push_back(w);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (color[w] == Color::White) {
        color[w] = Color::Grey;
        parent[w] = v;
        stack.emplace_back(w, 0);
      }
    }
  }
  return {};
}

}  // namespace detail

/// Validates and builds a dependency DAG. Duplicate edges collapse;
/// transitive edges are kept as given.
inline DependencyGraph build_graph(std::vector<ToolCall> nodes, std::vector<Edge> edges) {
  const std::size_t n = nodes.size();
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") references a node outside 0.." + std::to_string(n == 0 ? 0 : n - 1));
    }
    if (a == b) throw Error(ErrorCode::SelfEdge, "self edge on node " + std::to_string(a));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  DependencyGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.preds_.assign(n, {});
  g.succs_.assign(n, {});
  g.pred_masks_.assign(n, 0);
  for (const auto& [a, b] : g.edges_) {
    g.succs_[a].push_back(b);
    g.preds_[b].push_back(a);
    if (a < 64) g.pred_masks_[b] |= std::uint64_t{1} << a;
  }

  if (auto cycle = detail::find_cycle(g.succs_); !cycle.empty()) {
    std::string msg = "cycle ";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i) msg += " -> ";
      msg += std::to_string(cycle[i]);
    }
    throw Error(ErrorCode::CyclicDependency, msg);
  }
  return g;
}

inline DependencyGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidCase, "graph must be an object");
  std::vector<ToolCall> nodes;
  for (const auto& n : j.value("nodes", Json::array())) nodes.push_back(ToolCall::from_json(n));
  std::vector<Edge> edges;
  for (const auto& e : j.value("edges", Json::array())) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      throw Error(ErrorCode::InvalidCase, "edge must be a pair of node indices");
    }
    edges.emplace_back(e[0].get<NodeIndex>(), e[1].get<NodeIndex>());
  }
  return build_graph(std::move(nodes), std::move(edges));
}

/// Unvisited nodes that are ready to run once `visited` has completed.
/// `visited` must be closed under prerequisites.
inline Frontier frontier(const DependencyGraph& graph, const NodeSet& visited) {
  for (NodeIndex v : visited) {
    if (v >= graph.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "visited node " + std::to_string(v));
    }
    for (NodeIndex p : graph.predecessors(v)) {
      if (!visited.contains(p)) {
        throw Error(ErrorCode::InvalidVisitedSet,
                    "node " + std::to_string(v) + " visited before its prerequisite " +
                        std::to_string(p));
      }
    }
  }
  Frontier out;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (visited.contains(i)) continue;
    const auto& preds = graph.predecessors(i);
    if (std::all_of(preds.begin(), preds.end(), [&](NodeIndex p) { return visited.contains(p); })) {
      out.eligible.insert(i);
    }
  }
  return out;
}

}  // namespace agentpath
