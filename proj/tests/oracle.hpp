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

// Brute-force references used only by tests. Nothing here calls the
// frontier or enumeration code it is checking.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Step = std::vector<std::size_t>;
using Path = std::vector<Step>;
using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

// True if every node in each step has all its prerequisites in earlier steps.
inline bool respects(const Path& path, const Edges& edges) {
  std::vector<std::size_t> step_of(64, SIZE_MAX);
  for (std::size_t s = 0; s < path.size(); ++s) {
    for (auto v : path[s]) step_of[v] = s;
  }
  for (const auto& [a, b] : edges) {
    if (!(step_of[a] < step_of[b])) return false;
  }
  return true;
}

inline void extend(std::size_t n, std::uint64_t remaining, Path& prefix, const Edges& edges,
                   std::set<Path>& out) {
  if (remaining == 0) {
    if (respects(prefix, edges)) out.insert(prefix);
    return;
  }
  // Every non-empty subset of the remaining nodes, valid or not.
  for (std::uint64_t sub = remaining; sub; sub = (sub - 1) & remaining) {
    Step step;
    for (std::size_t i = 0; i < n; ++i) {
      if (sub >> i & 1) step.push_back(i);
    }
    prefix.push_back(step);
    extend(n, remaining & ~sub, prefix, edges, out);
    prefix.pop_back();
  }
}

/// All ordered partitions of {0..n-1} into non-empty steps that respect the
/// edges. Exponential; intended for n <= 6.
inline std::set<Path> all_paths(std::size_t n, const Edges& edges) {
  std::set<Path> out;
  Path prefix;
  extend(n, (std::uint64_t{1} << n) - 1, prefix, edges, out);
  return out;
}

/// Direct indegree count: unvisited nodes with no unvisited prerequisite.
inline std::set<std::size_t> ready(std::size_t n, const Edges& edges, const std::set<std::size_t>& visited) {
  std::vector<int> indegree(n, 0);
  for (const auto& [a, b] : edges) {
    if (!visited.count(a)) indegree[b]++;
  }
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!visited.count(i) && indegree[i] == 0) out.insert(i);
  }
  return out;
}

/// Random DAG: edges only go from lower to higher index, then labels are
/// shuffled so index order carries no information.
inline Edges random_dag(std::size_t n, double density, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Edges edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (coin(rng) < density) edges.emplace_back(perm[a], perm[b]);
    }
  }
  return edges;
}

inline std::uint64_t fubini(std::size_t n) {
  // a(n) = sum_{k=1..n} C(n,k) a(n-k), a(0) = 1
  std::vector<std::uint64_t> a(n + 1, 0);
  a[0] = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    std::uint64_t c = 1;
    for (std::size_t k = 1; k <= m; ++k) {
      c = c * (m - k + 1) / k;
      a[m] += c * a[m - k];
    }
  }
  return a[n];
}

}  // namespace oracle
