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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "agentpath/enumerate.hpp"
#include "agentpath/error.hpp"
#include "agentpath/harness.hpp"
#include "agentpath/model.hpp"

namespace agentpath {

using PolicyCombination = std::vector<CoarsePolicy>;

inline constexpr CoarsePolicy kCoarsePolicies[] = {CoarsePolicy::Single, CoarsePolicy::Multi,
                                                   CoarsePolicy::Chat, CoarsePolicy::Clarify};

/// All 4^n ordered policy sequences of length n, lexicographic in
/// Single < Multi < Chat < Clarify.
inline std::vector<PolicyCombination> enumerate_policy_combinations(std::size_t n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidLength, "combination length must be 1..4");
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 4;
  std::vector<PolicyCombination> out;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    PolicyCombination combo(n);
    std::size_t rest = code;
    for (std::size_t pos = n; pos-- > 0;) {
      combo[pos] = kCoarsePolicies[rest % 4];
      rest /= 4;
    }
    out.push_back(std::move(combo));
  }
  return out;
}

namespace detail {

struct ToolTemplate {
  const char* name;
  const char* phrase;
};

inline constexpr ToolTemplate kToolPool[] = {
    {"getCityForecast", "the weather forecast"},
    {"getAirQuality", "the air quality"},
    {"searchHotels", "available hotels"},
    {"findRestaurants", "restaurant options"},
    {"getTrafficStatus", "the traffic status"},
    {"listEvents", "local events"},
    {"getExchangeRate", "the local exchange rate"},
    {"bookTaxi", "a taxi booking"},
};

inline constexpr const char* kSyllables[] = {"zar", "vel", "mor", "tik", "ostr", "quen",
                                             "bal", "ury", "dran", "peli", "kov", "sela"};

inline std::string hex4(std::uint64_t v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04x", static_cast<unsigned>(v & 0xffff));
  return buf;
}

inline std::vector<ToolSpec> tool_specs() {
  std::vector<ToolSpec> out;
  for (const auto& t : kToolPool) {
    ToolSpec spec;
    spec.name = t.name;
    spec.description = std::string("Returns ") + t.phrase + " for a city on a date.";
    spec.parameters["city"] = ParamSpec{"string", true, Json::object()};
    spec.parameters["date"] = ParamSpec{"string", true, Json{{"format", "YYYY-MM-DD"}}};
    spec.parameters["source"] = ParamSpec{"string", false, Json::object()};
    out.push_back(std::move(spec));
  }
  return out;
}

inline char policy_letter(PolicyType p) {
  switch (p) {
    case PolicyType::Single: return 'S';
    case PolicyType::MultiSerial: return 'R';
    case PolicyType::MultiParallel: return 'P';
    case PolicyType::MultiMixed: return 'M';
    case PolicyType::Chat: return 'C';
    case PolicyType::Clarify: return 'Q';
  }
  return '?';
}

inline char hiding_letter(HidingStrategy h) {
  switch (h) {
    case HidingStrategy::None: return 'n';
    case HidingStrategy::Omit: return 'o';
    case HidingStrategy::Reference: return 'r';
    case HidingStrategy::LongContext: return 'l';
  }
  return '?';
}

// How a task names the city it is about.
inline std::string city_phrase(HidingStrategy h, const std::string& city) {
  switch (h) {
    case HidingStrategy::None: return "in " + city;
    case HidingStrategy::Omit: return "there as well";
    case HidingStrategy::Reference: return "in that same city";
    case HidingStrategy::LongContext: return "in the city from my very first request";
  }
  return city;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

}  // namespace detail

/// Builds a synthetic case with the requested policy per task. Content is
/// templated; every scripted observation carries a unique "OBS-" token and
/// every fresh city is a unique generated name.
inline TestCase generate_case(const std::vector<PolicyType>& policies,
                              const std::vector<HidingStrategy>& hiding, std::uint64_t seed) {
  if (policies.empty() || policies.size() > 4) {
    throw Error(ErrorCode::InvalidPlan, "a case has 1 to 4 tasks");
  }
  if (hiding.size() != policies.size()) {
    throw Error(ErrorCode::InvalidPlan, "hiding plan length differs from policy combination");
  }
  if (hiding.front() != HidingStrategy::None) {
    throw Error(ErrorCode::InvalidPlan, "the first task cannot hide information");
  }
  for (std::size_t k = 1; k < hiding.size(); ++k) {
    if (hiding[k] == HidingStrategy::LongContext && k < 2) {
      throw Error(ErrorCode::InvalidPlan, "long-context hiding needs a task at least two back");
    }
  }

  std::mt19937_64 rng(seed);
  TestCase c;
  std::string id = "g" + detail::hex4(seed >> 16) + detail::hex4(seed) + "-";
  for (auto p : policies) id += detail::policy_letter(p);
  id += '-';
  for (auto h : hiding) id += detail::hiding_letter(h);
  c.id = id;
  c.env_info = "Current time: 2024-07-12 09:00 (Friday)";
  c.tools = detail::tool_specs();
  const std::string token_stem = "OBS-" + detail::hex4(seed >> 32) + detail::hex4(seed);

  std::vector<std::string> cities;
  for (std::size_t k = 0; k < policies.size(); ++k) {
    const PolicyType policy = policies[k];
    const HidingStrategy hide = hiding[k];
    std::string city;
    switch (hide) {
      case HidingStrategy::None:
        city = std::string(detail::kSyllables[rng() % 12]) + detail::kSyllables[rng() % 12];
        city[0] = static_cast<char>(city[0] - 'a' + 'A');
        city += detail::hex4(rng());
        break;
      case HidingStrategy::Omit:
      case HidingStrategy::Reference: city = cities[k - 1]; break;
      case HidingStrategy::LongContext: city = cities[0]; break;
    }
    cities.push_back(city);
    const std::string where = detail::city_phrase(hide, city);
    const std::string date = "2024-07-" + std::to_string(13 + k);

    Task task;
    task.gold_policy = policy;
    task.hiding = hide;

    if (policy == PolicyType::Chat) {
      task.user_text = "Thanks! Out of curiosity, what makes a trip " + where + " worthwhile?";
      task.gold_summary = "Travellers usually enjoy the old quarter and the riverside walks.";
      c.tasks.push_back(std::move(task));
      continue;
    }

    // Distinct tools for this task's calls.
    std::vector<std::size_t> pool(std::size(detail::kToolPool));
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = pool.size() - 1; i > 0; --i) std::swap(pool[i], pool[rng() % (i + 1)]);

    if (policy == PolicyType::Clarify) {
      const auto& tool = detail::kToolPool[pool[0]];
      task.user_text = std::string("Could you get me ") + tool.phrase + " " + where + "?";
      task.gold_clarify_params = {"date"};
      task.gold_summary = "Which date should I use for that?";
      c.tasks.push_back(std::move(task));
      continue;
    }

    std::size_t node_count = 1;
    std::vector<Edge> edges;
    switch (policy) {
      case PolicyType::MultiParallel: node_count = 2; break;
      case PolicyType::MultiSerial:
        node_count = 2;
        edges = {{0, 1}};
        break;
      case PolicyType::MultiMixed:
        node_count = 4;
        edges = {{1, 2}, {0, 3}, {2, 3}};
        break;
      default: break;
    }

    std::vector<std::vector<NodeIndex>> preds(node_count);
    for (const auto& [a, b] : edges) preds[b].push_back(a);

    std::vector<std::string> tokens;
    std::vector<ToolCall> nodes;
    std::string wants;
    for (std::size_t i = 0; i < node_count; ++i) {
      const auto& tool = detail::kToolPool[pool[i]];
      tokens.push_back(token_stem + "-" + std::to_string(k) + "-" + std::to_string(i));
      Json args{{"city", city}, {"date", date}};
      if (!preds[i].empty()) {
        std::string source;
        for (NodeIndex p : preds[i]) source += (source.empty() ? "" : "+") + tokens[p];
        args["source"] = source;
      }
      nodes.emplace_back(tool.name, args);
      if (i > 0) wants += i + 1 == node_count ? " and " : ", ";
      wants += tool.phrase;
    }

    if (policy == PolicyType::Single) {
      task.user_text = "Please look up " + wants + " " + where + " for " + date + ".";
    } else if (edges.empty()) {
      task.user_text = "For " + date + ", check " + wants + " " + where + ".";
    } else {
      task.user_text = "For " + date + ", I need " + wants + " " + where +
                       "; some of these depend on the results of the others.";
    }
    task.gold_summary = "Everything you asked about for " + date + " is covered above.";

    for (std::size_t i = 0; i < node_count; ++i) {
      task.scripted_observations[nodes[i]] =
          Observation{200, Json{{"result", std::string(detail::kToolPool[pool[i]].phrase) + " retrieved"},
                                {"token", tokens[i]}}};
    }
    task.gold_graph = build_graph(std::move(nodes), std::move(edges));
    c.tasks.push_back(std::move(task));
  }
  validate_case(c);
  return c;
}

/// Feasible default hiding plan: nothing hidden in the first task, later
/// tasks cycle through Omit / Reference / LongContext (the last only from
/// the third task on).
inline std::vector<HidingStrategy> default_hiding_plan(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<HidingStrategy> plan{HidingStrategy::None};
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t options = k >= 2 ? 3 : 2;
    constexpr HidingStrategy choices[] = {HidingStrategy::Omit, HidingStrategy::Reference,
                                          HidingStrategy::LongContext};
    plan.push_back(choices[rng() % options]);
  }
  return plan;
}

/// Refines each Multi slot to a serial, parallel or mixed subtype by seed.
inline TestCase generate_case(const PolicyCombination& combo,
                              const std::vector<HidingStrategy>& hiding, std::uint64_t seed) {
  std::mt19937_64 rng(detail::mix(seed, 0x5eed));
  std::vector<PolicyType> fine;
  for (auto p : combo) {
    switch (p) {
      case CoarsePolicy::Single: fine.push_back(PolicyType::Single); break;
      case CoarsePolicy::Multi: {
        constexpr PolicyType subtypes[] = {PolicyType::MultiSerial, PolicyType::MultiParallel,
                                           PolicyType::MultiMixed};
        fine.push_back(subtypes[rng() % 3]);
        break;
      }
      case CoarsePolicy::Chat: fine.push_back(PolicyType::Chat); break;
      case CoarsePolicy::Clarify: fine.push_back(PolicyType::Clarify); break;
    }
  }
  return generate_case(fine, hiding, seed);
}

/// `per_combo` cases for every policy combination of each requested length.
inline std::vector<TestCase> generate_corpus(const std::vector<std::size_t>& task_counts,
                                             std::size_t per_combo, std::uint64_t seed) {
  std::vector<TestCase> out;
  for (std::size_t n : task_counts) {
    const auto combos = enumerate_policy_combinations(n);
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
      for (std::size_t r = 0; r < per_combo; ++r) {
        const std::uint64_t s = detail::mix(detail::mix(detail::mix(seed, n), ci), r);
        out.push_back(generate_case(combos[ci], default_hiding_plan(n, s), s));
      }
    }
  }
  return out;
}

/// 256 single-task cases plus 768 multi-task cases (16x every 2-task
/// combination, 4x every 3-task one, 1x every 4-task one).
inline std::vector<TestCase> generate_full_preset(std::uint64_t seed) {
  std::vector<TestCase> out = generate_corpus({1}, 64, seed);
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{2, 16}, {3, 4}, {4, 1}}) {
    auto part = generate_corpus({n}, k, seed);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus files

inline std::string case_document(const TestCase& c) { return case_to_json(c).dump(2) + "\n"; }

inline void write_corpus(const std::filesystem::path& dir, const std::vector<TestCase>& cases) {
  std::filesystem::create_directories(dir);
  for (const auto& c : cases) {
    std::ofstream out(dir / (c.id + ".json"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / (c.id + ".json")).string());
    out << case_document(c);
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TestCase parse_case_document(std::string_view text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidCase, "case document is not JSON");
  return case_from_json(j);
}

/// Loads every *.json file in `dir`, in file-name order.
inline std::vector<TestCase> read_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TestCase> out;
  for (const auto& f : files) {
    try {
      out.push_back(parse_case_document(read_file(f)));
    } catch (const Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scripted agents

struct MockAgentKind {
  enum class Kind { Perfect, SerializeParallel, WrongTool, DropHiddenInfo };
  Kind kind = Kind::Perfect;
  std::uint64_t seed = 0;

  static MockAgentKind parse(std::string_view name, std::uint64_t seed = 0) {
    if (name == "perfect") return {Kind::Perfect, seed};
    if (name == "serialize") return {Kind::SerializeParallel, seed};
    if (name == "wrong-tool") return {Kind::WrongTool, seed};
    if (name == "drop-hidden") return {Kind::DropHiddenInfo, seed};
    throw Error(ErrorCode::ConnectorFailure, "unknown mock agent '" + std::string(name) + "'");
  }
};

/// Replays gold data, optionally with a deliberate defect. Stateless: the
/// reply depends only on (case, task, turn) from the request.
class MockAgent {
 public:
  MockAgent(MockAgentKind kind, std::vector<TestCase> cases) : kind_(kind) {
    for (auto& c : cases) cases_.emplace(c.id, std::move(c));
  }

  Json respond(const Json& request) const {
    const auto it = cases_.find(request.at("case_id").get<std::string>());
    if (it == cases_.end()) return Json{{"text", "I do not know this conversation."}};
    const TestCase& c = it->second;
    const std::size_t task_index = request.at("task_index").get<std::size_t>();
    const std::size_t turn = request.at("turn").get<std::size_t>();
    const Task& task = c.tasks.at(task_index);

    if (kind_.kind == MockAgentKind::Kind::DropHiddenInfo && task.hiding != HidingStrategy::None) {
      return Json{{"text", "Sorry, could you repeat the details from our earlier conversation?"}};
    }
    if (!uses_tools(task.gold_policy)) return Json{{"text", task.gold_summary}};

    const auto plan = planned_steps(c, task_index);
    if (turn >= plan.size()) return Json{{"text", task.gold_summary}};
    return Json{{"tool_calls", plan[turn].to_json()}};
  }

  std::unique_ptr<Connector> connector() const {
    return std::make_unique<FunctionConnector>([this](const Json& r) { return respond(r); });
  }

 private:
  std::vector<StepGroup> planned_steps(const TestCase& c, std::size_t task_index) const {
    const Task& task = c.tasks[task_index];
    const PathSet paths = enumerate_paths(task.gold_graph);
    std::vector<StepGroup> steps;
    for (const auto& s : gold_order(paths).steps) {
      if (kind_.kind == MockAgentKind::Kind::SerializeParallel) {
        for (NodeIndex i : s) steps.push_back(StepGroup{task.gold_graph.node(i)});
      } else {
        steps.push_back(resolve_step(s, task.gold_graph.nodes()));
      }
    }
    if (kind_.kind == MockAgentKind::Kind::WrongTool) {
      const std::uint64_t h =
          detail::mix(detail::mix(kind_.seed, detail::fnv1a(c.id)), task_index);
      const std::size_t victim = h % task.gold_graph.size();
      std::size_t seen = 0;
      for (auto& step : steps) {
        if (victim < seen + step.size()) {
          std::vector<ToolCall> calls = step.calls();
          ToolCall& bad = calls[victim - seen];
          bad = ToolCall(bad.tool() + "_unknown", bad.arguments());
          step = StepGroup(std::move(calls));
          break;
        }
        seen += step.size();
      }
    }
    return steps;
  }

  MockAgentKind kind_;
  std::map<std::string, TestCase> cases_;
};

}  // namespace agentpath
