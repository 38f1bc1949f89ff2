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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "agentpath/call.hpp"
#include "agentpath/error.hpp"
#include "agentpath/graph.hpp"

namespace agentpath {

enum class PolicyType { Single, MultiSerial, MultiParallel, MultiMixed, Chat, Clarify };

/// Four-way projection used for transition counting.
enum class CoarsePolicy { Single, Multi, Chat, Clarify };

enum class HidingStrategy { None, Omit, Reference, LongContext };

enum class ChallengeMode { C1_FullExecution, C2_RedactedHistory, C3_InjectedHistory };

constexpr CoarsePolicy coarse(PolicyType p) noexcept {
  switch (p) {
    case PolicyType::Single: return CoarsePolicy::Single;
    case PolicyType::MultiSerial:
    case PolicyType::MultiParallel:
    case PolicyType::MultiMixed: return CoarsePolicy::Multi;
    case PolicyType::Chat: return CoarsePolicy::Chat;
    case PolicyType::Clarify: return CoarsePolicy::Clarify;
  }
  return CoarsePolicy::Chat;
}

constexpr bool uses_tools(PolicyType p) noexcept {
  const auto c = coarse(p);
  return c == CoarsePolicy::Single || c == CoarsePolicy::Multi;
}

inline std::string_view to_string(PolicyType p) {
  switch (p) {
    case PolicyType::Single: return "Single";
    case PolicyType::MultiSerial: return "MultiSerial";
    case PolicyType::MultiParallel: return "MultiParallel";
    case PolicyType::MultiMixed: return "MultiMixed";
    case PolicyType::Chat: return "Chat";
    case PolicyType::Clarify: return "Clarify";
  }
  return "?";
}

inline std::string_view to_string(CoarsePolicy p) {
  switch (p) {
    case CoarsePolicy::Single: return "Single";
    case CoarsePolicy::Multi: return "Multi";
    case CoarsePolicy::Chat: return "Chat";
    case CoarsePolicy::Clarify: return "Clarify";
  }
  return "?";
}

inline std::string_view to_string(HidingStrategy h) {
  switch (h) {
    case HidingStrategy::None: return "None";
    case HidingStrategy::Omit: return "Omit";
    case HidingStrategy::Reference: return "Reference";
    case HidingStrategy::LongContext: return "LongContext";
  }
  return "?";
}

inline std::string_view to_string(ChallengeMode m) {
  switch (m) {
    case ChallengeMode::C1_FullExecution: return "c1";
    case ChallengeMode::C2_RedactedHistory: return "c2";
    case ChallengeMode::C3_InjectedHistory: return "c3";
  }
  return "?";
}

namespace detail {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const E (&values)[N], std::string_view what) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorCode::InvalidCase, "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

}  // namespace detail

inline PolicyType parse_policy_type(std::string_view s) {
  constexpr PolicyType all[] = {PolicyType::Single,     PolicyType::MultiSerial,
                                PolicyType::MultiParallel, PolicyType::MultiMixed,
                                PolicyType::Chat,       PolicyType::Clarify};
  return detail::parse_enum(s, all, "policy type");
}

inline HidingStrategy parse_hiding(std::string_view s) {
  constexpr HidingStrategy all[] = {HidingStrategy::None, HidingStrategy::Omit,
                                    HidingStrategy::Reference, HidingStrategy::LongContext};
  return detail::parse_enum(s, all, "hiding strategy");
}

inline ChallengeMode parse_mode(std::string_view s) {
  constexpr ChallengeMode all[] = {ChallengeMode::C1_FullExecution,
                                   ChallengeMode::C2_RedactedHistory,
                                   ChallengeMode::C3_InjectedHistory};
  return detail::parse_enum(s, all, "challenge mode");
}

struct ParamSpec {
  std::string type = "string";
  bool required = false;
  Json structure = Json::object();  // enum values, item or property schemas

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct ToolSpec {
  std::string name;
  std::string description;
  std::map<std::string, ParamSpec> parameters;

  std::vector<std::string> required_parameters() const {
    std::vector<std::string> out;
    for (const auto& [k, p] : parameters) {
      if (p.required) out.push_back(k);
    }
    return out;
  }

  Json to_json() const {
    Json params = Json::object();
    for (const auto& [k, p] : parameters) {
      params[k] = Json{{"type", p.type}, {"required", p.required}, {"structure", p.structure}};
    }
    return Json{{"name", name}, {"description", description}, {"parameters", std::move(params)}};
  }

  static ToolSpec from_json(const Json& j) {
    ToolSpec t;
    t.name = j.at("name").get<std::string>();
    t.description = j.value("description", "");
    const Json params = j.value("parameters", Json::object());
    for (const auto& [k, p] : params.items()) {
      t.parameters[k] = ParamSpec{p.value("type", "string"), p.value("required", false),
                                  p.value("structure", Json::object())};
    }
    return t;
  }

  friend bool operator==(const ToolSpec&, const ToolSpec&) = default;
};

struct Observation {
  int status_code = 200;
  Json response = Json::object();

  Json to_json() const { return Json{{"status_code", status_code}, {"response", response}}; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Task {
  std::string user_text;
  PolicyType gold_policy = PolicyType::Chat;
  HidingStrategy hiding = HidingStrategy::None;
  DependencyGraph gold_graph;
  std::vector<std::string> gold_clarify_params;
  std::string gold_summary;
  std::map<ToolCall, Observation> scripted_observations;

  friend bool operator==(const Task&, const Task&) = default;
};

struct TestCase {
  std::string id;
  std::vector<ToolSpec> tools;
  std::vector<Task> tasks;
  std::string env_info;

  const ToolSpec* find_tool(std::string_view name) const {
    for (const auto& t : tools) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// One agent reply: either a group of parallel tool calls or text.
class TurnOutput {
 public:
  static TurnOutput tool_calls(StepGroup step) { return TurnOutput(std::move(step)); }
  static TurnOutput text(std::string text) { return TurnOutput(std::move(text)); }

  bool is_tool_calls() const noexcept { return std::holds_alternative<StepGroup>(value_); }
  bool is_text() const noexcept { return !is_tool_calls(); }
  const StepGroup& step() const { return std::get<StepGroup>(value_); }
  const std::string& text() const { return std::get<std::string>(value_); }

  Json to_json() const {
    if (is_tool_calls()) return Json{{"tool_calls", step().to_json()}};
    return Json{{"text", text()}};
  }

  friend bool operator==(const TurnOutput&, const TurnOutput&) = default;

 private:
  explicit TurnOutput(StepGroup s) : value_(std::move(s)) {}
  explicit TurnOutput(std::string t) : value_(std::move(t)) {}
  std::variant<StepGroup, std::string> value_;
};

enum class ResponseKind { ToolPolicy, TextPolicy };

inline ResponseKind classify_output(const TurnOutput& output) {
  return output.is_tool_calls() ? ResponseKind::ToolPolicy : ResponseKind::TextPolicy;
}

enum class Termination { TextEmitted, StepBudget, ProtocolError };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TextEmitted: return "TextEmitted";
    case Termination::StepBudget: return "StepBudget";
    case Termination::ProtocolError: return "ProtocolError";
  }
  return "?";
}

struct Trajectory {
  std::string case_id;
  std::size_t task_index = 0;
  std::vector<TurnOutput> steps;
  Termination terminated_by = Termination::TextEmitted;

  /// The tool-call steps, in order, excluding any trailing text.
  std::vector<StepGroup> tool_steps() const {
    std::vector<StepGroup> out;
    for (const auto& s : steps) {
      if (s.is_tool_calls()) out.push_back(s.step());
    }
    return out;
  }

  Json to_json() const {
    Json steps_json = Json::array();
    for (const auto& s : steps) steps_json.push_back(s.to_json());
    return Json{{"case_id", case_id},
                {"task_index", task_index},
                {"steps", std::move(steps_json)},
                {"terminated_by", to_string(terminated_by)}};
  }
};

/// Multi-call subtype from graph shape: no edges is parallel, a frontier of
/// exactly one node at every step is serial, anything else is mixed.
inline PolicyType derive_policy_subtype(const DependencyGraph& graph) {
  if (graph.empty()) throw Error(ErrorCode::EmptyGraph, "cannot derive a policy from an empty graph");
  if (graph.size() == 1) return PolicyType::Single;
  if (graph.edges().empty()) return PolicyType::MultiParallel;

  NodeSet visited;
  while (visited.size() < graph.size()) {
    const auto f = frontier(graph, visited);
    if (f.eligible.size() != 1) return PolicyType::MultiMixed;
    visited.insert(*f.eligible.begin());
  }
  return PolicyType::MultiSerial;
}

// ---------------------------------------------------------------------------
// Corpus documents

inline Json task_to_json(const Task& t) {
  Json observations = Json::array();
  for (const auto& [call, obs] : t.scripted_observations) {
    observations.push_back(Json{{"name", call.tool()},
                                {"arguments", call.arguments()},
                                {"status_code", obs.status_code},
                                {"response", obs.response}});
  }
  return Json{{"user_text", t.user_text},
              {"gold_policy", to_string(t.gold_policy)},
              {"hiding", to_string(t.hiding)},
              {"gold_graph", t.gold_graph.to_json()},
              {"gold_clarify_params", t.gold_clarify_params},
              {"gold_summary", t.gold_summary},
              {"scripted_observations", std::move(observations)}};
}

inline Task task_from_json(const Json& j) {
  Task t;
  t.user_text = j.at("user_text").get<std::string>();
  t.gold_policy = parse_policy_type(j.at("gold_policy").get<std::string>());
  t.hiding = parse_hiding(j.value("hiding", "None"));
  if (j.contains("gold_graph")) t.gold_graph = graph_from_json(j["gold_graph"]);
  t.gold_clarify_params = j.value("gold_clarify_params", std::vector<std::string>{});
  t.gold_summary = j.value("gold_summary", "");
  for (const auto& o : j.value("scripted_observations", Json::array())) {
    t.scripted_observations[ToolCall::from_json(o)] =
        Observation{o.value("status_code", 200), o.value("response", Json::object())};
  }
  return t;
}

inline Json case_to_json(const TestCase& c) {
  Json tools = Json::array();
  for (const auto& t : c.tools) tools.push_back(t.to_json());
  Json tasks = Json::array();
  for (const auto& t : c.tasks) tasks.push_back(task_to_json(t));
  return Json{{"id", c.id}, {"env_info", c.env_info}, {"tools", std::move(tools)},
              {"tasks", std::move(tasks)}};
}

/// Structural checks a case must pass before it is evaluated.
inline void validate_case(const TestCase& c) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidCase, "case '" + c.id + "': " + what);
  };
  if (c.id.empty()) fail("empty id");
  if (c.tasks.empty() || c.tasks.size() > 4) fail("must have 1 to 4 tasks");

  std::set<std::string> names;
  for (const auto& tool : c.tools) {
    if (!names.insert(tool.name).second) fail("duplicate tool '" + tool.name + "'");
  }

  for (std::size_t i = 0; i < c.tasks.size(); ++i) {
    const Task& t = c.tasks[i];
    const std::string at = "task " + std::to_string(i) + ": ";
    if (uses_tools(t.gold_policy)) {
      if (t.gold_graph.empty()) fail(at + "tool policy without a gold graph");
      const auto derived = derive_policy_subtype(t.gold_graph);
      if (derived != t.gold_policy) {
        fail(at + "gold policy " + std::string(to_string(t.gold_policy)) +
             " disagrees with graph shape " + std::string(to_string(derived)));
      }
      for (const auto& call : t.gold_graph.nodes()) {
        if (!names.contains(call.tool())) fail(at + "gold call to unknown tool '" + call.tool() + "'");
      }
    } else if (!t.gold_graph.empty()) {
      fail(at + "chat/clarify task must not carry a gold graph");
    }
    if (t.gold_policy == PolicyType::Clarify && t.gold_clarify_params.empty()) {
      fail(at + "clarify task lists no missing parameters");
    }
  }
}

inline TestCase case_from_json(const Json& j) {
  TestCase c;
  try {
    c.id = j.at("id").get<std::string>();
    c.env_info = j.value("env_info", "");
    for (const auto& t : j.at("tools")) c.tools.push_back(ToolSpec::from_json(t));
    for (const auto& t : j.at("tasks")) c.tasks.push_back(task_from_json(t));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidCase, e.what());
  }
  validate_case(c);
  return c;
}

}  // namespace agentpath
