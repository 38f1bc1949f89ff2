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
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentpath/call.hpp"
#include "agentpath/enumerate.hpp"
#include "agentpath/model.hpp"

namespace agentpath {

enum class ErrorClass {
  ToolError,
  ParamNameHallucination,
  ParamValueHallucination,
  ParamValueError,
  ProtocolError,
};

inline std::string_view to_string(ErrorClass e) {
  switch (e) {
    case ErrorClass::ToolError: return "ToolError";
    case ErrorClass::ParamNameHallucination: return "ParamNameHallucination";
    case ErrorClass::ParamValueHallucination: return "ParamValueHallucination";
    case ErrorClass::ParamValueError: return "ParamValueError";
    case ErrorClass::ProtocolError: return "ProtocolError";
  }
  return "?";
}

inline constexpr ErrorClass kAllErrorClasses[] = {
    ErrorClass::ToolError, ErrorClass::ParamNameHallucination, ErrorClass::ParamValueHallucination,
    ErrorClass::ParamValueError, ErrorClass::ProtocolError};

struct MatchState {
  DecisionTree::NodeId node = DecisionTree::root();
  std::size_t matched_calls = 0;
  std::size_t steps_taken = 0;
  std::optional<std::size_t> failure_step;

  bool failed() const noexcept { return failure_step.has_value(); }
};

struct MatchResult {
  bool correct = false;
  double ap = 0.0;
  bool optimal = false;
  std::optional<std::size_t> failure_step;
  std::optional<ErrorClass> error;

  Json to_json() const {
    Json j{{"correct", correct}, {"ap", ap}, {"optimal", optimal}};
    j["failure_step"] = failure_step ? Json(*failure_step) : Json(nullptr);
    j["error"] = error ? Json(to_string(*error)) : Json(nullptr);
    return j;
  }
};

/// Consumes one agent step. A step equal to an outgoing edge descends;
/// anything else (including any step once a terminal is reached) fails here.
inline MatchState advance(MatchState state, const DecisionTree& tree, const StepGroup& step) {
  if (state.failed()) return state;
  if (auto next = tree.child(state.node, step)) {
    state.node = *next;
    state.matched_calls += step.size();
    state.steps_taken++;
  } else {
    state.failure_step = state.steps_taken;
  }
  return state;
}

inline MatchResult finalize(const MatchState& state, const DecisionTree& tree,
                            std::size_t optimal_length) {
  MatchResult r;
  r.correct = !state.failed() && tree.node(state.node).terminal;
  const std::size_t total = tree.total_calls();
  if (r.correct) {
    r.ap = 1.0;
  } else if (total > 0) {
    r.ap = static_cast<double>(state.matched_calls) / static_cast<double>(total);
  }
  r.optimal = r.correct && state.steps_taken == optimal_length;
  if (!r.correct) r.failure_step = state.failure_step.value_or(state.steps_taken);
  return r;
}

/// Runs a whole tool-step sequence through the tree.
inline MatchState match_steps(const DecisionTree& tree, std::span<const StepGroup> steps) {
  MatchState state;
  for (const auto& step : steps) {
    state = advance(state, tree, step);
    if (state.failed()) break;
  }
  return state;
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

/// Buckets a wrong call: unknown tool, invented parameter name, value that
/// appears nowhere in the gold candidates or dialogue, or a wrong value.
inline ErrorClass classify_error(const ToolCall& bad_call, std::span<const StepGroup> expected,
                                 std::span<const ToolSpec> schemas, std::string_view context_text) {
  const bool tool_expected = std::any_of(expected.begin(), expected.end(), [&](const StepGroup& g) {
    return std::any_of(g.calls().begin(), g.calls().end(),
                       [&](const ToolCall& c) { return c.tool() == bad_call.tool(); });
  });
  if (!tool_expected) return ErrorClass::ToolError;

  const auto schema = std::find_if(schemas.begin(), schemas.end(),
                                   [&](const ToolSpec& t) { return t.name == bad_call.tool(); });
  if (schema != schemas.end()) {
    for (const auto& [key, _] : bad_call.arguments().items()) {
      if (!schema->parameters.contains(key)) return ErrorClass::ParamNameHallucination;
    }
  }

  const std::string context = detail::lower(context_text);
  for (const auto& [key, value] : bad_call.arguments().items()) {
    const std::string rendered = render_value(value);
    bool in_gold = false;
    for (const auto& g : expected) {
      for (const auto& c : g.calls()) {
        for (const auto& [gk, gv] : c.arguments().items()) {
          if (render_value(gv) == rendered) in_gold = true;
        }
      }
    }
    if (!in_gold && context.find(detail::lower(rendered)) == std::string::npos) {
      return ErrorClass::ParamValueHallucination;
    }
  }
  return ErrorClass::ParamValueError;
}

/// Classifies a failed multi-call step by its first call (in canonical
/// order) that belongs to no expected edge; falls back to the first call.
inline ErrorClass classify_step_error(const StepGroup& step, std::span<const StepGroup> expected,
                                      std::span<const ToolSpec> schemas, std::string_view context_text) {
  if (step.empty()) return ErrorClass::ProtocolError;
  for (const auto& call : step.calls()) {
    const bool known = std::any_of(expected.begin(), expected.end(), [&](const StepGroup& g) {
      return std::find(g.calls().begin(), g.calls().end(), call) != g.calls().end();
    });
    if (!known) return classify_error(call, expected, schemas, context_text);
  }
  return classify_error(step.calls().front(), expected, schemas, context_text);
}

}  // namespace agentpath
