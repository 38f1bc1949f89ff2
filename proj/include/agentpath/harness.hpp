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
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "agentpath/call.hpp"
#include "agentpath/enumerate.hpp"
#include "agentpath/error.hpp"
#include "agentpath/matcher.hpp"
#include "agentpath/metrics.hpp"
#include "agentpath/model.hpp"

namespace agentpath {

enum class Role { User, Assistant, ToolResult };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::ToolResult: return "tool";
  }
  return "?";
}

/// A history entry. Text for user turns and summaries; {"tool_calls": [...]}
/// for assistant actions; an array of call results for tool messages.
struct ContextMessage {
  Role role = Role::User;
  Json content;

  bool is_action() const { return role == Role::Assistant && content.is_object(); }

  Json to_json() const { return Json{{"role", to_string(role)}, {"content", content}}; }
};

struct SessionConfig {
  ChallengeMode mode = ChallengeMode::C3_InjectedHistory;
  std::optional<std::size_t> step_budget;  // default: 2 * gold calls + 2
  std::chrono::milliseconds turn_timeout{30'000};
};

inline std::size_t default_step_budget(const Task& task) { return 2 * task.gold_graph.size() + 2; }

// ---------------------------------------------------------------------------
// Static environment

inline Observation unrecognized_call() {
  return Observation{400, Json{{"error", "unrecognized call"}}};
}

/// Scripted feedback for a call; unknown calls get a generic 400 document.
inline Observation observation_for(const Task& task, const ToolCall& call) {
  if (auto it = task.scripted_observations.find(call); it != task.scripted_observations.end()) {
    return it->second;
  }
  return unrecognized_call();
}

inline Json tool_results_message(const Task& task, const StepGroup& step) {
  Json results = Json::array();
  for (const auto& call : step.calls()) {
    const Observation obs = observation_for(task, call);
    results.push_back(Json{{"name", call.tool()},
                           {"arguments", call.arguments()},
                           {"status_code", obs.status_code},
                           {"response", obs.response}});
  }
  return results;
}

// ---------------------------------------------------------------------------
// Context assembly

/// History shown to the agent before task `task_index`. Redacted history
/// keeps only user requests and summaries; injected (and full-execution)
/// history also replays each prior task's gold actions and observations.
inline std::vector<ContextMessage> assemble_context(const TestCase& c, ChallengeMode mode,
                                                    std::size_t task_index) {
  if (task_index >= c.tasks.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "task " + std::to_string(task_index) + " of case '" +
                                                c.id + "'");
  }
  std::vector<ContextMessage> out;
  for (std::size_t i = 0; i < task_index; ++i) {
    const Task& t = c.tasks[i];
    out.push_back({Role::User, t.user_text});
    if (mode != ChallengeMode::C2_RedactedHistory && uses_tools(t.gold_policy)) {
      const PathSet paths = enumerate_paths(t.gold_graph);
      for (const auto& step : gold_order(paths).steps) {
        const StepGroup calls = resolve_step(step, t.gold_graph.nodes());
        for (const auto& call : calls.calls()) {
          if (!t.scripted_observations.contains(call)) {
            throw Error(ErrorCode::MissingGoldData, "case '" + c.id + "' task " + std::to_string(i) +
                                                        ": no observation for " + call.tool());
          }
        }
        out.push_back({Role::Assistant, Json{{"tool_calls", calls.to_json()}}});
        out.push_back({Role::ToolResult, tool_results_message(t, calls)});
      }
    }
    out.push_back({Role::Assistant, t.gold_summary});
  }
  out.push_back({Role::User, c.tasks[task_index].user_text});
  return out;
}

/// Text visible to the agent, used when judging whether a value was invented.
/// Assistant actions are excluded; they are gold answers, not dialogue.
inline std::string dialogue_text(const std::vector<ContextMessage>& messages) {
  std::string out;
  for (const auto& m : messages) {
    if (m.is_action()) continue;
    out += m.content.is_string() ? m.content.get<std::string>() : m.content.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connectors

/// One agent session. Implementations are used by a single worker at a time.
class Connector {
 public:
  virtual ~Connector() = default;
  virtual Json exchange(const Json& request, std::chrono::milliseconds timeout) = 0;
};

using ConnectorFactory = std::function<std::unique_ptr<Connector>()>;

/// Adapts a plain function; used for in-process agents.
class FunctionConnector final : public Connector {
 public:
  explicit FunctionConnector(std::function<Json(const Json&)> fn) : fn_(std::move(fn)) {}
  Json exchange(const Json& request, std::chrono::milliseconds) override { return fn_(request); }

 private:
  std::function<Json(const Json&)> fn_;
};

/// Decodes an agent reply: exactly one of "tool_calls" (non-empty) or "text".
inline TurnOutput parse_reply(const Json& reply) {
  if (!reply.is_object()) throw Error(ErrorCode::ProtocolError, "reply is not an object");
  const bool has_calls = reply.contains("tool_calls");
  const bool has_text = reply.contains("text");
  if (has_calls == has_text) {
    throw Error(ErrorCode::ProtocolError, "reply must carry exactly one of tool_calls or text");
  }
  if (has_text) {
    if (!reply["text"].is_string()) throw Error(ErrorCode::ProtocolError, "text must be a string");
    return TurnOutput::text(reply["text"].get<std::string>());
  }
  const Json& calls = reply["tool_calls"];
  if (!calls.is_array() || calls.empty()) {
    throw Error(ErrorCode::ProtocolError, "tool_calls must be a non-empty array");
  }
  std::vector<ToolCall> parsed;
  try {
    for (const auto& c : calls) parsed.push_back(ToolCall::from_json(c));
  } catch (const Error& e) {
    throw Error(ErrorCode::ProtocolError, e.what());
  }
  return TurnOutput::tool_calls(StepGroup(std::move(parsed)));
}

// ---------------------------------------------------------------------------
// Turn loop and scoring

struct TaskRun {
  Trajectory trajectory;
  MatchResult result;
  std::optional<std::string> fault;  // connector/protocol problem, if any

  Json to_json() const {
    Json j{{"trajectory", trajectory.to_json()}, {"result", result.to_json()}};
    j["fault"] = fault ? Json(*fault) : Json(nullptr);
    return j;
  }
};

struct CaseResult {
  std::string case_id;
  ChallengeMode mode = ChallengeMode::C3_InjectedHistory;
  std::size_t task_count = 0;
  std::vector<TaskRun> tasks;          // every task under C1, the final task otherwise
  std::vector<CaseLabels> task_labels;  // parallel to `tasks`

  const TaskRun& final_task() const { return tasks.back(); }
  bool final_correct() const { return final_task().result.correct; }

  bool has_protocol_error() const {
    return std::any_of(tasks.begin(), tasks.end(), [](const TaskRun& t) {
      return t.result.error == ErrorClass::ProtocolError;
    });
  }

  std::vector<CaseOutcome> outcomes() const {
    std::vector<CaseOutcome> out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      out.push_back({case_id, tasks[i].trajectory.task_index, task_labels[i], tasks[i].result});
    }
    return out;
  }

  Json to_json() const {
    Json runs = Json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      Json r = tasks[i].to_json();
      r["labels"] = task_labels[i].to_json();
      runs.push_back(std::move(r));
    }
    return Json{{"case_id", case_id}, {"mode", to_string(mode)}, {"task_count", task_count},
                {"tasks", std::move(runs)}};
  }
};

inline CaseLabels labels_for(const TestCase& c, std::size_t task_index) {
  std::vector<PolicyType> seq;
  for (const auto& t : c.tasks) seq.push_back(t.gold_policy);
  const Task& t = c.tasks.at(task_index);
  return CaseLabels{ptf(seq), c.tasks.size(), t.hiding, t.gold_policy};
}

namespace detail {

inline bool mentions_any(const std::string& text, const std::vector<std::string>& names) {
  const std::string hay = lower(text);
  return std::any_of(names.begin(), names.end(),
                     [&](const std::string& n) { return hay.find(lower(n)) != std::string::npos; });
}

inline MatchResult score_text_task(const Task& task, const Trajectory& traj,
                                   std::span<const ToolSpec> tools, const std::string& dialogue) {
  MatchResult r;
  const bool answered = !traj.steps.empty() && traj.steps.front().is_text();
  if (answered) {
    r.correct = task.gold_policy == PolicyType::Chat ||
                mentions_any(traj.steps.front().text(), task.gold_clarify_params);
  }
  if (r.correct) {
    r.ap = 1.0;
    r.optimal = true;
    return r;
  }
  r.failure_step = 0;
  if (!traj.steps.empty() && traj.steps.front().is_tool_calls()) {
    r.error = classify_step_error(traj.steps.front().step(), {}, tools, dialogue);
  }
  return r;
}

inline MatchResult score_tool_task(const Task& task, const Trajectory& traj,
                                   std::span<const ToolSpec> tools, const std::string& dialogue) {
  const PathSet paths = enumerate_paths(task.gold_graph);
  const DecisionTree tree = build_decision_tree(paths, task.gold_graph.nodes());
  const std::vector<StepGroup> steps = traj.tool_steps();
  const MatchState state = match_steps(tree, steps);
  MatchResult r = finalize(state, tree, paths.optimal_length);
  if (state.failed()) {
    const auto expected = tree.edges(state.node);
    r.error = classify_step_error(steps[*state.failure_step], expected, tools, dialogue);
  }
  return r;
}

}  // namespace detail

/// Scores one finished trajectory against the task's gold data. `dialogue`
/// is the text the agent could see up to its last step.
inline MatchResult score_task(const TestCase& c, std::size_t task_index, const Trajectory& traj,
                              const std::string& dialogue) {
  const Task& task = c.tasks.at(task_index);
  MatchResult r = uses_tools(task.gold_policy)
                      ? detail::score_tool_task(task, traj, c.tools, dialogue)
                      : detail::score_text_task(task, traj, c.tools, dialogue);
  if (traj.terminated_by != Termination::TextEmitted) {
    r.correct = false;
    r.optimal = false;
    if (!r.failure_step) r.failure_step = traj.steps.size();
    if (!r.error) r.error = ErrorClass::ProtocolError;
  }
  return r;
}

/// Drives the agent through one task: at most step_budget tool steps, so at
/// most step_budget + 1 exchanges.
inline TaskRun run_task(const TestCase& c, std::size_t task_index, const SessionConfig& config,
                        Connector& connector) {
  const Task& task = c.tasks.at(task_index);
  std::vector<ContextMessage> messages = assemble_context(c, config.mode, task_index);
  const std::size_t budget = config.step_budget.value_or(default_step_budget(task));

  Json tools = Json::array();
  for (const auto& t : c.tools) tools.push_back(t.to_json());

  TaskRun run;
  run.trajectory.case_id = c.id;
  run.trajectory.task_index = task_index;
  // Dialogue seen before the first mismatch; grows with each observation.
  std::string dialogue = dialogue_text(messages);

  for (std::size_t turn = 0; turn <= budget; ++turn) {
    Json request{{"case_id", c.id}, {"task_index", task_index}, {"turn", turn},
                 {"env_info", c.env_info}, {"tools", tools}};
    Json history = Json::array();
    for (const auto& m : messages) history.push_back(m.to_json());
    request["messages"] = std::move(history);

    std::optional<TurnOutput> output;
    try {
      output = parse_reply(connector.exchange(request, config.turn_timeout));
    } catch (const Error& e) {
      run.fault = e.what();
      run.trajectory.terminated_by = Termination::ProtocolError;
      break;
    } catch (const Json::exception& e) {
      run.fault = std::string("ProtocolError: ") + e.what();
      run.trajectory.terminated_by = Termination::ProtocolError;
      break;
    }

    run.trajectory.steps.push_back(*output);
    if (output->is_text()) {
      run.trajectory.terminated_by = Termination::TextEmitted;
      break;
    }
    if (turn == budget) {
      run.trajectory.terminated_by = Termination::StepBudget;
      run.fault = "step budget of " + std::to_string(budget) + " exceeded";
      break;
    }
    const StepGroup& step = output->step();
    messages.push_back({Role::Assistant, Json{{"tool_calls", step.to_json()}}});
    messages.push_back({Role::ToolResult, tool_results_message(task, step)});
  }

  // Observations returned before the failing step are part of the context;
  // rescore with only those included.
  MatchResult first = score_task(c, task_index, run.trajectory, dialogue);
  if (first.failure_step && *first.failure_step > 0) {
    std::size_t tool_steps_seen = 0;
    for (const auto& s : run.trajectory.steps) {
      if (!s.is_tool_calls() || tool_steps_seen == *first.failure_step) break;
      dialogue += tool_results_message(task, s.step()).dump();
      dialogue += '\n';
      ++tool_steps_seen;
    }
    first = score_task(c, task_index, run.trajectory, dialogue);
  }
  run.result = first;
  return run;
}

inline CaseResult run_case(const TestCase& c, const SessionConfig& config, Connector& connector) {
  CaseResult out;
  out.case_id = c.id;
  out.mode = config.mode;
  out.task_count = c.tasks.size();
  if (config.mode == ChallengeMode::C1_FullExecution) {
    for (std::size_t i = 0; i < c.tasks.size(); ++i) {
      out.tasks.push_back(run_task(c, i, config, connector));
      out.task_labels.push_back(labels_for(c, i));
    }
  } else {
    const std::size_t last = c.tasks.size() - 1;
    out.tasks.push_back(run_task(c, last, config, connector));
    out.task_labels.push_back(labels_for(c, last));
  }
  return out;
}

/// Runs cases on up to `workers` threads, one connector per worker.
/// Results keep corpus order.
inline std::vector<CaseResult> run_corpus(const std::vector<TestCase>& cases,
                                          const SessionConfig& config,
                                          const ConnectorFactory& factory, std::size_t workers = 1) {
  std::vector<CaseResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      auto connector = factory();
      for (std::size_t i = next++; i < cases.size(); i = next++) {
        results[i] = run_case(cases[i], config, *connector);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = cases.size();
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(cases.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace agentpath
