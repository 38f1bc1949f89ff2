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

// Command-line front end: corpus generation, evaluation runs and a
// stdio mock agent for wiring tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agentpath/agentpath.hpp"

namespace ap = agentpath;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ap::Error(ap::ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

ap::MetricReport mode_report(const std::vector<ap::CaseResult>& results) {
  std::vector<ap::CaseOutcome> outcomes;
  for (const auto& r : results) {
    auto part = r.outcomes();
    outcomes.insert(outcomes.end(), part.begin(), part.end());
  }
  ap::MetricReport report = ap::summarize<ap::CaseOutcome>(outcomes);
  const std::pair<const char*, ap::GroupKey> keys[] = {{"ptf", ap::GroupKey::Ptf},
                                                       {"task_count", ap::GroupKey::TaskCount},
                                                       {"hiding", ap::GroupKey::Hiding},
                                                       {"subtype", ap::GroupKey::MultiSubtype}};
  for (const auto& [name, key] : keys) {
    for (auto& [value, sub] : ap::group_metrics(outcomes, key)) {
      report.grouped[std::string(name) + "=" + value] = std::move(sub);
    }
  }
  return report;
}

struct EvalOptions {
  std::string corpus;
  std::string mode = "c3";
  std::string connector = "mock:perfect";
  std::size_t workers = 1;
  std::string out = "report.json";
  std::uint64_t seed = 0;
  bool dump_paths = false;
  std::string label;
  std::size_t step_budget = 0;
  long timeout_ms = 30'000;
  std::string csv;
  std::string markdown;
  bool allow_protocol_errors = false;
};

int run_eval(const EvalOptions& o) {
  const auto cases = ap::read_corpus(o.corpus);

  ap::ConnectorFactory factory;
  std::unique_ptr<ap::MockAgent> mock;
  if (o.connector.rfind("mock:", 0) == 0) {
    mock = std::make_unique<ap::MockAgent>(ap::MockAgentKind::parse(o.connector.substr(5), o.seed), cases);
    factory = [&mock] { return mock->connector(); };
  } else {
    factory = ap::connector_factory(o.connector);
  }

  std::vector<ap::ChallengeMode> modes;
  if (o.mode == "all") {
    modes = {ap::ChallengeMode::C1_FullExecution, ap::ChallengeMode::C2_RedactedHistory,
             ap::ChallengeMode::C3_InjectedHistory};
  } else {
    modes = {ap::parse_mode(o.mode)};
  }

  std::map<ap::ChallengeMode, std::vector<ap::CaseResult>> runs;
  ap::Json doc = ap::Json::object();
  for (auto mode : modes) {
    ap::SessionConfig config;
    config.mode = mode;
    if (o.step_budget > 0) config.step_budget = o.step_budget;
    config.turn_timeout = std::chrono::milliseconds(o.timeout_ms);
    runs[mode] = ap::run_corpus(cases, config, factory, o.workers);

    ap::Json results = ap::Json::array();
    for (const auto& r : runs[mode]) results.push_back(r.to_json());
    doc["modes"][std::string(ap::to_string(mode))] =
        ap::Json{{"metrics", mode_report(runs[mode]).to_json()}, {"cases", std::move(results)}};
  }

  const std::string label = o.label.empty() ? o.connector : o.label;
  const auto row = ap::build_row(runs[ap::ChallengeMode::C1_FullExecution],
                                 runs[ap::ChallengeMode::C2_RedactedHistory],
                                 runs[ap::ChallengeMode::C3_InjectedHistory], label);
  doc["leaderboard"] = row.to_json();
  doc["corpus"] = o.corpus;

  if (o.dump_paths) {
    ap::Json dumps = ap::Json::object();
    for (const auto& c : cases) {
      ap::Json tasks = ap::Json::array();
      for (const auto& t : c.tasks) {
        if (!ap::uses_tools(t.gold_policy)) {
          tasks.push_back(nullptr);
          continue;
        }
        const auto paths = ap::enumerate_paths(t.gold_graph);
        tasks.push_back(ap::Json{{"paths", ap::path_set_to_json(paths)},
                                 {"tree", ap::build_decision_tree(paths, t.gold_graph.nodes()).to_json()}});
      }
      dumps[c.id] = std::move(tasks);
    }
    doc["paths"] = std::move(dumps);
  }

  write_text(o.out, doc.dump(2) + "\n");
  if (!o.csv.empty()) write_text(o.csv, ap::emit({row}, ap::ReportFormat::Csv));
  if (!o.markdown.empty()) write_text(o.markdown, ap::emit({row}, ap::ReportFormat::Markdown));
  std::cout << ap::emit({row}, ap::ReportFormat::Markdown);

  if (row.protocol_errors > 0 && !o.allow_protocol_errors) {
    std::cerr << row.protocol_errors << " case(s) ended with a protocol error\n";
    return 1;
  }
  return 0;
}

int run_mock_agent(const std::string& corpus, const std::string& kind, std::uint64_t seed) {
  const ap::MockAgent agent(ap::MockAgentKind::parse(kind, seed), ap::read_corpus(corpus));
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    ap::Json reply;
    try {
      reply = agent.respond(ap::Json::parse(line));
    } catch (const std::exception& e) {
      reply = ap::Json{{"text", std::string("agent error: ") + e.what()}};
    }
    std::cout << reply.dump() << '\n' << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tool-use agent evaluation engine"};
  app.require_subcommand(1);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Run an agent over a corpus and score it");
  eval_cmd->add_option("--corpus", eval.corpus, "Directory of case documents")->required();
  eval_cmd->add_option("--mode", eval.mode, "c1, c2, c3 or all")
      ->check(CLI::IsMember({"c1", "c2", "c3", "all"}));
  eval_cmd->add_option("--connector", eval.connector,
                       "Agent command line, http(s) URL, or mock:{perfect,serialize,wrong-tool,drop-hidden}");
  eval_cmd->add_option("--workers", eval.workers, "Concurrent cases")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval.out, "JSON report path");
  eval_cmd->add_option("--seed", eval.seed, "Seed for built-in mock agents");
  eval_cmd->add_flag("--dump-paths", eval.dump_paths, "Include enumerated paths and decision trees");
  eval_cmd->add_option("--label", eval.label, "Agent label in the leaderboard");
  eval_cmd->add_option("--step-budget", eval.step_budget, "Tool steps per task (default 2 x gold calls + 2)");
  eval_cmd->add_option("--timeout-ms", eval.timeout_ms, "Per-turn timeout");
  eval_cmd->add_option("--csv", eval.csv, "Also write the leaderboard row as CSV");
  eval_cmd->add_option("--markdown", eval.markdown, "Also write the leaderboard as markdown");
  eval_cmd->add_flag("--allow-protocol-errors", eval.allow_protocol_errors,
                     "Exit 0 even if some case hit a protocol error");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "Synthetic corpus tools");
  fixtures_cmd->require_subcommand(1);
  auto* gen_cmd = fixtures_cmd->add_subcommand("gen", "Generate a corpus");
  std::vector<std::size_t> task_counts{2, 3, 4};
  std::size_t per_combo = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool full_preset = false;
  gen_cmd->add_option("--tasks", task_counts, "Task counts to cover (1-4)")->check(CLI::Range(1, 4));
  gen_cmd->add_option("--per-combo", per_combo, "Cases per policy combination");
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();
  gen_cmd->add_flag("--full-preset", full_preset,
                    "256 single-task + 768 multi-task cases (ignores --tasks/--per-combo)");

  auto* mock_cmd = app.add_subcommand("mock-agent", "Scripted agent speaking the line protocol on stdio");
  std::string mock_corpus;
  std::string mock_kind = "perfect";
  std::uint64_t mock_seed = 0;
  mock_cmd->add_option("--corpus", mock_corpus, "Corpus the agent replays")->required();
  mock_cmd->add_option("--kind", mock_kind, "perfect, serialize, wrong-tool or drop-hidden");
  mock_cmd->add_option("--seed", mock_seed, "Seed for wrong-tool");

  auto* prompt_cmd = app.add_subcommand("prompt", "Print a system prompt for one case");
  std::string prompt_corpus;
  std::string prompt_case;
  prompt_cmd->add_option("--corpus", prompt_corpus)->required();
  prompt_cmd->add_option("--case", prompt_case)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval_cmd) return run_eval(eval);
    if (*gen_cmd) {
      const auto cases = full_preset ? ap::generate_full_preset(gen_seed)
                                     : ap::generate_corpus(task_counts, per_combo, gen_seed);
      ap::write_corpus(gen_out, cases);
      std::cout << "wrote " << cases.size() << " cases to " << gen_out << "\n";
      return 0;
    }
    if (*mock_cmd) return run_mock_agent(mock_corpus, mock_kind, mock_seed);
    if (*prompt_cmd) {
      for (const auto& c : ap::read_corpus(prompt_corpus)) {
        if (c.id != prompt_case) continue;
        ap::Json tools = ap::Json::array();
        for (const auto& t : c.tools) tools.push_back(t.to_json());
        std::cout << ap::render_system_prompt(tools, c.env_info);
        return 0;
      }
      std::cerr << "no case '" << prompt_case << "'\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
