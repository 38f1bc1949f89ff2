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
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "agentpath/error.hpp"
#include "agentpath/harness.hpp"
#include "agentpath/matcher.hpp"
#include "agentpath/metrics.hpp"

namespace agentpath {

/// One agent's scores across the three challenges.
///
/// Overall accuracy, the hiding breakdown and the task-count breakdown come
/// from the injected-history (C3) run. AP, OP rate, per-subtype accuracy and
/// the error distribution come from the full-execution (C1) run, falling back
/// to C3 for errors when C1 is absent. Cross-tab metrics pair C2 with C3.
struct LeaderboardRow {
  std::string label;
  std::size_t cases = 0;
  std::optional<double> accuracy;
  std::optional<double> ap_mean;
  std::optional<double> op_rate;
  std::map<std::string, double> by_subtype;
  std::map<std::string, double> by_hiding;
  std::optional<double> hiding_micro;  // count-weighted over hidden-information tasks
  std::optional<double> hiding_macro;  // mean of the per-strategy accuracies
  std::map<std::string, double> by_task_count;
  std::optional<CrossTab> tab;
  std::optional<double> acc2;
  std::optional<double> vf;
  std::optional<ExtendedNumber> ddd;
  std::map<std::string, ExtendedNumber> ddd_by_ptf;
  std::map<ErrorClass, std::size_t> errors;
  std::size_t protocol_errors = 0;

  std::size_t error_total() const {
    std::size_t n = 0;
    for (const auto& [_, k] : errors) n += k;
    return n;
  }

  Json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json err = Json::object();
    for (ErrorClass e : kAllErrorClasses) {
      const auto it = errors.find(e);
      err[std::string(to_string(e))] = it == errors.end() ? 0 : it->second;
    }
    Json ddd_ptf = Json::object();
    for (const auto& [k, v] : ddd_by_ptf) ddd_ptf[k] = v.to_json();
    return Json{{"label", label},
                {"cases", cases},
                {"accuracy", opt(accuracy)},
                {"ap_mean", opt(ap_mean)},
                {"op_rate", opt(op_rate)},
                {"by_subtype", by_subtype},
                {"by_hiding", by_hiding},
                {"hiding_micro", opt(hiding_micro)},
                {"hiding_macro", opt(hiding_macro)},
                {"by_task_count", by_task_count},
                {"cross_tab", tab ? tab->to_json() : Json(nullptr)},
                {"acc2", opt(acc2)},
                {"vf", opt(vf)},
                {"ddd", ddd ? ddd->to_json() : Json(nullptr)},
                {"ddd_by_ptf", std::move(ddd_ptf)},
                {"errors", std::move(err)},
                {"protocol_errors", protocol_errors}};
  }
};

namespace detail {

inline std::set<std::string> case_ids(const std::vector<CaseResult>& results) {
  std::set<std::string> ids;
  for (const auto& r : results) ids.insert(r.case_id);
  return ids;
}

inline std::vector<CaseOutcome> all_outcomes(const std::vector<CaseResult>& results) {
  std::vector<CaseOutcome> out;
  for (const auto& r : results) {
    auto part = r.outcomes();
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

inline std::vector<CaseOutcome> final_outcomes(const std::vector<CaseResult>& results) {
  std::vector<CaseOutcome> out;
  for (const auto& r : results) out.push_back(r.outcomes().back());
  return out;
}

inline std::map<std::string, double> accuracies(const std::map<std::string, MetricReport>& groups) {
  std::map<std::string, double> out;
  for (const auto& [k, r] : groups) {
    if (r.accuracy) out[k] = *r.accuracy;
  }
  return out;
}

}  // namespace detail

inline LeaderboardRow build_row(const std::vector<CaseResult>& c1, const std::vector<CaseResult>& c2,
                                const std::vector<CaseResult>& c3, std::string label) {
  std::vector<std::set<std::string>> key_sets;
  for (const auto* set : {&c1, &c2, &c3}) {
    if (!set->empty()) key_sets.push_back(detail::case_ids(*set));
  }
  for (const auto& ks : key_sets) {
    if (ks != key_sets.front()) throw Error(ErrorCode::KeySetMismatch, "result sets cover different cases");
  }
  LeaderboardRow row;
  row.label = std::move(label);
  row.cases = key_sets.empty() ? 0 : key_sets.front().size();

  if (!c3.empty()) {
    const auto finals = detail::final_outcomes(c3);
    row.accuracy = summarize<CaseOutcome>(finals).accuracy;
    row.by_hiding = detail::accuracies(group_metrics(finals, GroupKey::Hiding));
    row.by_task_count = detail::accuracies(group_metrics(finals, GroupKey::TaskCount));

    std::vector<CaseOutcome> hidden;
    for (const auto& o : finals) {
      if (o.labels.hiding && *o.labels.hiding != HidingStrategy::None) hidden.push_back(o);
    }
    if (!hidden.empty()) {
      row.hiding_micro = summarize<CaseOutcome>(hidden).accuracy;
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& [k, acc] : row.by_hiding) {
        if (k == to_string(HidingStrategy::None)) continue;
        sum += acc;
        ++n;
      }
      row.hiding_macro = sum / static_cast<double>(n);
    }
  }

  if (!c1.empty()) {
    const auto all = detail::all_outcomes(c1);
    const auto summary = summarize<CaseOutcome>(all);
    row.ap_mean = summary.ap_mean;
    row.op_rate = summary.op_rate;
    row.by_subtype = detail::accuracies(group_metrics(all, GroupKey::MultiSubtype));
  }

  const auto& error_source = c1.empty() ? c3 : c1;
  for (const auto& o : detail::all_outcomes(error_source)) {
    if (o.result.error) row.errors[*o.result.error]++;
  }
  for (const auto* set : {&c1, &c2, &c3}) {
    for (const auto& r : *set) row.protocol_errors += r.has_protocol_error() ? 1 : 0;
  }

  if (!c2.empty() && !c3.empty()) {
    std::map<std::string, bool> c2_map;
    for (const auto& r : c2) c2_map[r.case_id] = r.final_correct();
    std::vector<PairedOutcome> paired;
    for (const auto& r : c3) {
      paired.push_back({r.case_id, r.task_labels.back(), c2_map.at(r.case_id), r.final_correct()});
    }
    const auto summary = summarize<PairedOutcome>(paired);
    row.tab = summary.tab;
    row.acc2 = summary.acc2;
    row.vf = summary.vf;
    row.ddd = summary.ddd;
    for (const auto& [k, r] : group_metrics(paired, GroupKey::Ptf)) {
      if (r.ddd) row.ddd_by_ptf[k] = *r.ddd;
    }
  }
  return row;
}

enum class ReportFormat { Json, Csv, Markdown };

namespace detail {

inline std::string pct(const std::optional<double>& v) {
  return v ? fixed2(*v * 100.0) : std::string("n/a");
}

inline std::string pct_of(const std::map<std::string, double>& m, const std::string& key) {
  const auto it = m.find(key);
  return it == m.end() ? std::string("n/a") : fixed2(it->second * 100.0);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_header() {
  std::vector<std::string> h = {"agent",        "cases",         "accuracy",        "ap",
                                "op_rate",      "single",        "multi_serial",    "multi_parallel",
                                "multi_mixed",  "chat",          "clarify",         "hidden_micro",
                                "hidden_macro", "omit",          "reference",       "long_context",
                                "tasks_1",      "tasks_2",       "tasks_3",         "tasks_4",
                                "rr",           "rw",            "wr",              "ww",
                                "acc2",         "vf",            "ddd",             "ddd_ptf_0",
                                "ddd_ptf_1",    "ddd_ptf_2",     "ddd_ptf_3"};
  for (ErrorClass e : kAllErrorClasses) h.push_back("err_" + std::string(to_string(e)));
  return h;
}

inline std::string error_pct(const LeaderboardRow& r, ErrorClass e) {
  const std::size_t total = r.error_total();
  if (total == 0) return "n/a";
  const auto it = r.errors.find(e);
  const double k = it == r.errors.end() ? 0.0 : static_cast<double>(it->second);
  return fixed2(100.0 * k / static_cast<double>(total));
}

inline std::string ddd_at(const LeaderboardRow& r, const std::string& ptf) {
  const auto it = r.ddd_by_ptf.find(ptf);
  return it == r.ddd_by_ptf.end() ? std::string("n/a") : it->second.render();
}

inline std::vector<std::string> csv_cells(const LeaderboardRow& r) {
  auto count = [&](std::size_t CrossTab::*field) {
    return r.tab ? std::to_string((*r.tab).*field) : std::string("n/a");
  };
  std::vector<std::string> c = {r.label,
                                std::to_string(r.cases),
                                pct(r.accuracy),
                                pct(r.ap_mean),
                                pct(r.op_rate),
                                pct_of(r.by_subtype, "Single"),
                                pct_of(r.by_subtype, "MultiSerial"),
                                pct_of(r.by_subtype, "MultiParallel"),
                                pct_of(r.by_subtype, "MultiMixed"),
                                pct_of(r.by_subtype, "Chat"),
                                pct_of(r.by_subtype, "Clarify"),
                                pct(r.hiding_micro),
                                pct(r.hiding_macro),
                                pct_of(r.by_hiding, "Omit"),
                                pct_of(r.by_hiding, "Reference"),
                                pct_of(r.by_hiding, "LongContext"),
                                pct_of(r.by_task_count, "1"),
                                pct_of(r.by_task_count, "2"),
                                pct_of(r.by_task_count, "3"),
                                pct_of(r.by_task_count, "4"),
                                count(&CrossTab::rr),
                                count(&CrossTab::rw),
                                count(&CrossTab::wr),
                                count(&CrossTab::ww),
                                pct(r.acc2),
                                pct(r.vf),
                                r.ddd ? r.ddd->render() : std::string("n/a"),
                                ddd_at(r, "0"),
                                ddd_at(r, "1"),
                                ddd_at(r, "2"),
                                ddd_at(r, "3")};
  for (ErrorClass e : kAllErrorClasses) c.push_back(error_pct(r, e));
  return c;
}

inline std::string md_table(const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  out << '|';
  for (const auto& h : header) out << ' ' << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& row : rows) {
    out << '|';
    for (const auto& cell : row) out << ' ' << cell << " |";
    out << '\n';
  }
  return out.str();
}

}  // namespace detail

/// Renders rows in a stable layout. Fractions appear as percentages with two
/// decimals; DDD stays a ratio and renders "inf" / "n/a" for its sentinels.
inline std::string emit(const std::vector<LeaderboardRow>& rows, ReportFormat format) {
  if (rows.empty()) throw Error(ErrorCode::EmptyReport, "no rows to emit");

  switch (format) {
    case ReportFormat::Json: {
      Json out = Json::array();
      for (const auto& r : rows) out.push_back(r.to_json());
      return out.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::string out;
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (i) out += ',';
          out += detail::csv_field(cells[i]);
        }
        out += "\r\n";
      };
      line(detail::csv_header());
      for (const auto& r : rows) line(detail::csv_cells(r));
      return out;
    }
    case ReportFormat::Markdown: {
      using detail::pct;
      using detail::pct_of;
      std::vector<std::vector<std::string>> multi, hidden, length, robust, ptf_rows, errors;
      for (const auto& r : rows) {
        multi.push_back({r.label, pct(r.accuracy), pct_of(r.by_subtype, "MultiParallel"),
                         pct_of(r.by_subtype, "MultiSerial"), pct_of(r.by_subtype, "MultiMixed"),
                         pct(r.ap_mean), pct(r.op_rate)});
        hidden.push_back({r.label, pct(r.hiding_micro), pct(r.hiding_macro), pct_of(r.by_hiding, "Omit"),
                          pct_of(r.by_hiding, "Reference"), pct_of(r.by_hiding, "LongContext")});
        length.push_back({r.label, pct_of(r.by_task_count, "1"), pct_of(r.by_task_count, "2"),
                          pct_of(r.by_task_count, "3"), pct_of(r.by_task_count, "4")});
        auto cell = [&](std::size_t CrossTab::*f) {
          return r.tab ? std::to_string((*r.tab).*f) : std::string("n/a");
        };
        robust.push_back({r.label, cell(&CrossTab::rr), cell(&CrossTab::rw), cell(&CrossTab::wr),
                          cell(&CrossTab::ww), pct(r.acc2), pct(r.vf),
                          r.ddd ? r.ddd->render() : std::string("n/a")});
        ptf_rows.push_back({r.label, detail::ddd_at(r, "0"), detail::ddd_at(r, "1"),
                            detail::ddd_at(r, "2"), detail::ddd_at(r, "3")});
        std::vector<std::string> e{r.label};
        for (ErrorClass c : kAllErrorClasses) e.push_back(detail::error_pct(r, c));
        errors.push_back(std::move(e));
      }
      std::string out;
      out += "## Multi-tool calls\n\n";
      out += detail::md_table({"Agent", "Total", "Parallel", "Serial", "Serial+Parallel", "AP", "OP Rate"},
                              multi);
      out += "\n## Hidden information\n\n";
      out += detail::md_table({"Agent", "Total (micro)", "Total (macro)", "Omit", "Ref", "Long"}, hidden);
      out += "\n## Task count\n\n";
      out += detail::md_table({"Agent", "1", "2", "3", "4"}, length);
      out += "\n## Robustness (C2 vs C3)\n\n";
      out += detail::md_table({"Agent", "RR", "RW", "WR", "WW", "Acc2", "VF", "DDD"}, robust);
      out += "\n## DDD by PTF\n\n";
      out += detail::md_table({"Agent", "PTF 0", "PTF 1", "PTF 2", "PTF 3"}, ptf_rows);
      out += "\n## Errors (%)\n\n";
      std::vector<std::string> eh{"Agent"};
      for (ErrorClass c : kAllErrorClasses) eh.emplace_back(to_string(c));
      out += detail::md_table(eh, errors);
      return out;
    }
  }
  return {};
}

}  // namespace agentpath
