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

#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentpath/error.hpp"
#include "agentpath/matcher.hpp"
#include "agentpath/model.hpp"

namespace agentpath {

using PolicySequence = std::vector<CoarsePolicy>;

/// Policy transition frequency: adjacent pairs whose coarse types differ.
inline std::size_t ptf(std::span<const CoarsePolicy> seq) {
  if (seq.empty()) throw Error(ErrorCode::EmptySequence, "ptf of an empty policy sequence");
  std::size_t switches = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) switches += seq[i] != seq[i - 1] ? 1 : 0;
  return switches;
}

inline std::size_t ptf(std::span<const PolicyType> seq) {
  PolicySequence projected;
  projected.reserve(seq.size());
  for (auto p : seq) projected.push_back(coarse(p));
  return ptf(projected);
}

/// Paired outcomes of the same cases under redacted (C2) and injected (C3)
/// history. First letter is C2, second is C3.
struct CrossTab {
  std::size_t rr = 0;
  std::size_t rw = 0;
  std::size_t wr = 0;
  std::size_t ww = 0;

  std::size_t total() const noexcept { return rr + rw + wr + ww; }

  void add(bool c2_correct, bool c3_correct) {
    if (c2_correct) {
      (c3_correct ? rr : rw)++;
    } else {
      (c3_correct ? wr : ww)++;
    }
  }

  CrossTab& operator+=(const CrossTab& o) {
    rr += o.rr;
    rw += o.rw;
    wr += o.wr;
    ww += o.ww;
    return *this;
  }

  Json to_json() const { return Json{{"rr", rr}, {"rw", rw}, {"wr", wr}, {"ww", ww}}; }

  friend bool operator==(const CrossTab&, const CrossTab&) = default;
};

inline CrossTab cross_tab(const std::map<std::string, bool>& c2, const std::map<std::string, bool>& c3) {
  if (c2.size() != c3.size()) {
    throw Error(ErrorCode::KeySetMismatch, "challenge result sets differ in size");
  }
  CrossTab t;
  for (auto a = c2.begin(), b = c3.begin(); a != c2.end(); ++a, ++b) {
    if (a->first != b->first) {
      throw Error(ErrorCode::KeySetMismatch, "case '" + a->first + "' is not paired");
    }
    t.add(a->second, b->second);
  }
  return t;
}

namespace detail {

inline void require_nonempty(const CrossTab& t) {
  if (t.total() == 0) throw Error(ErrorCode::EmptyTab, "cross tab has no cases");
}

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

inline double acc2(const CrossTab& t) {
  detail::require_nonempty(t);
  return static_cast<double>(t.rr) / static_cast<double>(t.total());
}

/// Volatility factor: share of cases whose correctness flipped.
inline double vf(const CrossTab& t) {
  detail::require_nonempty(t);
  return static_cast<double>(t.wr + t.rw) / static_cast<double>(t.total());
}

/// A real number that may also be +infinity or undefined.
struct ExtendedNumber {
  enum class Kind { Finite, PosInfinity, Undefined };
  Kind kind = Kind::Undefined;
  double value = std::numeric_limits<double>::quiet_NaN();

  static ExtendedNumber finite(double v) { return {Kind::Finite, v}; }
  static ExtendedNumber infinity() {
    return {Kind::PosInfinity, std::numeric_limits<double>::infinity()};
  }
  static ExtendedNumber undefined() { return {}; }

  bool is_finite() const noexcept { return kind == Kind::Finite; }

  /// Table rendering: two decimals, "inf" or "n/a".
  std::string render() const {
    switch (kind) {
      case Kind::Finite: return detail::fixed2(value);
      case Kind::PosInfinity: return "inf";
      case Kind::Undefined: return "n/a";
    }
    return "n/a";
  }

  Json to_json() const {
    if (kind == Kind::Finite) return value;
    return render();
  }
};

/// Debiased descent direction: (RW / WR) / Acc2.
/// Acc2 = 0 is undefined; otherwise WR = 0 gives +inf, or undefined when RW = 0 too.
inline ExtendedNumber ddd(const CrossTab& t) {
  detail::require_nonempty(t);
  if (t.rr == 0) return ExtendedNumber::undefined();
  if (t.wr == 0) return t.rw > 0 ? ExtendedNumber::infinity() : ExtendedNumber::undefined();
  const double ratio = static_cast<double>(t.rw) / static_cast<double>(t.wr);
  return ExtendedNumber::finite(ratio * (1.0 / acc2(t)));
}

// ---------------------------------------------------------------------------
// Per-case records and grouped aggregation

struct CaseLabels {
  std::optional<std::size_t> ptf;
  std::optional<std::size_t> task_count;
  std::optional<HidingStrategy> hiding;
  std::optional<PolicyType> subtype;

  Json to_json() const {
    Json j = Json::object();
    j["ptf"] = ptf ? Json(*ptf) : Json(nullptr);
    j["task_count"] = task_count ? Json(*task_count) : Json(nullptr);
    j["hiding"] = hiding ? Json(to_string(*hiding)) : Json(nullptr);
    j["subtype"] = subtype ? Json(to_string(*subtype)) : Json(nullptr);
    return j;
  }
};

/// One scored task.
struct CaseOutcome {
  std::string case_id;
  std::size_t task_index = 0;
  CaseLabels labels;
  MatchResult result;
};

/// One case scored under both C2 and C3.
struct PairedOutcome {
  std::string case_id;
  CaseLabels labels;
  bool c2_correct = false;
  bool c3_correct = false;
};

enum class GroupKey { Ptf, TaskCount, Hiding, MultiSubtype };

inline std::string group_label(const CaseLabels& l, GroupKey key) {
  auto missing = [](const char* what) {
    return Error(ErrorCode::MissingLabel, std::string("result has no ") + what + " label");
  };
  switch (key) {
    case GroupKey::Ptf:
      if (!l.ptf) throw missing("ptf");
      return std::to_string(*l.ptf);
    case GroupKey::TaskCount:
      if (!l.task_count) throw missing("task_count");
      return std::to_string(*l.task_count);
    case GroupKey::Hiding:
      if (!l.hiding) throw missing("hiding");
      return std::string(to_string(*l.hiding));
    case GroupKey::MultiSubtype:
      if (!l.subtype) throw missing("subtype");
      return std::string(to_string(*l.subtype));
  }
  throw missing("group");
}

struct MetricReport {
  std::size_t count = 0;
  std::optional<double> accuracy;
  std::optional<double> ap_mean;
  std::optional<double> op_rate;
  std::optional<CrossTab> tab;
  std::optional<double> acc2;
  std::optional<double> vf;
  std::optional<ExtendedNumber> ddd;
  std::map<std::string, MetricReport> grouped;

  Json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json j{{"count", count},       {"accuracy", opt(accuracy)}, {"ap_mean", opt(ap_mean)},
           {"op_rate", opt(op_rate)}, {"acc2", opt(acc2)},       {"vf", opt(vf)}};
    j["cross_tab"] = tab ? tab->to_json() : Json(nullptr);
    j["ddd"] = ddd ? ddd->to_json() : Json(nullptr);
    if (!grouped.empty()) {
      Json g = Json::object();
      for (const auto& [k, r] : grouped) g[k] = r.to_json();
      j["grouped"] = std::move(g);
    }
    return j;
  }
};

/// Mergeable running totals; merge order does not change counts.
class MetricAccumulator {
 public:
  void add(const CaseOutcome& o) {
    scored_++;
    correct_ += o.result.correct ? 1 : 0;
    optimal_ += o.result.optimal ? 1 : 0;
    ap_sum_ += o.result.ap;
  }

  void add(const PairedOutcome& o) { tab_.add(o.c2_correct, o.c3_correct); }

  void merge(const MetricAccumulator& other) {
    scored_ += other.scored_;
    correct_ += other.correct_;
    optimal_ += other.optimal_;
    ap_sum_ += other.ap_sum_;
    tab_ += other.tab_;
  }

  MetricReport report() const {
    MetricReport r;
    if (scored_ > 0) {
      const double n = static_cast<double>(scored_);
      r.count = scored_;
      r.accuracy = static_cast<double>(correct_) / n;
      r.ap_mean = ap_sum_ / n;
      // Incorrect results count in the denominator.
      r.op_rate = static_cast<double>(optimal_) / n;
    }
    if (tab_.total() > 0) {
      r.count = std::max(r.count, tab_.total());
      r.tab = tab_;
      r.acc2 = agentpath::acc2(tab_);
      r.vf = agentpath::vf(tab_);
      r.ddd = agentpath::ddd(tab_);
    }
    return r;
  }

 private:
  std::size_t scored_ = 0;
  std::size_t correct_ = 0;
  std::size_t optimal_ = 0;
  double ap_sum_ = 0.0;
  CrossTab tab_;
};

template <typename Outcome>
MetricReport summarize(std::span<const Outcome> outcomes) {
  MetricAccumulator acc;
  for (const auto& o : outcomes) acc.add(o);
  return acc.report();
}

/// Partitions results by one label and summarizes each non-empty subset.
template <typename Outcome>
std::map<std::string, MetricReport> group_metrics(std::span<const Outcome> outcomes, GroupKey key) {
  std::map<std::string, MetricAccumulator> parts;
  for (const auto& o : outcomes) parts[group_label(o.labels, key)].add(o);
  std::map<std::string, MetricReport> out;
  for (const auto& [k, acc] : parts) out.emplace(k, acc.report());
  return out;
}

inline MetricReport summarize(const std::vector<CaseOutcome>& outcomes) {
  return summarize(std::span<const CaseOutcome>(outcomes));
}

inline MetricReport summarize(const std::vector<PairedOutcome>& outcomes) {
  return summarize(std::span<const PairedOutcome>(outcomes));
}

inline std::map<std::string, MetricReport> group_metrics(const std::vector<CaseOutcome>& outcomes,
                                                         GroupKey key) {
  return group_metrics(std::span<const CaseOutcome>(outcomes), key);
}

inline std::map<std::string, MetricReport> group_metrics(const std::vector<PairedOutcome>& outcomes,
                                                         GroupKey key) {
  return group_metrics(std::span<const PairedOutcome>(outcomes), key);
}

}  // namespace agentpath
