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
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agentpath/error.hpp"

namespace agentpath {

using Json = nlohmann::json;

namespace detail {

inline std::string trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\n\r\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return std::string(s.substr(first, last - first + 1));
}

inline Json canonical_value(const Json& value) {
  switch (value.type()) {
    case Json::value_t::object: {
      Json out = Json::object();
      for (const auto& [key, item] : value.items()) out[key] = canonical_value(item);
      return out;
    }
    case Json::value_t::array: {
      Json out = Json::array();
      for (const auto& item : value) out.push_back(canonical_value(item));
      return out;
    }
    case Json::value_t::string:
      return trim(value.get_ref<const std::string&>());
    case Json::value_t::number_float: {
      const double d = value.get<double>();
      // 2^63 is exactly representable; anything at or past it stays a float.
      constexpr double kLimit = 9223372036854775808.0;
      if (std::isfinite(d) && std::trunc(d) == d && d > -kLimit && d < kLimit) {
        return static_cast<std::int64_t>(d);
      }
      return d;
    }
    case Json::value_t::number_unsigned: {
      const auto u = value.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        return static_cast<std::int64_t>(u);
      }
      return value;
    }
    default:
      return value;
  }
}

}  // namespace detail

/// Normalizes a call's argument document so that semantically equal
/// arguments compare equal: keys sorted, strings trimmed, integral floats
/// collapsed to integers, nested structures handled recursively.
inline Json canonicalize_arguments(const Json& arguments) {
  if (!arguments.is_object()) {
    throw Error(ErrorCode::MalformedArguments,
                "arguments must be a key-value document, got " +
                    std::string(arguments.type_name()));
  }
  return detail::canonical_value(arguments);
}

/// Accepts arguments serialized as text, as many agents emit them.
inline Json canonicalize_arguments(std::string_view text) {
  Json parsed = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::MalformedArguments, "arguments are not valid JSON");
  }
  return canonicalize_arguments(parsed);
}

/// Canonical text of a single argument value; strings render unquoted.
inline std::string render_value(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return detail::canonical_value(value).dump();
}

/// One tool invocation. Arguments are always held in canonical form.
class ToolCall {
 public:
  ToolCall() = default;
  ToolCall(std::string tool, const Json& arguments)
      : tool_(std::move(tool)), arguments_(canonicalize_arguments(arguments)) {}

  const std::string& tool() const noexcept { return tool_; }
  const Json& arguments() const noexcept { return arguments_; }

  /// Byte-stable identity of the call; used as a lookup key.
  std::string key() const { return tool_ + '\x1f' + arguments_.dump(); }

  Json to_json() const { return Json{{"name", tool_}, {"arguments", arguments_}}; }

  static ToolCall from_json(const Json& j) {
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
      throw Error(ErrorCode::MalformedArguments, "tool call needs a string 'name'");
    }
    Json args = j.value("arguments", Json::object());
    if (args.is_string()) return ToolCall(j["name"].get<std::string>(),
                                          canonicalize_arguments(std::string_view(args.get_ref<const std::string&>())));
    return ToolCall(j["name"].get<std::string>(), args);
  }

  friend bool operator==(const ToolCall& a, const ToolCall& b) {
    return a.tool_ == b.tool_ && a.arguments_ == b.arguments_;
  }
  friend std::strong_ordering operator<=>(const ToolCall& a, const ToolCall& b) {
    if (auto c = a.tool_ <=> b.tool_; c != 0) return c;
    return a.arguments_.dump() <=> b.arguments_.dump();
  }

 private:
  std::string tool_;
  Json arguments_ = Json::object();
};

/// Calls issued together in one turn. Compared as a multiset.
class StepGroup {
 public:
  StepGroup() = default;
  explicit StepGroup(std::vector<ToolCall> calls) : calls_(std::move(calls)) {
    std::sort(calls_.begin(), calls_.end());
  }
  StepGroup(std::initializer_list<ToolCall> calls)
      : StepGroup(std::vector<ToolCall>(calls)) {}

  const std::vector<ToolCall>& calls() const noexcept { return calls_; }
  std::size_t size() const noexcept { return calls_.size(); }
  bool empty() const noexcept { return calls_.empty(); }

  Json to_json() const {
    Json out = Json::array();
    for (const auto& c : calls_) out.push_back(c.to_json());
    return out;
  }

  friend bool operator==(const StepGroup&, const StepGroup&) = default;
  friend std::strong_ordering operator<=>(const StepGroup& a, const StepGroup& b) {
    return std::lexicographical_compare_three_way(a.calls_.begin(), a.calls_.end(),
                                                  b.calls_.begin(), b.calls_.end());
  }

 private:
  std::vector<ToolCall> calls_;
};

}  // namespace agentpath
