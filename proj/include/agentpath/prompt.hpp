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

#include <string>

#include "agentpath/call.hpp"

namespace agentpath {

/// System prompt for agents without native function calling. Connectors may
/// prepend it to the messages they receive; the engine never sends it.
inline std::string render_system_prompt(const Json& tools, const std::string& env_info) {
  std::string out =
      "You can call the functions listed below to help the user.\n"
      "- To call functions, reply with only "
      "<tool_calls>[{\"name\": \"fn\", \"arguments\": {\"arg\": \"value\"}}, ...]</tool_calls>. "
      "Calls listed together run in parallel.\n"
      "- If no function applies, answer directly, starting with \"Assistant:\".\n"
      "- If a required argument is missing, ask the user for it, starting with \"Assistant:\".\n"
      "- Once the results answer the request, summarize them, starting with \"Assistant:\".\n"
      "\nFunctions:\n";
  out += tools.dump(2);
  out += "\n\nCurrent time: " + env_info + "\n";
  return out;
}

}  // namespace agentpath
