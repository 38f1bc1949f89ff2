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

#include <stdexcept>
#include <string>
#include <string_view>

namespace agentpath {

/// Every recoverable fault raised by the engine carries one of these codes.
enum class ErrorCode {
  MalformedArguments,
  EmptyGraph,
  CyclicDependency,
  IndexOutOfRange,
  SelfEdge,
  InvalidVisitedSet,
  GraphTooLarge,
  EmptySequence,
  KeySetMismatch,
  EmptyTab,
  MissingLabel,
  MissingGoldData,
  InvalidCase,
  InvalidLength,
  InvalidPlan,
  EmptyReport,
  ConnectorTimeout,
  ProtocolError,
  ConnectorFailure,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedArguments: return "MalformedArguments";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::CyclicDependency: return "CyclicDependency";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelfEdge: return "SelfEdge";
    case ErrorCode::InvalidVisitedSet: return "InvalidVisitedSet";
    case ErrorCode::GraphTooLarge: return "GraphTooLarge";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::KeySetMismatch: return "KeySetMismatch";
    case ErrorCode::EmptyTab: return "EmptyTab";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::MissingGoldData: return "MissingGoldData";
    case ErrorCode::InvalidCase: return "InvalidCase";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::ConnectorTimeout: return "ConnectorTimeout";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::ConnectorFailure: return "ConnectorFailure";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agentpath
