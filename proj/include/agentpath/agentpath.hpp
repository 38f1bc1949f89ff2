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

#include "agentpath/call.hpp"
#include "agentpath/connectors.hpp"
#include "agentpath/enumerate.hpp"
#include "agentpath/error.hpp"
#include "agentpath/fixtures.hpp"
#include "agentpath/graph.hpp"
#include "agentpath/harness.hpp"
#include "agentpath/matcher.hpp"
#include "agentpath/metrics.hpp"
#include "agentpath/model.hpp"
#include "agentpath/prompt.hpp"
#include "agentpath/report.hpp"
