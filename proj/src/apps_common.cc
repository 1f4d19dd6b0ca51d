// Copyright 2026 The motkit Authors
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

#include "motkit/apps.h"

namespace motkit {

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::kSinkhorn:
      return "sinkhorn";
    case Engine::kMwu:
      return "mwu";
    case Engine::kColgen:
      return "colgen";
  }
  return "unknown";
}

Engine parse_engine(const std::string& s) {
  if (s == "sinkhorn") return Engine::kSinkhorn;
  if (s == "mwu") return Engine::kMwu;
  if (s == "colgen") return Engine::kColgen;
  throw InvalidArgument("unknown engine '" + s + "' (expected sinkhorn, mwu or colgen)");
}

std::string mode_name(ReliabilityMode m) {
  return m == ReliabilityMode::kWorst ? "worst" : "best";
}

ReliabilityMode parse_mode(const std::string& s) {
  if (s == "worst") return ReliabilityMode::kWorst;
  if (s == "best") return ReliabilityMode::kBest;
  throw InvalidArgument("unknown reliability mode '" + s + "' (expected worst or best)");
}

}  // namespace motkit
