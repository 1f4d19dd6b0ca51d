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

#ifndef MOTKIT_IO_H_
#define MOTKIT_IO_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "motkit/algorithms.h"
#include "motkit/apps.h"
#include "motkit/core.h"
#include "motkit/graphical.h"
#include "motkit/lowrank.h"
#include "motkit/oracles.h"
#include "motkit/setopt.h"

namespace motkit {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Line number (1-based) of every value in a JSON document, keyed by JSON
// pointer ("" for the root, "/marginals/0" and so on).
std::map<std::string, int> json_line_index(const std::string& text);

// Parses JSON text. Syntax errors become InvalidArgument with the line and
// column of the offending byte.
Json parse_json_text(const std::string& text, const std::string& what);

// Reads a whole file. Throws InvalidArgument when it cannot be opened.
std::string read_text_file(const std::string& path);

// Thrown by the schema readers below. `pointer` locates the offending value;
// `with_lines` turns it into a message carrying the source line.
class SchemaError : public InvalidArgument {
 public:
  SchemaError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }
  std::string with_lines(const std::map<std::string, int>& lines,
                         const std::string& what) const;

 private:
  std::string pointer_;
};

struct SolverConfig {
  std::optional<std::string> engine;
  double eps = 0.1;
  std::uint64_t seed = 1;
  long max_iters = 0;
};

// Problem description for `solve`. Exactly one payload matches `structure`.
struct ProblemFile {
  int schema_version = kSchemaVersion;
  std::string structure;
  int n = 0;
  int k = 0;
  std::optional<Marginals> marginals;
  std::shared_ptr<const DenseTensor> dense;
  std::shared_ptr<const GraphicalCost> graphical;
  std::optional<SetOracle> setopt;
  std::shared_ptr<const LowRankPlusSparseCost> lowrank;
  SolverConfig solver;
};

ProblemFile problem_from_json(const Json& j);
// Parses and validates problem text; errors carry line numbers.
ProblemFile load_problem_text(const std::string& text);

// Cost handle for an engine. Low-rank costs are answered for a nearby C~
// with |C~ - C| <= eps / 4, through the lift (SINKHORN) or the quantized
// product (MWU), so an engine run at eps / 2 stays within eps of the optimum.
// Other structures get their exact oracles.
StructuredCost problem_cost(const ProblemFile& pf, Engine engine, double eps);

// True cost at a tuple.
double problem_cost_at(const ProblemFile& pf, const Tuple& t);

struct ResultFile {
  int schema_version = kSchemaVersion;
  std::string engine;
  double value = 0.0;
  std::string status;
  long iterations = 0;
  long oracle_calls = 0;
  double wall_time = 0.0;
  double value_stderr = 0.0;
  double max_violation = 0.0;
  double lower_bound = -kInf;
  std::optional<SparsePlan> plan;
  // Scaling vectors without a cost handle attached.
  std::optional<ScaledPlan> scaled;
};

ResultFile result_from_report(const SolveReport& r, Engine engine, bool record_time);
Json result_to_json(const ResultFile& r);
ResultFile result_from_json(const Json& j);
// Pretty-printed JSON with a trailing newline.
std::string dump_json(const Json& j);

Json plan_to_json(const SparsePlan& p);
SparsePlan plan_from_json(const Json& j, const std::string& pointer = "");

// {"vertices": V, "edges": [{"u": 0, "v": 1, "q": 0.9}, ...]}
ReliabilityProblem reliability_from_json(const Json& j, ReliabilityMode mode);
Json reliability_report_json(const ReliabilityResult& r, Engine engine);

// {"r": 1, "k": 2, "returns": [[[...], ...]], "probs": [[[...], ...]]}
RiskProblem risk_from_json(const Json& j);

// {"n": 2, "k": 2, "eps": 0.1, "marginals": [...],
//  "lowrank": {"rank": 1, "factors": [...], "sparse": [...]}}
ProjectionProblem projection_from_json(const Json& j);

// {"rank": r, "factors": [[[u_{l,i}] for i] for l], "sparse": [{"index", "value"}]}
std::pair<LowRankFactors, SparseComponent> lowrank_from_json(const Json& j, int n, int k,
                                                            const std::string& pointer);

}  // namespace motkit

#endif  // MOTKIT_IO_H_
