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

#include "motkit/io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace motkit {

namespace {

std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string child(const std::string& ptr, const std::string& key) {
  return ptr + "/" + escape_pointer_token(key);
}

std::string child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

const Json& require_field(const Json& obj, const std::string& key, const std::string& ptr) {
  if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(ptr, "missing field \"" + key + "\"");
  return *it;
}

const Json* optional_field(const Json& obj, const std::string& key, const std::string& ptr) {
  if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double read_double(const Json& v, const std::string& ptr) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw SchemaError(ptr, "expected a number");
}

double read_finite(const Json& v, const std::string& ptr) {
  const double x = read_double(v, ptr);
  if (!std::isfinite(x)) throw SchemaError(ptr, "expected a finite number");
  return x;
}

long read_long(const Json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return v.get<long>();
}

int read_int(const Json& v, const std::string& ptr, int lo) {
  const long x = read_long(v, ptr);
  if (x < lo || x > 1000000000L) {
    throw SchemaError(ptr, "expected an integer >= " + std::to_string(lo));
  }
  return static_cast<int>(x);
}

std::string read_string(const Json& v, const std::string& ptr) {
  if (!v.is_string()) throw SchemaError(ptr, "expected a string");
  return v.get<std::string>();
}

const Json& read_array(const Json& v, const std::string& ptr) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  return v;
}

Vec read_vec(const Json& v, const std::string& ptr, bool finite = true) {
  read_array(v, ptr);
  Vec out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(finite ? read_finite(v[i], child(ptr, i)) : read_double(v[i], child(ptr, i)));
  }
  return out;
}

std::vector<Vec> read_matrix(const Json& v, const std::string& ptr, bool finite = true) {
  read_array(v, ptr);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_vec(v[i], child(ptr, i), finite));
  return out;
}

Tuple read_tuple(const Json& v, const std::string& ptr, int n, int k) {
  read_array(v, ptr);
  if (static_cast<int>(v.size()) != k) {
    throw SchemaError(ptr, "tuple must have " + std::to_string(k) + " entries");
  }
  Tuple t;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int x = read_int(v[i], child(ptr, i), 0);
    if (x >= n) throw SchemaError(child(ptr, i), "index out of range [0, n)");
    t.push_back(x);
  }
  return t;
}

Json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return nullptr;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

Json matrix_json(const std::vector<Vec>& m) {
  Json a = Json::array();
  for (const Vec& row : m) a.push_back(vec_json(row));
  return a;
}

// Runs `f`, turning plain InvalidArgument from validators into a SchemaError
// located at `ptr`.
template <class F>
auto located(const std::string& ptr, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw SchemaError(ptr, e.what());
  }
}

UGraph read_graph(const Json& j, const std::string& ptr, Vec* q) {
  UGraph g;
  g.vertices = read_int(require_field(j, "vertices", ptr), child(ptr, "vertices"), 1);
  const std::string eptr = child(ptr, "edges");
  const Json& edges = read_array(require_field(j, "edges", ptr), eptr);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string p = child(eptr, e);
    UEdge edge{read_int(require_field(edges[e], "u", p), child(p, "u"), 0),
               read_int(require_field(edges[e], "v", p), child(p, "v"), 0)};
    if (edge.u >= g.vertices || edge.v >= g.vertices) {
      throw SchemaError(p, "edge endpoint out of range");
    }
    g.edges.push_back(edge);
    if (q != nullptr) q->push_back(read_finite(require_field(edges[e], "q", p), child(p, "q")));
  }
  located(ptr, [&] {
    validate_graph(g);
    return 0;
  });
  return g;
}

}  // namespace

// ------------------------------------------------------------- JSON utils

std::map<std::string, int> json_line_index(const std::string& text) {
  struct Frame {
    bool is_object;
    std::string key;
    std::size_t index = 0;
    bool expect_key = true;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  const auto pointer = [&stack]() {
    std::string p;
    for (const Frame& f : stack) {
      p += "/" + (f.is_object ? escape_pointer_token(f.key) : std::to_string(f.index));
    }
    return p;
  };
  const auto record = [&]() { lines.emplace(pointer(), line); };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == ':') {
      ++i;
    } else if (c == '{' || c == '[') {
      record();
      stack.push_back({c == '{', "", 0, true});
      ++i;
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      ++i;
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().is_object) {
          stack.back().expect_key = true;
        } else {
          ++stack.back().index;
        }
      }
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) {
          s += text[i + 1];
          i += 2;
        } else {
          if (text[i] == '\n') ++line;
          s += text[i++];
        }
      }
      ++i;
      if (!stack.empty() && stack.back().is_object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
      } else {
        record();
      }
    } else {
      record();
      while (i < text.size() && text[i] != ',' && text[i] != ']' && text[i] != '}' &&
             !std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
    }
  }
  return lines;
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t at = std::min(text.size(), e.byte == 0 ? 0 : e.byte - 1);
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < at; ++i) {
      if (text[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    throw InvalidArgument(what + ": line " + std::to_string(line) + ", column " +
                          std::to_string(at - line_start + 1) + ": malformed JSON");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : InvalidArgument((pointer.empty() ? std::string("/") : pointer) + ": " + message),
      pointer_(std::move(pointer)) {}

std::string SchemaError::with_lines(const std::map<std::string, int>& lines,
                                    const std::string& what) const {
  std::string p = pointer_;
  while (true) {
    auto it = lines.find(p);
    if (it != lines.end()) {
      return what + ": line " + std::to_string(it->second) + ": " + this->what();
    }
    if (p.empty()) break;
    p.erase(p.rfind('/'));
  }
  return what + ": " + this->what();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- problems

std::pair<LowRankFactors, SparseComponent> lowrank_from_json(const Json& j, int n, int k,
                                                            const std::string& ptr) {
  const int rank = read_int(require_field(j, "rank", ptr), child(ptr, "rank"), 1);
  const std::string fptr = child(ptr, "factors");
  const Json& factors = read_array(require_field(j, "factors", ptr), fptr);
  if (static_cast<int>(factors.size()) != rank) {
    throw SchemaError(fptr, "expected " + std::to_string(rank) + " factor terms");
  }
  std::vector<std::vector<Vec>> u;
  for (std::size_t l = 0; l < factors.size(); ++l) {
    std::vector<Vec> term = read_matrix(factors[l], child(fptr, l));
    if (static_cast<int>(term.size()) != k) {
      throw SchemaError(child(fptr, l), "expected " + std::to_string(k) + " vectors");
    }
    for (std::size_t i = 0; i < term.size(); ++i) {
      if (static_cast<int>(term[i].size()) != n) {
        throw SchemaError(child(child(fptr, l), i), "expected " + std::to_string(n) + " entries");
      }
    }
    u.push_back(std::move(term));
  }
  double rmax = -1.0;
  if (const Json* r = optional_field(j, "rmax", ptr)) rmax = read_finite(*r, child(ptr, "rmax"));
  LowRankFactors f =
      located(fptr, [&] { return make_lowrank_factors(n, k, std::move(u), rmax); });
  SparseComponent s;
  if (const Json* sp = optional_field(j, "sparse", ptr)) {
    const std::string sptr = child(ptr, "sparse");
    read_array(*sp, sptr);
    for (std::size_t e = 0; e < sp->size(); ++e) {
      const std::string p = child(sptr, e);
      s.entries.push_back({read_tuple(require_field((*sp)[e], "index", p), child(p, "index"), n, k),
                           read_finite(require_field((*sp)[e], "value", p), child(p, "value"))});
    }
    located(sptr, [&] {
      validate_sparse(s, n, k);
      return 0;
    });
  }
  return {std::move(f), std::move(s)};
}

ProblemFile problem_from_json(const Json& j) {
  ProblemFile pf;
  if (!j.is_object()) throw SchemaError("", "expected an object");
  if (const Json* v = optional_field(j, "schema_version", "")) {
    pf.schema_version = read_int(*v, "/schema_version", 1);
    if (pf.schema_version != kSchemaVersion) {
      throw SchemaError("/schema_version", "unsupported schema version");
    }
  }
  pf.structure = read_string(require_field(j, "structure", ""), "/structure");
  pf.n = read_int(require_field(j, "n", ""), "/n", 1);
  pf.k = read_int(require_field(j, "k", ""), "/k", 1);
  const int n = pf.n;
  const int k = pf.k;
  {
    std::vector<Vec> mu = read_matrix(require_field(j, "marginals", ""), "/marginals");
    if (static_cast<int>(mu.size()) != k) throw SchemaError("/marginals", "expected k rows");
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (static_cast<int>(mu[i].size()) != n) {
        throw SchemaError(child("/marginals", i), "expected n entries");
      }
    }
    pf.marginals = located("/marginals", [&] { return Marginals(std::move(mu)); });
  }
  const std::string sptr = "/" + pf.structure;
  if (pf.structure == "dense") {
    const Json& d = require_field(j, "dense", "");
    Vec values = read_vec(require_field(d, "values", sptr), sptr + "/values");
    pf.dense = located(sptr, [&] {
      const std::uint64_t size = checked_power(n, k, brute_force_cap());
      if (values.size() != size) {
        throw InvalidArgument("values must hold n^k = " + std::to_string(size) + " entries");
      }
      return std::make_shared<const DenseTensor>(n, k, std::move(values));
    });
  } else if (pf.structure == "graphical") {
    const Json& g = require_field(j, "graphical", "");
    const std::string fptr = sptr + "/factors";
    const Json& fs = read_array(require_field(g, "factors", sptr), fptr);
    std::vector<Factor> factors;
    for (std::size_t f = 0; f < fs.size(); ++f) {
      const std::string p = child(fptr, f);
      Factor fac;
      const Json& scope = read_array(require_field(fs[f], "scope", p), p + "/scope");
      for (std::size_t s = 0; s < scope.size(); ++s) {
        fac.scope.push_back(read_int(scope[s], child(p + "/scope", s), 0));
      }
      fac.table = read_vec(require_field(fs[f], "table", p), p + "/table");
      factors.push_back(std::move(fac));
    }
    int width_cap = kDefaultWidthCap;
    if (const Json* w = optional_field(g, "width_cap", sptr)) {
      width_cap = read_int(*w, sptr + "/width_cap", 1);
    }
    pf.graphical = located(sptr, [&] {
      return std::make_shared<const GraphicalCost>(n, k, std::move(factors), width_cap);
    });
  } else if (pf.structure == "setopt") {
    const Json& s = require_field(j, "setopt", "");
    if (const Json* members = optional_field(s, "members", sptr)) {
      const std::string mptr = sptr + "/members";
      read_array(*members, mptr);
      std::vector<Tuple> list;
      for (std::size_t m = 0; m < members->size(); ++m) {
        list.push_back(read_tuple((*members)[m], child(mptr, m), n, k));
      }
      pf.setopt = located(sptr, [&] { return make_explicit_set_oracle(n, k, std::move(list)); });
    } else {
      const Json& g = require_field(s, "graph", sptr);
      const UGraph graph = read_graph(g, sptr + "/graph", nullptr);
      if (n != 2 || k != static_cast<int>(graph.edges.size())) {
        throw SchemaError(sptr + "/graph", "graph events need n = 2 and k = number of edges");
      }
      const std::string event = read_string(require_field(s, "event", sptr), sptr + "/event");
      if (event == "connected") {
        pf.setopt = connected_set_oracle(graph);
      } else if (event == "disconnected") {
        pf.setopt = disconnected_set_oracle(graph);
      } else {
        throw SchemaError(sptr + "/event", "expected \"connected\" or \"disconnected\"");
      }
    }
  } else if (pf.structure == "lowrank") {
    auto [r, s] = lowrank_from_json(require_field(j, "lowrank", ""), n, k, sptr);
    pf.lowrank = located(sptr, [&] {
      return std::make_shared<const LowRankPlusSparseCost>(std::move(r), std::move(s));
    });
  } else {
    throw SchemaError("/structure", "expected one of dense, graphical, setopt, lowrank");
  }
  if (const Json* s = optional_field(j, "solver", "")) {
    if (const Json* e = optional_field(*s, "engine", "/solver")) {
      pf.solver.engine = read_string(*e, "/solver/engine");
      located("/solver/engine", [&] { return parse_engine(*pf.solver.engine); });
    }
    if (const Json* e = optional_field(*s, "eps", "/solver")) {
      pf.solver.eps = read_finite(*e, "/solver/eps");
      if (!(pf.solver.eps > 0)) throw SchemaError("/solver/eps", "eps must be > 0");
    }
    if (const Json* e = optional_field(*s, "seed", "/solver")) {
      pf.solver.seed = static_cast<std::uint64_t>(read_int(*e, "/solver/seed", 0));
    }
    if (const Json* e = optional_field(*s, "max_iters", "/solver")) {
      pf.solver.max_iters = read_int(*e, "/solver/max_iters", 1);
    }
  }
  return pf;
}

ProblemFile load_problem_text(const std::string& text) {
  const Json j = parse_json_text(text, "problem");
  try {
    return problem_from_json(j);
  } catch (const SchemaError& e) {
    throw InvalidArgument(e.with_lines(json_line_index(text), "problem"));
  }
}

StructuredCost problem_cost(const ProblemFile& pf, Engine engine, double eps) {
  if (pf.dense) return make_dense_cost(*pf.dense);
  if (pf.graphical) return make_graphical_cost(pf.graphical);
  if (pf.setopt) {
    if (engine == Engine::kSinkhorn && !pf.setopt->smin) {
      throw CapabilityError(
          "setopt: SMIN set oracle unavailable (SINKHORN needs SMIN or MARG); use mwu or colgen");
    }
    return make_setopt_cost(*pf.setopt);
  }
  if (pf.lowrank) {
    switch (engine) {
      case Engine::kSinkhorn:
        return make_lowrank_cost(pf.lowrank, eps / 2.0);
      case Engine::kMwu:
        return quantized_view(pf.lowrank, eps / 4.0);
      case Engine::kColgen:
        throw CapabilityError(
            "lowrank: exact MIN oracle unavailable; COLGEN needs MIN or ARGMIN (use sinkhorn "
            "or mwu)");
    }
  }
  throw InvalidArgument("problem: no cost payload");
}

double problem_cost_at(const ProblemFile& pf, const Tuple& t) {
  if (pf.dense) return pf.dense->at(t);
  if (pf.graphical) return pf.graphical->evaluate(t);
  if (pf.setopt) return pf.setopt->contains(t) ? 0.0 : 1.0;
  if (pf.lowrank) return pf.lowrank->evaluate(t);
  throw InvalidArgument("problem: no cost payload");
}

// ----------------------------------------------------------------- results

Json plan_to_json(const SparsePlan& p) {
  Json entries = Json::array();
  for (const PlanEntry& e : p.entries()) {
    entries.push_back({{"index", e.index}, {"mass", number_json(e.mass)}});
  }
  return {{"kind", "sparse"}, {"n", p.n()}, {"k", p.k()}, {"entries", entries}};
}

SparsePlan plan_from_json(const Json& j, const std::string& ptr) {
  const int n = read_int(require_field(j, "n", ptr), child(ptr, "n"), 1);
  const int k = read_int(require_field(j, "k", ptr), child(ptr, "k"), 1);
  const std::string eptr = child(ptr, "entries");
  const Json& entries = read_array(require_field(j, "entries", ptr), eptr);
  SparsePlan p(n, k);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string q = child(eptr, e);
    p.add(read_tuple(require_field(entries[e], "index", q), child(q, "index"), n, k),
          read_finite(require_field(entries[e], "mass", q), child(q, "mass")));
  }
  return p;
}

ResultFile result_from_report(const SolveReport& r, Engine engine, bool record_time) {
  ResultFile out;
  out.engine = engine_name(engine);
  out.value = r.value;
  out.status = status_name(r.status);
  out.iterations = r.iterations;
  out.oracle_calls = r.oracle_calls;
  out.wall_time = record_time ? r.wall_time : 0.0;
  out.value_stderr = r.value_stderr;
  out.max_violation = r.max_violation;
  out.lower_bound = r.lower_bound;
  out.plan = r.plan;
  if (r.scaled) {
    ScaledPlan sp = *r.scaled;
    sp.cost = nullptr;
    out.scaled = std::move(sp);
  }
  return out;
}

Json result_to_json(const ResultFile& r) {
  Json j = {{"schema_version", r.schema_version},
            {"engine", r.engine},
            {"value", number_json(r.value)},
            {"status", r.status},
            {"iterations", r.iterations},
            {"oracle_calls", r.oracle_calls},
            {"wall_time", r.wall_time},
            {"value_stderr", number_json(r.value_stderr)},
            {"max_violation", number_json(r.max_violation)},
            {"lower_bound", number_json(r.lower_bound)}};
  if (r.plan) {
    j["plan"] = plan_to_json(*r.plan);
  } else if (r.scaled) {
    const ScaledPlan& sp = *r.scaled;
    j["plan"] = {{"kind", "scaled"}, {"n", sp.n},
                 {"k", sp.k},        {"eta", number_json(sp.eta)},
                 {"log_d", matrix_json(sp.log_d)}, {"v", matrix_json(sp.v)}};
  } else {
    j["plan"] = nullptr;
  }
  return j;
}

ResultFile result_from_json(const Json& j) {
  ResultFile r;
  r.schema_version = read_int(require_field(j, "schema_version", ""), "/schema_version", 1);
  if (r.schema_version != kSchemaVersion) {
    throw SchemaError("/schema_version", "unsupported schema version");
  }
  r.engine = read_string(require_field(j, "engine", ""), "/engine");
  r.value = read_double(require_field(j, "value", ""), "/value");
  r.status = read_string(require_field(j, "status", ""), "/status");
  r.iterations = read_long(require_field(j, "iterations", ""), "/iterations");
  r.oracle_calls = read_long(require_field(j, "oracle_calls", ""), "/oracle_calls");
  r.wall_time = read_double(require_field(j, "wall_time", ""), "/wall_time");
  r.value_stderr = read_double(require_field(j, "value_stderr", ""), "/value_stderr");
  r.max_violation = read_double(require_field(j, "max_violation", ""), "/max_violation");
  r.lower_bound = read_double(require_field(j, "lower_bound", ""), "/lower_bound");
  const Json& plan = require_field(j, "plan", "");
  if (plan.is_null()) return r;
  const std::string kind = read_string(require_field(plan, "kind", "/plan"), "/plan/kind");
  if (kind == "sparse") {
    r.plan = plan_from_json(plan, "/plan");
  } else if (kind == "scaled") {
    ScaledPlan sp;
    sp.n = read_int(require_field(plan, "n", "/plan"), "/plan/n", 1);
    sp.k = read_int(require_field(plan, "k", "/plan"), "/plan/k", 1);
    sp.eta = read_finite(require_field(plan, "eta", "/plan"), "/plan/eta");
    sp.log_d = read_matrix(require_field(plan, "log_d", "/plan"), "/plan/log_d", false);
    sp.v = read_matrix(require_field(plan, "v", "/plan"), "/plan/v");
    if (static_cast<int>(sp.log_d.size()) != sp.k || static_cast<int>(sp.v.size()) != sp.k) {
      throw SchemaError("/plan", "scaling vectors must have k rows");
    }
    r.scaled = std::move(sp);
  } else {
    throw SchemaError("/plan/kind", "expected \"sparse\" or \"scaled\"");
  }
  return r;
}

// --------------------------------------------------------------- app inputs

ReliabilityProblem reliability_from_json(const Json& j, ReliabilityMode mode) {
  ReliabilityProblem pr;
  pr.mode = mode;
  pr.graph = read_graph(j, "", &pr.q);
  located("", [&] {
    validate_reliability(pr);
    return 0;
  });
  return pr;
}

Json reliability_report_json(const ReliabilityResult& r, Engine engine) {
  Json support = Json::array();
  if (r.report.plan) {
    for (const PlanEntry& e : r.report.plan->entries()) {
      std::string bits;
      for (int x : e.index) bits += x == 1 ? '1' : '0';
      support.push_back({{"edges", bits}, {"mass", number_json(e.mass)}});
    }
  }
  return {{"mode", mode_name(r.mode)},
          {"engine", engine_name(engine)},
          {"probability", number_json(r.probability)},
          {"value", number_json(r.report.value)},
          {"status", status_name(r.report.status)},
          {"support", support}};
}

RiskProblem risk_from_json(const Json& j) {
  RiskProblem pr;
  pr.r = read_int(require_field(j, "r", ""), "/r", 1);
  pr.k = read_int(require_field(j, "k", ""), "/k", 1);
  const auto read_cube = [&](const char* key) {
    const std::string ptr = std::string("/") + key;
    const Json& a = read_array(require_field(j, key, ""), ptr);
    std::vector<std::vector<Vec>> out;
    for (std::size_t l = 0; l < a.size(); ++l) out.push_back(read_matrix(a[l], child(ptr, l)));
    return out;
  };
  pr.returns = read_cube("returns");
  pr.probs = read_cube("probs");
  located("", [&] {
    validate_risk(pr);
    return 0;
  });
  return pr;
}

ProjectionProblem projection_from_json(const Json& j) {
  const int n = read_int(require_field(j, "n", ""), "/n", 1);
  const int k = read_int(require_field(j, "k", ""), "/k", 1);
  auto [r, s] = lowrank_from_json(require_field(j, "lowrank", ""), n, k, "/lowrank");
  std::vector<Vec> mu = read_matrix(require_field(j, "marginals", ""), "/marginals");
  Marginals m = located("/marginals", [&] { return Marginals(std::move(mu)); });
  double eps = 0.1;
  if (const Json* e = optional_field(j, "eps", "")) eps = read_finite(*e, "/eps");
  ProjectionProblem pr{std::move(r), std::move(s), std::move(m), eps};
  located("", [&] {
    validate_projection(pr);
    return 0;
  });
  return pr;
}

}  // namespace motkit
