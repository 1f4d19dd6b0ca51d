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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "motkit/algorithms.h"
#include "motkit/apps.h"
#include "motkit/io.h"
#include "motkit/simplex.h"

namespace motkit::cli {

namespace {

// Largest marginal deviation tolerated in an emitted plan.
constexpr double kPlanTol = 1e-7;

struct CommonFlags {
  std::string engine;
  double eps = 0.0;
  std::uint64_t seed = 1;
  long max_iters = 0;
  std::string out;
  bool timing = false;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_engine) {
  if (with_engine) {
    app->add_option("--engine", f.engine, "sinkhorn, mwu or colgen")
        ->check(CLI::IsMember({"sinkhorn", "mwu", "colgen"}));
  }
  app->add_option("--eps", f.eps, "additive accuracy")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--max-iters", f.max_iters, "iteration cap (0 keeps the default)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--out", f.out, "output file (stdout when omitted)");
  app->add_flag("--timing", f.timing, "record wall time in the result");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
  if (!f) throw InvalidArgument("failed writing " + path);
}

void require_feasible(const SolveReport& r, const Marginals& m) {
  if (r.plan && !check_feasible(*r.plan, m, kPlanTol)) {
    throw OracleViolation("returned plan violates the marginals beyond 1e-7");
  }
}

int status_exit(SolveStatus s) {
  return s == SolveStatus::kInfeasibleCertificate ? kExitInfeasible : kExitOk;
}

// --------------------------------------------------------------- commands

int cmd_solve(const std::string& path, const CommonFlags& f, std::ostream& out) {
  const ProblemFile pf = load_problem_text(read_text_file(path));
  std::string engine_str = f.engine;
  if (engine_str.empty()) engine_str = pf.solver.engine.value_or("");
  if (engine_str.empty()) engine_str = pf.lowrank ? "sinkhorn" : "colgen";
  const Engine engine = parse_engine(engine_str);
  const double eps = f.eps > 0 ? f.eps : pf.solver.eps;
  const std::uint64_t seed = f.seed != 1 ? f.seed : pf.solver.seed;
  const long max_iters = f.max_iters > 0 ? f.max_iters : pf.solver.max_iters;
  const StructuredCost sc = problem_cost(pf, engine, eps);
  // Low-rank oracles answer for a cost within eps / 4, so the engine gets
  // the remaining half of the budget.
  const double engine_eps = pf.lowrank ? eps / 2.0 : eps;
  const Marginals& m = *pf.marginals;
  SolveReport r;
  switch (engine) {
    case Engine::kColgen: {
      ColgenOptions o;
      if (max_iters > 0) o.max_iters = max_iters;
      r = colgen_solve(sc, m, o);
      break;
    }
    case Engine::kMwu: {
      MwuOptions o;
      if (max_iters > 0) o.max_iterations = max_iters;
      r = mwu_solve(sc, m, engine_eps, o);
      break;
    }
    case Engine::kSinkhorn: {
      SinkhornOptions o;
      o.seed = seed;
      if (max_iters > 0) o.max_sweeps = max_iters;
      r = sinkhorn_solve(sc, m, engine_eps, o);
      break;
    }
  }
  if (pf.lowrank && r.plan) {
    r.value = plan_cost(*r.plan, [&pf](const Tuple& t) { return problem_cost_at(pf, t); });
  }
  require_feasible(r, m);
  emit(dump_json(result_to_json(result_from_report(r, engine, f.timing))), f.out, out);
  return status_exit(r.status);
}

int cmd_eulerflow(int n, int k, const std::string& sigma, const CommonFlags& f,
                  const std::string& csv, std::ostream& out) {
  const EulerFlowProblem pr = make_grid_euler_flow(n, k, sigma);
  const Engine engine = parse_engine(f.engine.empty() ? "colgen" : f.engine);
  const double eps = f.eps > 0 ? f.eps : 0.1;
  EngineOptions eo;
  eo.seed = f.seed;
  eo.max_iters = f.max_iters;
  const SolveReport r = solve_euler_flow(pr, engine, eps, eo);
  require_feasible(r, Marginals::uniform(n, k));
  std::string csv_path = csv;
  if (csv_path.empty() && !f.out.empty()) {
    const std::size_t dot = f.out.rfind('.');
    csv_path = (dot == std::string::npos ? f.out : f.out.substr(0, dot)) + ".csv";
  }
  if (!csv_path.empty()) {
    const std::vector<TransportRow> rows =
        r.plan ? trajectory_rows(*r.plan) : trajectory_rows(*r.scaled);
    emit(trajectory_csv(rows), csv_path, out);
  }
  emit(dump_json(result_to_json(result_from_report(r, engine, f.timing))), f.out, out);
  return status_exit(r.status);
}

int cmd_reliability(const std::string& path, const std::string& mode, const CommonFlags& f,
                    std::ostream& out) {
  const std::string text = read_text_file(path);
  const Json j = parse_json_text(text, "graph");
  ReliabilityProblem pr;
  try {
    pr = reliability_from_json(j, parse_mode(mode));
  } catch (const SchemaError& e) {
    throw InvalidArgument(e.with_lines(json_line_index(text), "graph"));
  }
  const Engine engine = parse_engine(f.engine.empty() ? "colgen" : f.engine);
  const double eps = f.eps > 0 ? f.eps : 0.05;
  EngineOptions eo;
  eo.seed = f.seed;
  eo.max_iters = f.max_iters;
  const ReliabilityResult r = network_reliability(pr, engine, eps, eo);
  require_feasible(r.report, reliability_marginals(pr));
  emit(dump_json(reliability_report_json(r, engine)), f.out, out);
  return status_exit(r.report.status);
}

int cmd_risk(const std::string& path, const CommonFlags& f, std::ostream& out) {
  const std::string text = read_text_file(path);
  const Json j = parse_json_text(text, "risk");
  RiskProblem pr;
  try {
    pr = risk_from_json(j);
  } catch (const SchemaError& e) {
    throw InvalidArgument(e.with_lines(json_line_index(text), "risk"));
  }
  const Engine engine = parse_engine(f.engine.empty() ? "sinkhorn" : f.engine);
  const double eps = f.eps > 0 ? f.eps : 0.1;
  EngineOptions eo;
  eo.seed = f.seed;
  eo.max_iters = f.max_iters;
  const RiskResult r = worst_case_profit(pr, engine, eps, eo);
  require_feasible(r.report, risk_marginals(pr));
  const Json report = {{"engine", engine_name(engine)},
                       {"value", r.value},
                       {"value_stderr", r.value_stderr},
                       {"status", status_name(r.report.status)},
                       {"min_total", risk_min_total(pr)},
                       {"max_total", risk_max_total(pr)},
                       {"iterations", r.report.iterations},
                       {"oracle_calls", r.report.oracle_calls}};
  emit(dump_json(report), f.out, out);
  return status_exit(r.report.status);
}

int cmd_project(const std::string& path, const CommonFlags& f, std::ostream& out) {
  const std::string text = read_text_file(path);
  const Json j = parse_json_text(text, "projection");
  std::optional<ProjectionProblem> pr;
  try {
    pr = projection_from_json(j);
  } catch (const SchemaError& e) {
    throw InvalidArgument(e.with_lines(json_line_index(text), "projection"));
  }
  if (f.eps > 0) pr->eps = f.eps;
  ProjectionOptions po;
  po.seed = f.seed;
  po.iterations = f.max_iters;
  const ProjectionResult r = fw_project(*pr, po);
  if (!check_feasible(r.plan, pr->marginals, kPlanTol)) {
    throw OracleViolation("projected plan violates the marginals beyond 1e-7");
  }
  const Json report = {{"objective", r.objective},
                       {"gap", r.gap},
                       {"gap_bound", r.gap_bound},
                       {"eps", pr->eps},
                       {"iterations", r.iterations},
                       {"lp_iterations", r.lp_iterations},
                       {"plan", plan_to_json(r.plan)}};
  emit(dump_json(report), f.out, out);
  return kExitOk;
}

// Quick end-to-end checks against brute force on tiny instances.
int cmd_selftest(std::ostream& out) {
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    out << "selftest " << name << ": " << (ok ? "pass" : "FAIL") << " (" << detail << ")\n";
    failures += ok ? 0 : 1;
  };
  const auto fmt = [](double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
  };
  {
    DenseTensor t(2, 2, Vec{0.0, 1.0, 1.0, 0.0});
    const SolveReport r = colgen_solve(make_dense_cost(t), Marginals::uniform(2, 2));
    check("dense-2x2", std::abs(r.value) < 1e-9, "value " + fmt(r.value));
  }
  {
    const SolveReport r = solve_euler_flow(make_grid_euler_flow(3, 3, "identity"),
                                           Engine::kColgen, 0.1);
    check("euler-identity", std::abs(r.value) < 1e-9, "value " + fmt(r.value));
  }
  {
    ReliabilityProblem pr;
    pr.graph.vertices = 3;
    pr.graph.edges = {{0, 1}, {1, 2}};
    pr.q = {0.8, 0.7};
    pr.mode = ReliabilityMode::kBest;
    const double best = network_reliability(pr, Engine::kColgen, 0.05).probability;
    pr.mode = ReliabilityMode::kWorst;
    const double worst = network_reliability(pr, Engine::kColgen, 0.05).probability;
    check("reliability-series", std::abs(best - 0.7) < 1e-9 && std::abs(worst - 0.5) < 1e-9,
          "best " + fmt(best) + ", worst " + fmt(worst));
  }
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Factor> factors;
    for (int a = 0; a < 3; ++a) {
      Factor fac{{a, (a + 1) % 3}, Vec(9)};
      std::sort(fac.scope.begin(), fac.scope.end());
      for (double& x : fac.table) x = u(rng);
      factors.push_back(std::move(fac));
    }
    auto gc = std::make_shared<const GraphicalCost>(3, 3, factors);
    const Marginals m = Marginals::uniform(3, 3);
    const DenseTensor dense =
        DenseTensor::from_function(3, 3, [&gc](const Tuple& t) { return gc->evaluate(t); });
    const double opt = brute_force_mot(dense, m).first;
    const StructuredCost sc = make_graphical_cost(gc);
    const double cg = colgen_solve(sc, m).value;
    check("graphical-colgen", std::abs(cg - opt) < 1e-6, fmt(cg) + " vs " + fmt(opt));
    const double sk = sinkhorn_solve(sc, m, 0.1).value;
    check("graphical-sinkhorn", sk <= opt + 0.1 && sk >= opt - 1e-9,
          fmt(sk) + " vs " + fmt(opt));
  }
  return failures == 0 ? kExitOk : kExitError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Structured multimarginal optimal transport solvers", "motkit");
  app.require_subcommand(1);

  CommonFlags solve_f;
  std::string solve_path;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem file");
  solve->add_option("problem", solve_path, "problem JSON")->required();
  add_common(solve, solve_f, true);

  CommonFlags euler_f;
  int euler_n = 0;
  int euler_k = 0;
  std::string euler_sigma = "shift-half";
  std::string euler_csv;
  CLI::App* euler = app.add_subcommand("eulerflow", "generalized Euler flow on a grid");
  euler->add_option("--n", euler_n, "grid points")->required()->check(CLI::Range(2, 100000));
  euler->add_option("--k", euler_k, "time steps")->required()->check(CLI::Range(2, 1000));
  euler->add_option("--sigma", euler_sigma,
                    "identity, shift-half, double-cover, reverse or a list like 2,0,1");
  euler->add_option("--csv", euler_csv, "trajectory CSV path");
  add_common(euler, euler_f, true);

  CommonFlags rel_f;
  std::string rel_path;
  std::string rel_mode;
  CLI::App* rel = app.add_subcommand("reliability", "worst- or best-case network reliability");
  rel->add_option("graph", rel_path, "graph JSON")->required();
  rel->add_option("--mode", rel_mode, "worst or best")
      ->required()
      ->check(CLI::IsMember({"worst", "best"}));
  add_common(rel, rel_f, true);

  CommonFlags risk_f;
  std::string risk_path;
  CLI::App* risk = app.add_subcommand("risk", "worst-case expected portfolio return");
  risk->add_option("problem", risk_path, "risk JSON")->required();
  add_common(risk, risk_f, true);

  CommonFlags proj_f;
  std::string proj_path;
  CLI::App* proj = app.add_subcommand("project", "project Q onto the transportation polytope");
  proj->add_option("problem", proj_path, "projection JSON")->required();
  add_common(proj, proj_f, false);

  CLI::App* selftest = app.add_subcommand("selftest", "run built-in checks");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_path, solve_f, out);
    if (euler->parsed()) return cmd_eulerflow(euler_n, euler_k, euler_sigma, euler_f, euler_csv, out);
    if (rel->parsed()) return cmd_reliability(rel_path, rel_mode, rel_f, out);
    if (risk->parsed()) return cmd_risk(risk_path, risk_f, out);
    if (proj->parsed()) return cmd_project(proj_path, proj_f, out);
    if (selftest->parsed()) return cmd_selftest(out);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace motkit::cli
