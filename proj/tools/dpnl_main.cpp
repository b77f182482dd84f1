// Copyright 2026 The dpnl Authors
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

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dpnl/cli.hpp"

namespace {

using namespace dpnl::cli;

void add_problem_flags(CLI::App* sub, ProblemOptions& p, bool with_program) {
  sub->add_option("--n", p.n, "digits per number");
  sub->add_option("--dists", p.dists,
                  "digit tables: JSON array of 2N arrays of 10, or a file");
  sub->add_flag("--uniform", p.uniform, "uniform digit tables");
  sub->add_option("--sum", p.sum,
                  with_program ? "queried output (sum, or 0/1 for a program)"
                               : "queried sum");
  sub->add_option("--order", p.order, "variable order: r2l, seq, rev, witness");
  if (with_program) {
    sub->add_option("--program", p.program, "ground Horn program file");
  }
}

int emit(const RunReport& r, bool as_json) {
  if (as_json) {
    std::cout << r.to_json().dump(2) << '\n';
  } else {
    print_report(std::cout, r);
  }
  return r.ok ? 0 : 1;
}

std::string echo_args(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpnl: oracle-guided probabilistic inference"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "print the report as JSON");

  PwmcOptions pwmc;
  auto* c_pwmc = app.add_subcommand("pwmc", "weighted model count of a CNF");
  c_pwmc->add_option("--cnf", pwmc.cnf, "DIMACS file")->required();
  c_pwmc->add_option("--weights", pwmc.weights, "weight file");
  c_pwmc->add_flag("--brute", pwmc.brute, "cross-check by enumeration");
  c_pwmc->add_flag("--fixed-order", pwmc.fixed_order,
                   "branch on the lowest variable");
  c_pwmc->add_option("--tol", pwmc.tol, "cross-check tolerance");

  SumOptions sum;
  auto* c_sum = app.add_subcommand("sum", "exact multi-digit sum query");
  add_problem_flags(c_sum, sum.problem, false);
  c_sum->add_flag("--full", sum.full, "whole output distribution");
  c_sum->add_flag("--reference", sum.reference,
                  "cross-check against digit convolution");
  c_sum->add_option("--tol", sum.tol, "cross-check tolerance");

  ApproxOptions approx;
  auto* c_approx = app.add_subcommand("approx", "anytime bounds");
  add_problem_flags(c_approx, approx.problem, true);
  c_approx->add_option("--stop", approx.stop,
                       "eps-mult, eps-add, time or exhaustive");
  c_approx->add_option("--eps", approx.eps, "error parameter");
  c_approx->add_option("--time", approx.time, "budget in seconds");
  c_approx->add_option("--heuristic", approx.heuristic,
                       "maxprob, fifo or random");
  c_approx->add_option("--seed", approx.seed, "seed for random exploration");
  c_approx->add_option("--trace", approx.trace, "JSON-lines bound trace");
  c_approx->add_flag("--exact", approx.exact,
                     "also run the exact search and check the bounds");

  LogicOptions logic;
  auto* c_logic = app.add_subcommand("logic", "query success probability");
  c_logic->add_option("--program", logic.program, "ground Horn program file");
  c_logic->add_option("--nodes", logic.nodes,
                      "complete-graph reachability on this many nodes");
  c_logic->add_option("--edge-prob", logic.edge_prob,
                      "edge probability for --nodes");
  c_logic->add_flag("--self-loops", logic.self_loops,
                    "include self-loop edges for --nodes");
  c_logic->add_flag("--count-provenance", logic.count_provenance,
                    "print the provenance clause count for --nodes");
  c_logic->add_flag("--brute", logic.brute, "cross-check by enumeration");
  c_logic->add_option("--order", logic.order, "witness, seq or rev");
  c_logic->add_option("--tol", logic.tol, "cross-check tolerance");

  GradcheckOptions grad;
  auto* c_grad = app.add_subcommand("gradcheck",
                                    "analytic vs finite-difference gradient");
  // --h is the step size, so help is reachable only as --help.
  c_grad->set_help_flag("--help", "print this help message and exit");
  add_problem_flags(c_grad, grad.problem, true);
  c_grad->add_option("--h", grad.h, "finite-difference step");
  c_grad->add_option("--tol", grad.tol, "relative error tolerance");

  BenchOptions bench;
  std::string n_range = "1..3";
  auto* c_bench = app.add_subcommand("bench", "timing table");
  c_bench->add_option("--task", bench.task, "sum or logic-reach");
  c_bench->add_option("--n-range", n_range, "sizes as a..b");
  c_bench->add_option("--repeats", bench.repeats, "instances per size");
  c_bench->add_option("--out", bench.out, "CSV output path");
  c_bench->add_option("--parallel", bench.parallel, "worker threads");
  c_bench->add_option("--seed", bench.seed, "instance seed");
  c_bench->add_option("--time", bench.time_budget,
                      "budget for the time policy");

  CLI11_PARSE(app, argc, argv);

  const std::string echo = echo_args(argc, argv);
  try {
    if (*c_bench) {
      std::tie(bench.n_min, bench.n_max) = parse_range(n_range);
      const auto rows = cmd_bench(bench);
      print_bench_table(std::cout, rows);
      if (!bench.out.empty()) {
        std::ofstream out(bench.out);
        if (!out) throw UsageError("cannot write " + bench.out);
        write_bench_csv(out, rows);
      }
      return 0;
    }
    RunReport r;
    if (*c_pwmc) {
      r = cmd_pwmc(pwmc);
    } else if (*c_sum) {
      r = cmd_sum(sum);
    } else if (*c_approx) {
      r = cmd_approx(approx);
    } else if (*c_logic) {
      r = cmd_logic(logic);
    } else {
      r = cmd_gradcheck(grad);
    }
    r.command = echo;
    return emit(r, as_json);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const dpnl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const dpnl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
