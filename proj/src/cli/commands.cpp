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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>
#include <variant>

#include "dpnl/cli.hpp"
#include "dpnl/cnf.hpp"
#include "dpnl/dpnl.hpp"
#include "dpnl/logic.hpp"
#include "dpnl/sumtask.hpp"

namespace dpnl::cli {

using nlohmann::json;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return in;
}

HornProgram load_program(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_program(in);
}

VariableOrder make_order(const std::string& name, std::size_t m, int sum_n) {
  if (name == "seq") return VariableOrder::identity(m);
  if (name == "rev") return VariableOrder::reversed(m);
  if (name == "r2l") {
    if (sum_n == 0) throw UsageError("order r2l applies to the sum task only");
    return right_to_left_order(sum_n);
  }
  if (name == "witness") return witness_order(VariableOrder::identity(m).permutation());
  throw UsageError("unknown order '" + name + "'");
}

// A resolved query: instance, symbolic function, typed oracle and order.
struct Problem {
  Instance inst;
  SymbolicFunction fn;
  std::variant<AdditionOracle, LogicOracle> oracle;
  VariableOrder order;
  Value output = 0;
  std::optional<SumInstanceSpec> sum_spec;
  json config;
};

template <class F>
decltype(auto) visit_oracle(const Problem& p, F&& f) {
  return std::visit(std::forward<F>(f), p.oracle);
}

SumInstanceSpec sum_spec_of(const ProblemOptions& opt) {
  if (opt.uniform == !opt.dists.empty()) {
    throw UsageError("give exactly one of --uniform and --dists");
  }
  SumInstanceSpec spec;
  if (opt.uniform) {
    if (opt.n < 1) throw UsageError("--uniform needs --n");
    spec = SumInstanceSpec::uniform(opt.n);
  } else {
    spec = load_digit_dists(opt.dists);
    if (opt.n != 0 && opt.n != spec.n) {
      throw UsageError("--n " + std::to_string(opt.n) + " but --dists has " +
                       std::to_string(spec.n) + " digits per number");
    }
  }
  return spec;
}

Problem resolve(const ProblemOptions& opt, bool need_output) {
  if (!opt.program.empty()) {
    if (opt.n != 0 || opt.uniform || !opt.dists.empty()) {
      throw UsageError("--program excludes the sum task flags");
    }
    HornProgram prog = load_program(opt.program);
    Instance inst = logic_instance(prog);
    const std::string order_name = opt.order.empty() ? "witness" : opt.order;
    VariableOrder order = make_order(order_name, inst.m(), 0);
    const Value o = opt.sum ? static_cast<Value>(*opt.sum) : 1;
    if (o != 0 && o != 1) throw UsageError("program output must be 0 or 1");
    json config = {{"program", opt.program}, {"order", order_name},
                   {"output", o}, {"m", prog.m()}};
    return Problem{std::move(inst), logic_function(prog), LogicOracle(prog),
                   std::move(order), o, std::nullopt, std::move(config)};
  }
  SumInstanceSpec spec = sum_spec_of(opt);
  SumTask task = build_sum_instance(spec);
  const std::string order_name = opt.order.empty() ? "r2l" : opt.order;
  VariableOrder order = make_order(order_name, task.instance.m(), spec.n);
  Value o = 0;
  if (need_output) {
    if (!opt.sum) throw UsageError("--sum is required");
    if (*opt.sum < 0 ||
        static_cast<std::uint64_t>(*opt.sum) >= spec.output_size()) {
      throw UsageError("--sum outside [0, " +
                       std::to_string(spec.output_size() - 1) + "]");
    }
    o = static_cast<Value>(*opt.sum);
  }
  json config = {{"n", spec.n},
                 {"uniform", opt.uniform},
                 {"order", order_name},
                 {"output", o}};
  if (!opt.dists.empty()) config["dists"] = opt.dists;
  return Problem{task.instance, task.function, task.oracle, std::move(order),
                 o, spec, std::move(config)};
}

RunReport base_report(const std::string& command) {
  RunReport r;
  r.command = command;
  r.timestamp = utc_timestamp();
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

RunReport cmd_pwmc(const PwmcOptions& opt) {
  if (opt.cnf.empty()) throw UsageError("--cnf is required");
  std::ifstream in = open_input(opt.cnf);
  DimacsProblem problem = parse_dimacs(in);
  WeightMap sigma = problem.weights_or_uniform();
  if (!opt.weights.empty()) {
    std::ifstream win = open_input(opt.weights);
    sigma = parse_weights(win, problem.formula.num_vars());
  }
  RunReport r = base_report("pwmc");
  r.config = {{"cnf", opt.cnf},
              {"weights", opt.weights},
              {"brute", opt.brute},
              {"branching", opt.fixed_order ? "fixed" : "occurrences"},
              {"tol", opt.tol}};
  ProbDpllStats st;
  const auto t0 = std::chrono::steady_clock::now();
  r.result = probdpll(problem.formula, sigma,
                      opt.fixed_order ? BranchRule::kFixedOrder
                                      : BranchRule::kMostOccurrences,
                      &st);
  r.stats.wall_time = detail::seconds_since(t0);
  r.stats.oracle_calls = st.calls;
  r.stats.branch_nodes = st.branch_nodes;
  r.extra["vars"] = problem.formula.num_vars();
  r.extra["clauses"] = problem.formula.num_clauses();
  if (opt.brute) {
    const double brute = pwmc_bruteforce(problem.formula, sigma);
    const double diff = std::abs(brute - r.result);
    r.extra["brute"] = brute;
    r.extra["abs_diff"] = diff;
    r.ok = diff <= opt.tol;
  }
  return r;
}

RunReport cmd_sum(const SumOptions& opt) {
  if (opt.full == opt.problem.sum.has_value()) {
    throw UsageError("give exactly one of --sum and --full");
  }
  if (!opt.problem.program.empty()) {
    throw UsageError("sum does not take --program");
  }
  Problem p = resolve(opt.problem, !opt.full);
  RunReport r = base_report("sum");
  r.config = p.config;
  r.config["full"] = opt.full;
  r.config["reference"] = opt.reference;
  r.config["tol"] = opt.tol;
  std::vector<double> reference;
  if (opt.reference) reference = sum_distribution_by_convolution(*p.sum_spec);

  if (opt.full) {
    OutputDistribution dist = visit_oracle(p, [&](const auto& oracle) {
      return output_distribution(p.inst, oracle, p.order);
    });
    r.stats = dist.stats;
    double total = 0.0;
    for (double x : dist.probs) total += x;
    r.result = total;
    // The largest output 2*10^N - 1 is unreachable and left out.
    dist.probs.pop_back();
    r.extra["distribution"] = dist.probs;
    r.extra["total_mass"] = total;
    if (opt.reference) {
      double worst = 0.0;
      for (std::size_t o = 0; o < dist.probs.size(); ++o) {
        worst = std::max(worst, std::abs(dist.probs[o] - reference[o]));
      }
      r.extra["reference_max_abs_diff"] = worst;
      r.ok = worst <= opt.tol;
    }
    if (std::abs(total - 1.0) > opt.tol) r.ok = false;
    return r;
  }
  DpnlResult res = visit_oracle(p, [&](const auto& oracle) {
    return dpnl(p.inst, p.output, oracle, p.order);
  });
  r.result = res.probability;
  r.stats = res.stats;
  if (opt.reference) {
    const double diff =
        std::abs(reference[static_cast<std::size_t>(p.output)] - r.result);
    r.extra["reference"] = reference[static_cast<std::size_t>(p.output)];
    r.extra["abs_diff"] = diff;
    r.ok = diff <= opt.tol;
  }
  return r;
}

RunReport cmd_approx(const ApproxOptions& opt) {
  StopPolicy stop = StopPolicy::exhaustive();
  if (opt.stop == "eps-mult" || opt.stop == "eps-add") {
    if (!opt.eps) throw UsageError("--stop " + opt.stop + " needs --eps");
    stop = opt.stop == "eps-mult" ? StopPolicy::eps_multiplicative(*opt.eps)
                                  : StopPolicy::eps_additive(*opt.eps);
  } else if (opt.stop == "time") {
    if (!opt.time) throw UsageError("--stop time needs --time");
    stop = StopPolicy::time_budget(*opt.time);
  } else if (opt.stop != "exhaustive") {
    throw UsageError("unknown stop policy '" + opt.stop + "'");
  }
  ExploreHeuristic h = ExploreHeuristic::max_probability();
  if (opt.heuristic == "fifo") {
    h = ExploreHeuristic::fifo();
  } else if (opt.heuristic == "random") {
    h = ExploreHeuristic::random(opt.seed);
  } else if (opt.heuristic != "maxprob") {
    throw UsageError("unknown heuristic '" + opt.heuristic + "'");
  }
  Problem p = resolve(opt.problem, true);
  RunReport r = base_report("approx");
  r.seed = opt.seed;
  r.config = p.config;
  r.config["stop"] = opt.stop;
  if (opt.eps) r.config["eps"] = *opt.eps;
  if (opt.time) r.config["time"] = *opt.time;
  r.config["heuristic"] = opt.heuristic;

  std::vector<BoundSnapshot> trace;
  ApproxResult res = visit_oracle(p, [&](const auto& oracle) {
    return approx_dpnl(p.inst, p.output, oracle, stop, h, p.order,
                       opt.trace.empty() ? nullptr : &trace);
  });
  r.bounds = res.bounds;
  r.result = res.bounds.estimate();
  r.stats = res.stats;
  r.extra["iterations"] = res.iterations;
  r.extra["exhausted"] = res.exhausted;
  if (!opt.trace.empty()) {
    std::ofstream out(opt.trace);
    if (!out) throw UsageError("cannot write " + opt.trace);
    for (const BoundSnapshot& s : trace) {
      out << json{{"iteration", s.iteration}, {"low", s.low}, {"up", s.up}}
                 .dump()
          << '\n';
    }
  }
  if (opt.exact) {
    const double exact = visit_oracle(p, [&](const auto& oracle) {
                           return dpnl(p.inst, p.output, oracle, p.order);
                         }).probability;
    r.extra["exact"] = exact;
    const double slack = 1e-12;
    bool ok = res.bounds.low <= exact + slack && exact <= res.bounds.up + slack;
    const double est = res.bounds.estimate();
    if (opt.stop == "eps-mult") {
      const double f = 1.0 + *opt.eps;
      ok = ok && est >= exact / f - slack && est <= exact * f + slack;
    } else if (opt.stop == "eps-add") {
      ok = ok && std::abs(est - exact) <= *opt.eps + slack;
    } else if (opt.stop == "exhaustive") {
      ok = ok && std::abs(est - exact) <= kDefaultTol;
    }
    r.ok = ok;
  }
  return r;
}

RunReport cmd_logic(const LogicOptions& opt) {
  if (opt.program.empty() == (opt.nodes == 0)) {
    throw UsageError("give exactly one of --program and --nodes");
  }
  HornProgram prog = opt.program.empty()
                         ? reachability_program(opt.nodes, opt.edge_prob,
                                                opt.self_loops)
                         : load_program(opt.program);
  RunReport r = base_report("logic");
  r.config = {{"program", opt.program}, {"nodes", opt.nodes},
              {"order", opt.order},     {"brute", opt.brute},
              {"tol", opt.tol}};
  if (opt.nodes != 0) {
    r.config["edge_prob"] = opt.edge_prob;
    r.config["self_loops"] = opt.self_loops;
  }
  r.extra["m"] = prog.m();
  r.extra["query"] = prog.atoms.name(prog.query);
  if (prog.m() == 0) {
    // Nothing probabilistic: the answer is decided by the rules alone.
    r.result = entails(prog.rules, prog.atoms.size(), prog.query) ? 1.0 : 0.0;
  } else {
    Instance inst = logic_instance(prog);
    VariableOrder order = make_order(opt.order, inst.m(), 0);
    DpnlResult res = dpnl(inst, 1, LogicOracle(prog), order);
    r.result = res.probability;
    r.stats = res.stats;
  }
  if (opt.count_provenance) {
    if (opt.nodes == 0) {
      throw UsageError("--count-provenance needs --nodes");
    }
    r.extra["provenance_clauses"] = provenance_clause_count(opt.nodes);
  }
  if (opt.brute) {
    if (prog.m() > 12) {
      throw UsageError("--brute supports at most 12 probabilistic facts");
    }
    const double brute = problog_bruteforce(prog);
    const double diff = std::abs(brute - r.result);
    r.extra["brute"] = brute;
    r.extra["abs_diff"] = diff;
    r.ok = diff <= opt.tol;
  }
  return r;
}

RunReport cmd_gradcheck(const GradcheckOptions& opt) {
  if (!(opt.h > 0.0)) throw UsageError("--h must be positive");
  Problem p = resolve(opt.problem, true);
  RunReport r = base_report("gradcheck");
  r.config = p.config;
  r.config["h"] = opt.h;
  r.config["tol"] = opt.tol;
  GradientResult g = visit_oracle(p, [&](const auto& oracle) {
    return dpnl_gradient(p.inst, p.output, oracle, p.order);
  });
  r.result = g.value;
  r.stats = g.stats;

  std::vector<std::vector<double>> w;
  for (const DiscreteDistribution& d : p.inst.dists()) {
    w.emplace_back(d.probs().begin(), d.probs().end());
  }
  double max_rel = 0.0;
  double max_recon = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double recon = 0.0;
    for (std::size_t x = 0; x < w[k].size(); ++x) {
      const double saved = w[k][x];
      w[k][x] = saved + opt.h;
      const double up = bruteforce_eq3(w, p.fn, p.output);
      w[k][x] = saved - opt.h;
      const double down = bruteforce_eq3(w, p.fn, p.output);
      w[k][x] = saved;
      const double numeric = (up - down) / (2.0 * opt.h);
      const double analytic = g.partials[k][x];
      max_rel = std::max(max_rel, std::abs(analytic - numeric) /
                                      std::max(1.0, std::abs(numeric)));
      recon += saved * analytic;
    }
    max_recon = std::max(max_recon, std::abs(recon - g.value));
  }
  r.extra["max_rel_err"] = max_rel;
  r.extra["max_reconstruction_err"] = max_recon;
  r.ok = max_rel <= opt.tol && max_recon <= kDefaultTol;
  return r;
}

// ---------------------------------------------------------------------------
// Bench

namespace {

struct BenchJob {
  int size;
  int repeat;
  std::size_t policy;
};

struct BenchSample {
  double time = 0.0;
  double nodes = 0.0;
};

const std::vector<std::string>& bench_policies() {
  static const std::vector<std::string> names = {"exact", "eps-mult",
                                                 "eps-add", "time"};
  return names;
}

std::mt19937_64 job_rng(std::uint64_t seed, int size, int repeat) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(size),
                    static_cast<std::uint32_t>(repeat)};
  return std::mt19937_64(seq);
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  for (double& x : p) x = e(rng);
  return p;
}

template <class O>
BenchSample run_policy(const Instance& inst, Value o, const O& oracle,
                       const VariableOrder& order, std::size_t policy,
                       double budget) {
  BenchSample s;
  if (policy == 0) {
    DpnlResult res = dpnl(inst, o, oracle, order);
    s.time = res.stats.wall_time;
    s.nodes = static_cast<double>(res.stats.branch_nodes);
    return s;
  }
  StopPolicy stop = policy == 1   ? StopPolicy::eps_multiplicative(0.1)
                    : policy == 2 ? StopPolicy::eps_additive(0.05)
                                  : StopPolicy::time_budget(budget);
  ApproxResult res = approx_dpnl(inst, o, oracle, stop,
                                 ExploreHeuristic::max_probability(), order);
  s.time = res.stats.wall_time;
  s.nodes = static_cast<double>(res.stats.branch_nodes);
  return s;
}

BenchSample run_job(const BenchOptions& opt, const BenchJob& job) {
  std::mt19937_64 rng = job_rng(opt.seed, job.size, job.repeat);
  if (opt.task == "sum") {
    SumInstanceSpec spec;
    spec.n = job.size;
    for (std::size_t k = 0; k < spec.m(); ++k) {
      spec.digit_dists.emplace_back(random_simplex(rng, 10));
    }
    SumTask task = build_sum_instance(spec);
    const Value o = static_cast<Value>(std::uniform_int_distribution<Value>(
        0, static_cast<Value>(spec.output_size()) - 2)(rng));
    return run_policy(task.instance, o, task.oracle, task.order, job.policy,
                      opt.time_budget);
  }
  const std::size_t n = static_cast<std::size_t>(job.size);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<std::vector<double>> probs(n, std::vector<double>(n));
  for (auto& row : probs) {
    for (double& x : row) x = u(rng);
  }
  HornProgram prog = reachability_program(n, probs);
  Instance inst = logic_instance(prog);
  return run_policy(inst, 1, LogicOracle(prog),
                    witness_order(VariableOrder::identity(inst.m()).permutation()),
                    job.policy, opt.time_budget);
}

}  // namespace

std::vector<BenchRow> cmd_bench(const BenchOptions& opt) {
  if (opt.task != "sum" && opt.task != "logic-reach") {
    throw UsageError("unknown bench task '" + opt.task + "'");
  }
  if (opt.repeats < 1) throw UsageError("--repeats must be at least 1");
  if (opt.n_min > opt.n_max) throw UsageError("empty size range");
  if (opt.task == "sum" && (opt.n_min < 1 || opt.n_max > kMaxSumDigits)) {
    throw UsageError("sum sizes must lie in 1.." +
                     std::to_string(kMaxSumDigits));
  }
  if (opt.task == "logic-reach" && opt.n_min < 2) {
    throw UsageError("reachability sizes start at 2");
  }
  const std::size_t num_policies = bench_policies().size();
  std::vector<BenchJob> jobs;
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    for (std::size_t pol = 0; pol < num_policies; ++pol) {
      for (int rep = 0; rep < opt.repeats; ++rep) jobs.push_back({n, rep, pol});
    }
  }
  std::vector<BenchSample> samples(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      samples[i] = run_job(opt, jobs[i]);
    }
  };
  const unsigned workers = std::max(1u, opt.parallel);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < jobs.size(); i += opt.repeats) {
    BenchRow row;
    row.task = opt.task;
    row.size = jobs[i].size;
    row.policy = bench_policies()[jobs[i].policy];
    double t = 0.0, t2 = 0.0, nodes = 0.0;
    for (int rep = 0; rep < opt.repeats; ++rep) {
      const BenchSample& s = samples[i + rep];
      t += s.time;
      t2 += s.time * s.time;
      nodes += s.nodes;
    }
    const double reps = opt.repeats;
    row.mean_time_s = t / reps;
    row.std_time_s =
        std::sqrt(std::max(0.0, t2 / reps - row.mean_time_s * row.mean_time_s));
    row.mean_nodes = nodes / reps;
    if (opt.task == "logic-reach") {
      row.provenance_clauses =
          provenance_clause_count(static_cast<std::size_t>(row.size));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dpnl::cli
