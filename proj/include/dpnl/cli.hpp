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

// Subcommands of the dpnl tool. Each takes a filled option struct and
// returns a report; argument parsing lives in the executable.

#ifndef DPNL_CLI_HPP_
#define DPNL_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpnl/approx.hpp"
#include "dpnl/core.hpp"
#include "dpnl/sumtask.hpp"

namespace dpnl::cli {

// Bad flag combination; the tool exits with status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kDefaultGradTol = 1e-6;

struct RunReport {
  std::string command;
  double result = 0.0;
  std::optional<Bounds> bounds;  // set by approximate runs
  QueryStats stats;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  // Command-specific values, printed after the standard fields.
  nlohmann::json extra = nlohmann::json::object();
  std::string timestamp;
  // False when a cross-check exceeded its tolerance.
  bool ok = true;

  nlohmann::json to_json() const;
};

// Human-readable form; probabilities with 12 significant digits.
void print_report(std::ostream& os, const RunReport& r);
std::string format_probability(double p);
// UTC, ISO 8601.
std::string utc_timestamp();

// Digit tables as a JSON array of 2N arrays of 10 probabilities, given
// inline or as a file path. Rows must sum to 1 within 1e-6.
SumInstanceSpec load_digit_dists(const std::string& json_or_path);

struct PwmcOptions {
  std::string cnf;
  std::string weights;  // optional weight file
  bool brute = false;
  bool fixed_order = false;
  double tol = kDefaultTol;
};
RunReport cmd_pwmc(const PwmcOptions& opt);

// The problem behind sum, approx and gradcheck: a sum task or a program.
struct ProblemOptions {
  int n = 0;
  std::string dists;
  bool uniform = false;
  std::optional<std::int64_t> sum;
  std::string program;
  std::string order;  // r2l, seq, rev, witness; empty picks the task default
};

struct SumOptions {
  ProblemOptions problem;
  bool full = false;
  bool reference = false;  // cross-check against digit convolution
  double tol = kDefaultTol;
};
RunReport cmd_sum(const SumOptions& opt);

struct ApproxOptions {
  ProblemOptions problem;
  std::string stop = "eps-mult";
  std::optional<double> eps;
  std::optional<double> time;
  std::string heuristic = "maxprob";
  std::uint64_t seed = 0;
  std::string trace;  // JSON-lines output path
  bool exact = false;  // also run exact dpnl and check the guarantee
};
RunReport cmd_approx(const ApproxOptions& opt);

struct LogicOptions {
  std::string program;
  bool brute = false;
  bool count_provenance = false;
  std::size_t nodes = 0;  // complete-graph reachability instead of a file
  double edge_prob = 0.5;
  bool self_loops = false;
  std::string order = "witness";
  double tol = kDefaultTol;
};
RunReport cmd_logic(const LogicOptions& opt);

struct GradcheckOptions {
  ProblemOptions problem;
  double h = 1e-6;
  double tol = kDefaultGradTol;
};
RunReport cmd_gradcheck(const GradcheckOptions& opt);

struct BenchOptions {
  std::string task = "sum";
  int n_min = 1;
  int n_max = 3;
  int repeats = 3;
  std::string out;  // CSV path
  unsigned parallel = 1;
  std::uint64_t seed = 0;
  double time_budget = 0.05;
};

struct BenchRow {
  std::string task;
  int size = 0;
  std::string policy;
  double mean_time_s = 0.0;
  double std_time_s = 0.0;
  double mean_nodes = 0.0;
  std::optional<std::uint64_t> provenance_clauses;
};

inline constexpr const char* kBenchCsvHeader =
    "task,size,policy,mean_time_s,std_time_s,mean_nodes,provenance_clauses";

std::vector<BenchRow> cmd_bench(const BenchOptions& opt);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);
std::vector<BenchRow> read_bench_csv(std::istream& is);
void print_bench_table(std::ostream& os, const std::vector<BenchRow>& rows);

// "a..b" or "a".
std::pair<int, int> parse_range(const std::string& text);

}  // namespace dpnl::cli

#endif  // DPNL_CLI_HPP_
