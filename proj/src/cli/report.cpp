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

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dpnl/cli.hpp"

namespace dpnl::cli {

using nlohmann::json;

json RunReport::to_json() const {
  json j;
  j["command"] = command;
  j["result"] = result;
  j["low"] = bounds ? bounds->low : result;
  j["up"] = bounds ? bounds->up : result;
  j["estimate"] = bounds ? bounds->estimate() : result;
  j["oracle_calls"] = stats.oracle_calls;
  j["branch_nodes"] = stats.branch_nodes;
  j["wall_time_s"] = stats.wall_time;
  j["seed"] = seed;
  j["ok"] = ok;
  j["config"] = config;
  j["timestamp"] = timestamp;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

std::string format_probability(double p) {
  std::ostringstream os;
  os << std::setprecision(12) << p;
  return os.str();
}

namespace {

void print_value(std::ostream& os, const json& v) {
  if (v.is_number_float()) {
    os << format_probability(v.get<double>());
  } else if (v.is_string()) {
    os << v.get<std::string>();
  } else {
    os << v.dump();
  }
}

}  // namespace

void print_report(std::ostream& os, const RunReport& r) {
  os << "command: " << r.command << '\n';
  if (r.bounds) {
    os << "low: " << format_probability(r.bounds->low) << '\n'
       << "up: " << format_probability(r.bounds->up) << '\n'
       << "estimate: " << format_probability(r.bounds->estimate()) << '\n';
  } else {
    os << "result: " << format_probability(r.result) << '\n';
  }
  os << "oracle_calls: " << r.stats.oracle_calls << '\n'
     << "branch_nodes: " << r.stats.branch_nodes << '\n'
     << "wall_time_s: " << r.stats.wall_time << '\n';
  for (const auto& [k, v] : r.extra.items()) {
    if (k == "distribution" && v.is_array()) {
      os << "distribution:\n";
      for (std::size_t o = 0; o < v.size(); ++o) {
        os << "  " << o << ' ' << format_probability(v[o].get<double>())
           << '\n';
      }
      continue;
    }
    os << k << ": ";
    print_value(os, v);
    os << '\n';
  }
  if (!r.ok) os << "CHECK FAILED\n";
}

std::string utc_timestamp() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SumInstanceSpec load_digit_dists(const std::string& json_or_path) {
  json j;
  try {
    const auto first = json_or_path.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && json_or_path[first] == '[') {
      j = json::parse(json_or_path);
    } else {
      std::ifstream in(json_or_path);
      if (!in) throw UsageError("cannot open " + json_or_path);
      j = json::parse(in);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("digit distributions: ") + e.what());
  }
  if (!j.is_array() || j.empty() || j.size() % 2 != 0) {
    throw UsageError("digit distributions must be an array of 2N rows");
  }
  SumInstanceSpec spec;
  spec.n = static_cast<int>(j.size() / 2);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != 10) {
      throw UsageError("row " + std::to_string(r) + " needs 10 entries");
    }
    std::vector<double> p;
    double total = 0.0;
    for (const json& x : row) {
      if (!x.is_number()) {
        throw UsageError("row " + std::to_string(r) + " has a non-number");
      }
      p.push_back(x.get<double>());
      total += p.back();
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw UsageError("row " + std::to_string(r) + " sums to " +
                       format_probability(total) + ", not 1");
    }
    spec.digit_dists.emplace_back(std::move(p));
  }
  spec.validate();
  return spec;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string lo = text.substr(0, dots);
    const std::string hi = text.substr(dots + 2);
    const int a = std::stoi(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(text);
    const int b = std::stoi(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(text);
    if (a > b) throw UsageError("empty range " + text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError("bad range '" + text + "', expected a..b");
  }
}

// ---------------------------------------------------------------------------
// Bench CSV

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchCsvHeader << '\n';
  os << std::setprecision(12);
  for (const BenchRow& r : rows) {
    os << r.task << ',' << r.size << ',' << r.policy << ',' << r.mean_time_s
       << ',' << r.std_time_s << ',' << r.mean_nodes << ',';
    if (r.provenance_clauses) os << *r.provenance_clauses;
    os << '\n';
  }
}

std::vector<BenchRow> read_bench_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kBenchCsvHeader) {
    throw ParseError(1, "unexpected bench CSV header");
  }
  std::vector<BenchRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw ParseError(lineno, "expected 7 fields");
    try {
      BenchRow r;
      r.task = f[0];
      r.size = std::stoi(f[1]);
      r.policy = f[2];
      r.mean_time_s = std::stod(f[3]);
      r.std_time_s = std::stod(f[4]);
      r.mean_nodes = std::stod(f[5]);
      if (!f[6].empty()) r.provenance_clauses = std::stoull(f[6]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError(lineno, "bad number");
    }
  }
  return rows;
}

void print_bench_table(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << std::left << std::setw(12) << "task" << std::setw(6) << "size"
     << std::setw(12) << "policy" << std::right << std::setw(14) << "mean_s"
     << std::setw(14) << "std_s" << std::setw(14) << "nodes" << std::setw(14)
     << "provenance" << '\n';
  for (const BenchRow& r : rows) {
    os << std::left << std::setw(12) << r.task << std::setw(6) << r.size
       << std::setw(12) << r.policy << std::right << std::setprecision(4)
       << std::setw(14) << r.mean_time_s << std::setw(14) << r.std_time_s
       << std::setw(14) << r.mean_nodes << std::setw(14);
    if (r.provenance_clauses) {
      os << *r.provenance_clauses;
    } else {
      os << "-";
    }
    os << '\n';
  }
}

}  // namespace dpnl::cli
