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

#include "dpnl/oracle.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace dpnl {

SymbolicFunction::SymbolicFunction(std::vector<Domain> domains,
                                   Domain output_domain, Eval eval)
    : domains_(std::move(domains)),
      output_domain_(std::move(output_domain)),
      eval_(std::move(eval)) {
  if (domains_.empty()) throw InvalidInstance("symbolic function of arity 0");
  if (!eval_) throw InvalidInstance("symbolic function without evaluator");
}

Value SymbolicFunction::operator()(std::span<const Value> args) const {
  if (args.size() != domains_.size()) {
    throw InvalidInstance("symbolic function called with wrong arity");
  }
  const Value out = eval_(args);
  if (!output_domain_.contains(out)) {
    throw InvalidInstance("symbolic function returned " + std::to_string(out) +
                          ", outside its output domain");
  }
  return out;
}

Value SymbolicFunction::operator()(const Valuation& v) const {
  if (!v.is_total()) {
    throw InvalidInstance("symbolic function evaluated on a partial valuation");
  }
  return (*this)(v.cells());
}

Oracle naive_oracle(SymbolicFunction s) {
  return Oracle(
      [s = std::move(s)](const Valuation& v, Value o) {
        if (!v.is_total()) return OracleVerdict::unknown();
        return OracleVerdict::from_bool(s(v) == o);
      },
      /*claims_complete=*/false, "naive");
}

Oracle exhaustive_oracle(SymbolicFunction s, std::uint64_t max_completions) {
  return Oracle(
      [s = std::move(s), max_completions](const Valuation& v, Value o) {
        const std::uint64_t n = completion_count(v, s.domains());
        if (n > max_completions) {
          throw SizeLimitExceeded("exhaustive oracle: " + std::to_string(n) +
                                  " completions exceed the limit of " +
                                  std::to_string(max_completions));
        }
        OracleVerdict out;
        for (const Valuation& c : total_completions(v, s.domains())) {
          if (s(c) == o) {
            if (!out.witness_true) out.witness_true = c;
          } else {
            if (!out.witness_false) out.witness_false = c;
          }
          if (out.witness_true && out.witness_false) break;
        }
        if (!out.witness_false) return OracleVerdict::yes();
        if (!out.witness_true) return OracleVerdict::no();
        out.answer = Answer::Unknown;
        return out;
      },
      /*claims_complete=*/true, "exhaustive");
}

// ---------------------------------------------------------------------------
// Checkers

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

std::string describe(const Valuation& v, Value o) {
  std::ostringstream os;
  os << "v=" << v << " o=" << o;
  return os.str();
}

// Which kinds of completion of v exist for output o.
struct CompletionKinds {
  bool any_equal = false;
  bool any_different = false;
};

CompletionKinds scan_completions(const SymbolicFunction& s, const Valuation& v,
                                 Value o) {
  CompletionKinds k;
  for (const Valuation& c : total_completions(v, s.domains())) {
    (s(c) == o ? k.any_equal : k.any_different) = true;
    if (k.any_equal && k.any_different) break;
  }
  return k;
}

std::optional<std::string> check_witness(const SymbolicFunction& s,
                                         const Valuation& v, Value o,
                                         const std::optional<Valuation>& w,
                                         bool maps_to_o, const char* which) {
  if (!w) return std::nullopt;
  const std::string tag = std::string(which) + " ";
  if (w->size() != v.size() || !w->is_total()) {
    return tag + "is not a total valuation";
  }
  check_valuation(*w, s.domains());
  if (!is_subvaluation(*w, v)) return tag + "is not a sub-valuation";
  if ((s(*w) == o) != maps_to_o) {
    return tag + (maps_to_o ? "does not map to the output"
                            : "maps to the output");
  }
  return std::nullopt;
}

// Verdict check given precomputed completion kinds.
std::optional<std::string> judge(const SymbolicFunction& s, const Valuation& v,
                                 Value o, const OracleVerdict& verdict,
                                 bool completeness,
                                 const CompletionKinds& kinds) {
  if (v.is_total() && verdict.is_unknown()) {
    return "unknown answer on a total valuation";
  }
  if (!completeness) {
    if (verdict.answer == Answer::True && kinds.any_different) {
      return "answer 1 but some completion maps elsewhere";
    }
    if (verdict.answer == Answer::False && kinds.any_equal) {
      return "answer 0 but some completion maps to the output";
    }
    if (auto err = check_witness(s, v, o, verdict.witness_true, true,
                                 "witness_true")) {
      return err;
    }
    if (auto err = check_witness(s, v, o, verdict.witness_false, false,
                                 "witness_false")) {
      return err;
    }
    return std::nullopt;
  }
  if (verdict.is_unknown()) {
    if (!kinds.any_equal) return "unknown answer but no completion maps to o";
    if (!kinds.any_different) {
      return "unknown answer but every completion maps to o";
    }
  }
  return std::nullopt;
}

// Whether this verdict requires enumeration at all.
bool needs_scan(const OracleVerdict& verdict, bool completeness) {
  return completeness ? verdict.is_unknown() : !verdict.is_unknown();
}

Valuation random_valuation(std::mt19937_64& rng,
                           std::span<const Domain> domains) {
  // Per-sample unknown rate so both near-empty and near-total valuations
  // are drawn.
  const double unknown_rate =
      std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::vector<Value> cells(domains.size(), kUnknown);
  for (std::size_t k = 0; k < domains.size(); ++k) {
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= unknown_rate) {
      cells[k] = static_cast<Value>(bounded(rng, domains[k].size()));
    }
  }
  return Valuation(std::move(cells));
}

CheckReport sampled_check(const Oracle& oracle, const SymbolicFunction& s,
                          std::uint64_t budget, std::uint64_t seed,
                          const CheckOptions& opts, bool completeness) {
  if (budget == 0) throw InvalidInstance("check budget must be at least 1");
  std::mt19937_64 rng(seed);
  CheckReport report;
  for (std::uint64_t i = 0; i < budget; ++i) {
    const Valuation v = random_valuation(rng, s.domains());
    const Value o = static_cast<Value>(bounded(rng, s.output_domain().size()));
    const OracleVerdict verdict = oracle.query(v, o);
    ++report.queries;
    bool skipped = false;
    auto err = verify_verdict(s, v, o, verdict, completeness,
                              opts.max_completions, &skipped);
    if (skipped) {
      ++report.skipped;
      continue;
    }
    ++report.verified;
    if (err) {
      report.counterexample =
          Counterexample{v, o, verdict.answer, describe(v, o) + ": " + *err};
      return report;
    }
  }
  return report;
}

CheckReport exhaustive_check(const Oracle& oracle, const SymbolicFunction& s,
                             const CheckOptions& opts, bool completeness) {
  const auto domains = s.domains();
  const std::size_t m = domains.size();
  const std::size_t outputs = s.output_domain().size();
  CheckReport report;

  // Odometer over cells in {unknown, 0, ..., |V_k|-1}.
  std::vector<Value> cells(m, kUnknown);
  std::vector<Value> seen;
  for (;;) {
    const Valuation v(cells);
    const std::uint64_t n = completion_count(v, domains);
    if (n > opts.max_completions) {
      report.queries += outputs;
      report.skipped += outputs;
    } else {
      // Distinct outputs reachable from v.
      seen.clear();
      for (const Valuation& c : total_completions(v, domains)) {
        seen.push_back(s(c));
      }
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (std::size_t oi = 0; oi < outputs; ++oi) {
        const Value o = static_cast<Value>(oi);
        const OracleVerdict verdict = oracle.query(v, o);
        ++report.queries;
        ++report.verified;
        CompletionKinds kinds;
        kinds.any_equal = std::binary_search(seen.begin(), seen.end(), o);
        kinds.any_different =
            seen.size() > 1 || (seen.size() == 1 && seen.front() != o);
        if (auto err = judge(s, v, o, verdict, completeness, kinds)) {
          report.counterexample =
              Counterexample{v, o, verdict.answer, describe(v, o) + ": " + *err};
          return report;
        }
      }
    }
    std::size_t k = 0;
    for (; k < m; ++k) {
      if (static_cast<std::size_t>(cells[k] + 1) < domains[k].size()) {
        ++cells[k];
        break;
      }
      cells[k] = kUnknown;
    }
    if (k == m) break;
  }
  return report;
}

}  // namespace

std::optional<std::string> verify_verdict(const SymbolicFunction& s,
                                          const Valuation& v, Value o,
                                          const OracleVerdict& verdict,
                                          bool completeness,
                                          std::uint64_t max_completions,
                                          bool* skipped) {
  if (skipped) *skipped = false;
  check_valuation(v, s.domains());
  CompletionKinds kinds;
  if (needs_scan(verdict, completeness) || v.is_total()) {
    if (completion_count(v, s.domains()) > max_completions) {
      if (skipped) *skipped = true;
      return std::nullopt;
    }
    kinds = scan_completions(s, v, o);
  }
  return judge(s, v, o, verdict, completeness, kinds);
}

CheckReport check_validity(const Oracle& oracle, const SymbolicFunction& s,
                           std::uint64_t budget, std::uint64_t seed,
                           const CheckOptions& opts) {
  return sampled_check(oracle, s, budget, seed, opts, false);
}

CheckReport check_completeness(const Oracle& oracle, const SymbolicFunction& s,
                               std::uint64_t budget, std::uint64_t seed,
                               const CheckOptions& opts) {
  return sampled_check(oracle, s, budget, seed, opts, true);
}

CheckReport check_validity_exhaustive(const Oracle& oracle,
                                      const SymbolicFunction& s,
                                      const CheckOptions& opts) {
  return exhaustive_check(oracle, s, opts, false);
}

CheckReport check_completeness_exhaustive(const Oracle& oracle,
                                          const SymbolicFunction& s,
                                          const CheckOptions& opts) {
  return exhaustive_check(oracle, s, opts, true);
}

}  // namespace dpnl
