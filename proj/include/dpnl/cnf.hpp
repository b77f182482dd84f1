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

// Propositional CNF formulas with conditioning, the DPLL-style probabilistic
// weighted model counter, a definitional brute-force counter and DIMACS
// ingestion.

#ifndef DPNL_CNF_HPP_
#define DPNL_CNF_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dpnl/core.hpp"

namespace dpnl {

struct Literal {
  std::uint32_t var = 0;  // 0-based
  bool positive = true;

  Literal negated() const { return {var, !positive}; }
  // 1-based signed DIMACS encoding.
  int to_dimacs() const {
    const int v = static_cast<int>(var) + 1;
    return positive ? v : -v;
  }
  static Literal from_dimacs(int lit) {
    return lit > 0 ? Literal{static_cast<std::uint32_t>(lit - 1), true}
                   : Literal{static_cast<std::uint32_t>(-lit - 1), false};
  }

  auto operator<=>(const Literal&) const = default;
};

inline Literal pos(std::uint32_t var) { return {var, true}; }
inline Literal neg(std::uint32_t var) { return {var, false}; }

using Clause = std::vector<Literal>;

// Conjunction of clauses over variables 0..num_vars-1. Tautological clauses
// are dropped and duplicate literals merged at construction. Clause storage
// is shared between a formula and the formulas conditioned from it.
class CnfFormula {
 public:
  CnfFormula(std::size_t num_vars, std::vector<Clause> clauses);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  bool has_no_clauses() const { return clauses_.empty(); }
  bool has_empty_clause() const { return has_empty_clause_; }
  std::span<const Literal> clause(std::size_t i) const { return *clauses_[i]; }

  bool occurs(std::uint32_t var) const;
  // Occurrences of `var` (either sign) in each variable of the formula.
  std::vector<std::size_t> occurrence_counts() const;

  // G|X=b: clauses satisfied by the assignment are removed and the falsified
  // literal is deleted from the others. Throws InvalidInstance if var is out
  // of range.
  CnfFormula condition(std::uint32_t var, bool value) const;

  // Truth value under a total assignment given as a bit mask (bit i = X_i).
  bool evaluate(std::uint64_t assignment) const;

 private:
  CnfFormula() = default;

  std::size_t num_vars_ = 0;
  std::vector<std::shared_ptr<const Clause>> clauses_;
  bool has_empty_clause_ = false;
};

inline CnfFormula condition(const CnfFormula& g, std::uint32_t var,
                            bool value) {
  return g.condition(var, value);
}

// sigma: probability that each variable is true.
class WeightMap {
 public:
  explicit WeightMap(std::vector<double> probs);
  static WeightMap uniform(std::size_t num_vars) {
    return WeightMap(std::vector<double>(num_vars, 0.5));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t var) const { return probs_[var]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

enum class BranchRule {
  // Variable with the most occurrences in the remaining clauses; ties go to
  // the lowest index.
  kMostOccurrences,
  // Lowest-index variable still occurring.
  kFixedOrder,
};

struct ProbDpllStats {
  std::uint64_t calls = 0;
  std::uint64_t branch_nodes = 0;
};

// PWMC of `g` under `sigma` by plain DPLL recursion (no unit propagation,
// no pure literals, no caching).
double probdpll(const CnfFormula& g, const WeightMap& sigma,
                BranchRule rule = BranchRule::kMostOccurrences,
                ProbDpllStats* stats = nullptr);

// Definitional sum of model weights over all 2^n assignments. Throws
// SizeLimitExceeded above max_vars (at most 24 by default).
double pwmc_bruteforce(const CnfFormula& g, const WeightMap& sigma,
                       std::size_t max_vars = 24);

// Probability of a DNF (disjunction of conjunctive terms): negate into CNF,
// count, return the complement.
using DnfTerm = std::vector<Literal>;
double prob_of_dnf(std::size_t num_vars, std::span<const DnfTerm> terms,
                   const WeightMap& sigma,
                   BranchRule rule = BranchRule::kMostOccurrences);

// ---------------------------------------------------------------------------
// DIMACS

struct DimacsProblem {
  CnfFormula formula;
  // Present when the input carried at least one `w <var> <prob>` line;
  // unlisted variables get 0.5.
  std::optional<WeightMap> weights;

  WeightMap weights_or_uniform() const {
    return weights ? *weights : WeightMap::uniform(formula.num_vars());
  }
};

DimacsProblem parse_dimacs(std::istream& in);
DimacsProblem parse_dimacs(std::string_view text);

// Standalone weight file: `w <var> <prob>` lines (the leading `w` may be
// omitted), `c` comments. Unlisted variables get 0.5.
WeightMap parse_weights(std::istream& in, std::size_t num_vars);

}  // namespace dpnl

#endif  // DPNL_CNF_HPP_
