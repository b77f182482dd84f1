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

// Ground probabilistic Horn programs and the oracle they induce.
//
// A program is a set of deterministic rules R, m probabilistic rules
// p_k :: r_k and a query atom q. Variable k of the induced instance is
// Bernoulli(p_k) and decides whether r_k is part of the theory; the symbolic
// function is S(x) = 1 iff R + {r_k : x_k = 1} entails q.

#ifndef DPNL_LOGIC_HPP_
#define DPNL_LOGIC_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dpnl/core.hpp"
#include "dpnl/oracle.hpp"

namespace dpnl {

using AtomId = std::uint32_t;

class AtomTable {
 public:
  AtomId intern(const std::string& name);
  std::optional<AtomId> find(const std::string& name) const;
  const std::string& name(AtomId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, AtomId> ids_;
};

struct HornRule {
  AtomId head = 0;
  std::vector<AtomId> body;

  bool operator==(const HornRule&) const = default;
};

struct ProbabilisticRule {
  HornRule rule;
  double probability = 0.0;
};

struct HornProgram {
  AtomTable atoms;
  std::vector<HornRule> rules;
  std::vector<ProbabilisticRule> probabilistic;
  AtomId query = 0;

  std::size_t m() const { return probabilistic.size(); }
  // Throws InvalidInstance on atom ids outside the table or probabilities
  // outside [0,1].
  void validate() const;
};

// Program text: `atom.`, `head :- b1, ..., bn.`, `0.85 :: atom.` (optionally
// with a body), `query(atom).`, and `%` line comments. Atoms are `name` or
// `name(c1,...,ck)` with lowercase or numeric constants.
HornProgram parse_program(std::istream& in);
HornProgram parse_program(std::string_view text);

// Inverse of parse_program up to whitespace and comments.
std::string format_program(const HornProgram& prog);

// Forward chaining to fixpoint. Atoms outside [0, num_atoms) are never
// derived.
bool entails(std::span<const HornRule> rules, std::size_t num_atoms, AtomId q);

// Rule set compiled once for repeated fixpoints in which each probabilistic
// rule is switched on, off, or on only optimistically.
class HornEngine {
 public:
  explicit HornEngine(const HornProgram& prog);

  std::size_t m() const { return num_optional_; }

  struct Outcome {
    Answer answer = Answer::False;  // for the query holding (o = 1)
    // Optional rules with an unknown switch used by the optimistic proof,
    // set only when answer is Unknown.
    std::vector<std::size_t> support;
  };

  // True when the committed rules (switch 1) entail q, Unknown when q needs
  // some unknown switch, False when even every unknown switched on does not
  // help.
  Outcome evaluate(const Valuation& v, bool want_support) const;
  bool proves(const Valuation& v) const;

 private:
  struct CompiledRule {
    AtomId head;
    std::uint32_t body_size;
    std::int64_t optional_index;  // -1 for deterministic rules
  };

  std::size_t num_atoms_;
  std::size_t num_optional_;
  AtomId query_;
  std::vector<CompiledRule> rules_;
  std::vector<std::vector<AtomId>> bodies_;
  // watchers_[a]: rules with atom a in their (deduplicated) body
  std::vector<std::vector<std::uint32_t>> watchers_;
};

// Logic oracle for S. Witnesses accompany every unknown verdict: the
// optimistic proof with its unknown switches on and all other unknowns off,
// and the valuation with every unknown switched off.
class LogicOracle {
 public:
  explicit LogicOracle(const HornProgram& prog, bool with_witnesses = true);

  std::size_t m() const { return engine_->m(); }
  OracleVerdict query(const Valuation& v, Value o) const;

 private:
  std::shared_ptr<const HornEngine> engine_;
  bool with_witnesses_;
};

Oracle logic_oracle(const HornProgram& prog, bool with_witnesses = true);
SymbolicFunction logic_function(const HornProgram& prog);
// m Bernoulli(p_k) variables with output domain {0,1}.
Instance logic_instance(const HornProgram& prog);

// Success probability by enumerating all 2^m switch settings.
double problog_bruteforce(const HornProgram& prog, std::size_t max_facts = 24);

// ---------------------------------------------------------------------------
// Decidable theories
// ---------------------------------------------------------------------------

// Decision procedure for an axiom set A over hypotheses phi_1..phi_m. The
// valuation asserts phi_k for 1, its negation for 0 and omits it when
// unknown.
class TheoryBackend {
 public:
  virtual ~TheoryBackend() = default;
  virtual std::size_t num_hypotheses() const = 0;
  virtual bool proves_query(const Valuation& hyps) const = 0;
  virtual bool refutes_query(const Valuation& hyps) const = 0;
};

// Horn programs as a theory. Negative hypotheses carry no information in
// Horn logic, so the query is refuted only once every hypothesis is decided
// and the query is not provable.
class HornTheory : public TheoryBackend {
 public:
  explicit HornTheory(const HornProgram& prog) : engine_(prog) {}
  std::size_t num_hypotheses() const override { return engine_.m(); }
  bool proves_query(const Valuation& hyps) const override;
  bool refutes_query(const Valuation& hyps) const override;

 private:
  HornEngine engine_;
};

// 0 when A refutes the query, 1 when it proves it, unknown otherwise; the
// decided answers are inverted for o = 0.
Oracle theory_oracle(std::shared_ptr<const TheoryBackend> theory);

// ---------------------------------------------------------------------------
// Graph reachability
// ---------------------------------------------------------------------------

// Reachability of e_n from e_1 over n nodes. One probabilistic fact
// g(ei,ej) per edge, taken from edge_probs[i][j]; rule instances
// r(ej) :- r(ei), g(ei,ej); fact r(e1); query r(en). Self-loops are left out
// unless requested.
HornProgram reachability_program(std::size_t n,
                                 const std::vector<std::vector<double>>& edge_probs,
                                 bool self_loops = false);
HornProgram reachability_program(std::size_t n, double edge_prob,
                                 bool self_loops = false);

// Number of simple e_1 -> e_n paths in the complete graph on n nodes,
// sum_{i=0}^{n-2} C(n-2, i) i!. Throws Error on 64-bit overflow.
std::uint64_t provenance_clause_count(std::size_t n);

// ---------------------------------------------------------------------------
// Annotated disjunctions
// ---------------------------------------------------------------------------

class DegeneratePrefix : public Error {
 public:
  using Error::Error;
};

// Switch probabilities p~_i = p_i / (1 - sum_{j<i} p_j), and 0 where p_i = 0.
std::vector<double> ad_transform(std::span<const double> p);
std::vector<double> ad_recover(std::span<const double> p_tilde);

}  // namespace dpnl

#endif  // DPNL_LOGIC_HPP_
