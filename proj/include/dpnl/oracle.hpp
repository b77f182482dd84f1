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

// Oracles: three-valued answers to "do all total completions of this
// valuation map to this output, none of them, or is it undecided?".
//
// An oracle is valid when a 1 (resp. 0) answer is only given if every
// completion maps (resp. no completion maps) to the output, and total
// valuations are always decided. It is complete when it also answers
// "unknown" only when both kinds of completion exist.

#ifndef DPNL_ORACLE_HPP_
#define DPNL_ORACLE_HPP_

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpnl/core.hpp"

namespace dpnl {

// A total function S : V_1 x ... x V_m -> O.
class SymbolicFunction {
 public:
  using Eval = std::function<Value(std::span<const Value>)>;

  SymbolicFunction(std::vector<Domain> domains, Domain output_domain,
                   Eval eval);

  std::size_t arity() const { return domains_.size(); }
  std::span<const Domain> domains() const { return domains_; }
  const Domain& output_domain() const { return output_domain_; }

  // Evaluate on a total valuation. Throws InvalidInstance on a partial
  // valuation or when the result falls outside the output domain.
  Value operator()(const Valuation& v) const;
  Value operator()(std::span<const Value> args) const;

 private:
  std::vector<Domain> domains_;
  Domain output_domain_;
  Eval eval_;
};

template <class O>
concept OracleLike = requires(const O& o, const Valuation& v, Value out) {
  { o.query(v, out) } -> std::convertible_to<OracleVerdict>;
};

// Type-erased oracle. Implementations must be pure and safe to call
// concurrently.
class Oracle {
 public:
  using Query = std::function<OracleVerdict(const Valuation&, Value)>;

  Oracle(Query query, bool claims_complete, std::string name)
      : query_(std::move(query)),
        claims_complete_(claims_complete),
        name_(std::move(name)) {}

  template <OracleLike O>
    requires(!std::same_as<std::remove_cvref_t<O>, Oracle>)
  Oracle(O impl, bool claims_complete, std::string name)
      : Oracle(
            [impl = std::move(impl)](const Valuation& v, Value o) {
              return OracleVerdict(impl.query(v, o));
            },
            claims_complete, std::move(name)) {}

  OracleVerdict query(const Valuation& v, Value o) const {
    return query_(v, o);
  }
  OracleVerdict operator()(const Valuation& v, Value o) const {
    return query_(v, o);
  }

  bool claims_complete() const { return claims_complete_; }
  const std::string& name() const { return name_; }

 private:
  Query query_;
  bool claims_complete_;
  std::string name_;
};

inline constexpr std::uint64_t kDefaultCompletionLimit = 1'000'000;

// Unknown on every partial valuation; on a total valuation, 1 iff S(v) = o.
Oracle naive_oracle(SymbolicFunction s);

// Enumerates tot(v). Complete; unknown verdicts carry one witness of each
// kind. Throws SizeLimitExceeded when a query has more than max_completions
// completions.
Oracle exhaustive_oracle(SymbolicFunction s,
                         std::uint64_t max_completions = kDefaultCompletionLimit);

// ---------------------------------------------------------------------------
// Property checkers

struct Counterexample {
  Valuation valuation;
  Value output = 0;
  Answer answer = Answer::Unknown;
  std::string reason;
};

struct CheckReport {
  std::uint64_t queries = 0;
  // Queries whose claim was verified by enumeration.
  std::uint64_t verified = 0;
  // Queries skipped because tot(v) exceeded the completion limit.
  std::uint64_t skipped = 0;
  std::optional<Counterexample> counterexample;

  bool passed() const { return !counterexample.has_value(); }
};

struct CheckOptions {
  std::uint64_t max_completions = kDefaultCompletionLimit;
};

// Random partial valuations and outputs; every decided answer (and every
// witness attached to an answer) is verified against S by enumerating tot(v).
CheckReport check_validity(const Oracle& oracle, const SymbolicFunction& s,
                           std::uint64_t budget, std::uint64_t seed,
                           const CheckOptions& opts = {});

// Random partial valuations and outputs; every unknown answer is verified to
// have completions of both kinds.
CheckReport check_completeness(const Oracle& oracle, const SymbolicFunction& s,
                               std::uint64_t budget, std::uint64_t seed,
                               const CheckOptions& opts = {});

// Same checks over every valuation in prod(|V_k| + 1) and every output.
CheckReport check_validity_exhaustive(const Oracle& oracle,
                                      const SymbolicFunction& s,
                                      const CheckOptions& opts = {});
CheckReport check_completeness_exhaustive(const Oracle& oracle,
                                          const SymbolicFunction& s,
                                          const CheckOptions& opts = {});

// Checks a single (valuation, output, verdict) triple against S. Returns the
// violation, if any. `completeness` selects the unknown-answer check.
std::optional<std::string> verify_verdict(const SymbolicFunction& s,
                                          const Valuation& v, Value o,
                                          const OracleVerdict& verdict,
                                          bool completeness,
                                          std::uint64_t max_completions,
                                          bool* skipped = nullptr);

}  // namespace dpnl

#endif  // DPNL_ORACLE_HPP_
