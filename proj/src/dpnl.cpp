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

#include "dpnl/dpnl.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dpnl {

// ---------------------------------------------------------------------------
// VariableOrder

namespace {

void require_permutation(const std::vector<std::size_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t k : perm) {
    if (k >= perm.size() || seen[k]) {
      throw OrderError("variable order is not a permutation of 0.." +
                       std::to_string(perm.size()) + "-1");
    }
    seen[k] = true;
  }
}

}  // namespace

VariableOrder::VariableOrder(Kind kind, std::vector<std::size_t> perm,
                             Chooser chooser)
    : kind_(kind), perm_(std::move(perm)), chooser_(std::move(chooser)) {}

VariableOrder VariableOrder::sequential(std::vector<std::size_t> permutation) {
  require_permutation(permutation);
  return VariableOrder(Kind::kSequential, std::move(permutation), {});
}

VariableOrder VariableOrder::identity(std::size_t m) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  return sequential(std::move(perm));
}

VariableOrder VariableOrder::reversed(std::size_t m) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.rbegin(), perm.rend(), std::size_t{0});
  return sequential(std::move(perm));
}

VariableOrder VariableOrder::witness_guided(std::vector<std::size_t> fallback) {
  require_permutation(fallback);
  return VariableOrder(Kind::kWitnessGuided, std::move(fallback), {});
}

VariableOrder VariableOrder::custom(Chooser chooser) {
  if (!chooser) throw OrderError("custom order without a chooser");
  return VariableOrder(Kind::kCustom, {}, std::move(chooser));
}

std::size_t VariableOrder::first_unknown(const Valuation& v) const {
  for (std::size_t k : perm_) {
    if (v.is_unknown(k)) return k;
  }
  throw OrderError("no unknown variable left to branch on (oracle answered "
                   "unknown on a total valuation)");
}

std::size_t VariableOrder::choose(const Valuation& v,
                                  const OracleVerdict& verdict) const {
  switch (kind_) {
    case Kind::kSequential:
      return first_unknown(v);
    case Kind::kWitnessGuided: {
      if (verdict.has_witnesses()) {
        const Valuation& w1 = *verdict.witness_true;
        const Valuation& w0 = *verdict.witness_false;
        for (std::size_t k : perm_) {
          if (v.is_unknown(k) && k < w1.size() && k < w0.size() &&
              w1[k] != w0[k]) {
            return k;
          }
        }
      }
      return first_unknown(v);
    }
    case Kind::kCustom: {
      const std::size_t k = chooser_(v, verdict);
      if (k >= v.size()) {
        throw OrderError("custom order chose index " + std::to_string(k) +
                         " of a valuation of size " + std::to_string(v.size()));
      }
      if (!v.is_unknown(k)) {
        throw OrderError("custom order chose assigned index " +
                         std::to_string(k));
      }
      return k;
    }
  }
  throw OrderError("unreachable");
}

namespace detail {

void check_query(const Instance& inst, Value o, const Valuation& start,
                 const VariableOrder& order) {
  check_valuation(start, inst.domains());
  if (!inst.output_domain().contains(o)) {
    throw InvalidInstance("output " + std::to_string(o) +
                          " outside the output domain");
  }
  if (order.kind() != VariableOrder::Kind::kCustom &&
      order.permutation().size() != inst.m()) {
    throw OrderError("variable order covers " +
                     std::to_string(order.permutation().size()) +
                     " variables, instance has " + std::to_string(inst.m()));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Brute force

double bruteforce_eq3(std::span<const std::vector<double>> weights,
                      const SymbolicFunction& s, Value o,
                      std::uint64_t limit) {
  const auto domains = s.domains();
  if (weights.size() != domains.size()) {
    throw InvalidInstance("weight tables do not match the function arity");
  }
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < domains.size(); ++k) {
    if (weights[k].size() != domains[k].size()) {
      throw InvalidInstance("weight table " + std::to_string(k) +
                            " does not match its domain");
    }
    if (total > limit / domains[k].size()) {
      throw SizeLimitExceeded("brute-force enumeration exceeds " +
                              std::to_string(limit) + " valuations");
    }
    total *= domains[k].size();
  }

  const std::size_t m = domains.size();
  std::vector<Value> x(m, 0);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (s(std::span<const Value>(x)) == o) {
      double w = 1.0;
      for (std::size_t k = 0; k < m; ++k) w *= weights[k][x[k]];
      sum += w;
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (static_cast<std::size_t>(++x[k]) < domains[k].size()) break;
      x[k] = 0;
    }
  }
  return sum;
}

double bruteforce_eq3(const Instance& inst, const SymbolicFunction& s, Value o,
                      std::uint64_t limit) {
  std::vector<std::vector<double>> weights;
  weights.reserve(inst.m());
  for (const DiscreteDistribution& d : inst.dists()) {
    weights.emplace_back(d.probs().begin(), d.probs().end());
  }
  return bruteforce_eq3(weights, s, o, limit);
}

// ---------------------------------------------------------------------------
// Search-tree oracle check

namespace {

class TreeChecker {
 public:
  TreeChecker(const Instance& inst, const Oracle& oracle,
              const SymbolicFunction& s, const VariableOrder& order, Value o,
              const CheckOptions& opts)
      : inst_(inst), oracle_(oracle), s_(s), order_(order), o_(o), opts_(opts) {}

  CheckReport run() {
    Valuation v = fresh_valuation(inst_.m());
    visit(v);
    return report_;
  }

 private:
  bool visit(Valuation& v) {
    const OracleVerdict verdict = oracle_.query(v, o_);
    ++report_.queries;
    for (bool completeness : {false, true}) {
      bool skipped = false;
      auto err = verify_verdict(s_, v, o_, verdict, completeness,
                                opts_.max_completions, &skipped);
      if (skipped) {
        ++report_.skipped;
        break;
      }
      if (err) {
        std::ostringstream os;
        os << "v=" << v << " o=" << o_ << ": " << *err;
        report_.counterexample =
            Counterexample{v, o_, verdict.answer, os.str()};
        return false;
      }
    }
    ++report_.verified;
    if (!verdict.is_unknown()) return true;
    const std::size_t k = order_.choose(v, verdict);
    for (std::size_t y = 0; y < inst_.domain(k).size(); ++y) {
      v.assign(k, static_cast<Value>(y));
      if (!visit(v)) return false;
    }
    v.clear(k);
    return true;
  }

  const Instance& inst_;
  const Oracle& oracle_;
  const SymbolicFunction& s_;
  const VariableOrder& order_;
  Value o_;
  CheckOptions opts_;
  CheckReport report_;
};

}  // namespace

CheckReport check_oracle_on_search_tree(const Instance& inst,
                                        const Oracle& oracle,
                                        const SymbolicFunction& s,
                                        const VariableOrder& order, Value o,
                                        const CheckOptions& opts) {
  detail::check_query(inst, o, fresh_valuation(inst.m()), order);
  return TreeChecker(inst, oracle, s, order, o, opts).run();
}

}  // namespace dpnl
