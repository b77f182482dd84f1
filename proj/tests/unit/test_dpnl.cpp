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

#include <numeric>

#include <catch_amalgamated.hpp>

#include "dpnl/dpnl.hpp"
#include "dpnl/sumtask.hpp"
#include "reference.hpp"

using namespace dpnl;
using Catch::Matchers::WithinAbs;

namespace {

constexpr Value U = kUnknown;

std::vector<std::size_t> iota(std::size_t m) {
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

}  // namespace

TEST_CASE("sum N=1 fixed values", "[dpnl]") {
  const SumTask t = build_sum_instance(SumInstanceSpec::uniform(1));
  CHECK_THAT(dpnl::dpnl(t.instance, 4, t.oracle, t.order).probability,
             WithinAbs(0.05, 1e-12));
  const auto dist = output_distribution(t.instance, t.oracle, t.order);
  CHECK_THAT(dist.probs[0], WithinAbs(0.01, 1e-12));
  CHECK_THAT(dist.probs[9], WithinAbs(0.10, 1e-12));
  CHECK_THAT(dist.probs[18], WithinAbs(0.01, 1e-12));
  CHECK_THAT(dpnl::dpnl(t.instance, 8, t.oracle, t.order, Valuation({3, 5})).probability,
             WithinAbs(1.0, 1e-15));
}

TEST_CASE("conditional queries do not multiply in the prior of v", "[dpnl]") {
  ref::Rng rng(41);
  SumInstanceSpec spec = ref::random_sum_spec(rng, 1, 0.0);
  const SumTask t = build_sum_instance(spec);
  const double got =
      dpnl::dpnl(t.instance, 8, t.oracle, t.order, Valuation({3, U})).probability;
  CHECK_THAT(got, WithinAbs(spec.digit_dists[1][5], 1e-15));
}

TEST_CASE("point masses decide the sum", "[dpnl]") {
  SumInstanceSpec spec;
  spec.n = 1;
  spec.digit_dists = {DiscreteDistribution::point_mass(10, 3),
                      DiscreteDistribution::point_mass(10, 5)};
  const SumTask t = build_sum_instance(spec);
  const auto dist = output_distribution(t.instance, t.oracle, t.order);
  for (std::size_t o = 0; o < dist.probs.size(); ++o) {
    CHECK(dist.probs[o] == (o == 8 ? 1.0 : 0.0));
  }
}

TEST_CASE("brute-force enumeration edge cases", "[dpnl]") {
  const Instance inst({Domain(4)}, {DiscreteDistribution({0.1, 0.2, 0.3, 0.4})},
                      Domain(6));
  const SymbolicFunction id({Domain(4)}, Domain(6),
                            [](std::span<const Value> x) { return x[0]; });
  CHECK_THAT(bruteforce_eq3(inst, id, 2), WithinAbs(0.3, 1e-15));
  CHECK(bruteforce_eq3(inst, id, 5) == 0.0);
  CHECK_THROWS_AS(bruteforce_eq3(inst, id, 2, 3), SizeLimitExceeded);
}

TEST_CASE("property: dpnl equals enumeration for every oracle and order",
          "[dpnl][property]") {
  ref::Rng rng(42);
  for (int iter = 0; iter < 60; ++iter) {
    const auto t = ref::random_table_instance(rng, 5, 4);
    const Instance inst = t.instance();
    const SymbolicFunction s = t.function();
    const Oracle naive = naive_oracle(s);
    const Oracle full = exhaustive_oracle(s);
    const std::size_t m = t.sizes.size();
    const std::vector<VariableOrder> orders{
        VariableOrder::identity(m), VariableOrder::reversed(m),
        VariableOrder::witness_guided(iota(m))};
    std::vector<std::vector<double>> w;
    for (std::size_t k = 0; k < m; ++k) {
      w.emplace_back(inst.dist(k).probs().begin(), inst.dist(k).probs().end());
    }
    double total = 0.0;
    for (Value o = 0; o < static_cast<Value>(t.outputs); ++o) {
      const double expected = ref::enumerate_probability(
          t.sizes, w, [&](std::span<const Value> x) { return t.eval(x); }, o);
      CHECK_THAT(bruteforce_eq3(inst, s, o), WithinAbs(expected, 1e-12));
      const double first = dpnl::dpnl(inst, o, naive, orders[0]).probability;
      for (const auto& order : orders) {
        for (const Oracle* oracle : {&naive, &full}) {
          const double got = dpnl::dpnl(inst, o, *oracle, order).probability;
          CHECK_THAT(got, WithinAbs(expected, 1e-10));
          CHECK_THAT(got, WithinAbs(first, 1e-12));
        }
      }
      const auto with_naive = dpnl::dpnl(inst, o, naive, orders[0]);
      const auto with_full = dpnl::dpnl(inst, o, full, orders[0]);
      CHECK(with_full.stats.branch_nodes <= with_naive.stats.branch_nodes);
      CHECK(with_full.stats.leaves_true + with_full.stats.leaves_false <=
            with_full.stats.oracle_calls);
      total += expected;
    }
    const auto dist = output_distribution(inst, full, orders[2]);
    CHECK_THAT(std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0),
               WithinAbs(1.0, 1e-9));
    CHECK_THAT(total, WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("property: skip-zero returns the same value", "[dpnl][property]") {
  ref::Rng rng(43);
  for (int iter = 0; iter < 60; ++iter) {
    const auto t = ref::random_table_instance(rng, 5, 4);
    const Instance inst = t.instance();
    const Oracle full = exhaustive_oracle(t.function());
    const auto order = VariableOrder::identity(t.sizes.size());
    for (Value o = 0; o < static_cast<Value>(t.outputs); ++o) {
      const auto plain = dpnl::dpnl(inst, o, full, order);
      const auto skip = dpnl::dpnl(inst, o, full, order, DpnlOptions{true});
      CHECK_THAT(skip.probability, WithinAbs(plain.probability, 1e-12));
      CHECK(skip.stats.oracle_calls <= plain.stats.oracle_calls);
    }
  }
}

TEST_CASE("witness order picks a position where the witnesses differ", "[dpnl]") {
  const auto order = VariableOrder::witness_guided({0, 1, 2});
  OracleVerdict verdict = OracleVerdict::unknown();
  verdict.witness_true = Valuation({1, 4, 2});
  verdict.witness_false = Valuation({1, 4, 3});
  CHECK(order.choose(Valuation({U, U, U}), verdict) == 2);
  CHECK(order.choose(Valuation({U, U, U}), OracleVerdict::unknown()) == 0);
  CHECK(VariableOrder::witness_guided({2, 0, 1})
            .choose(Valuation({U, U, U}), OracleVerdict::unknown()) == 2);
}

TEST_CASE("orders validate their input", "[dpnl]") {
  CHECK_THROWS_AS(VariableOrder::sequential({0, 0}), OrderError);
  CHECK_THROWS_AS(VariableOrder::custom({}), OrderError);
  const auto bad = VariableOrder::custom(
      [](const Valuation&, const OracleVerdict&) { return std::size_t{0}; });
  CHECK_THROWS_AS(bad.choose(Valuation({1, U}), OracleVerdict::unknown()),
                  OrderError);
  // An oracle answering unknown on a total valuation leaves nothing to pick.
  CHECK_THROWS_AS(VariableOrder::identity(2).choose(Valuation({1, 1}),
                                                    OracleVerdict::unknown()),
                  OrderError);
}

TEST_CASE("query validation", "[dpnl]") {
  const SumTask t = build_sum_instance(SumInstanceSpec::uniform(1));
  CHECK_THROWS_AS(dpnl::dpnl(t.instance, 20, t.oracle, t.order), InvalidInstance);
  CHECK_THROWS_AS(dpnl::dpnl(t.instance, 1, t.oracle, t.order, Valuation({11, U})),
                  InvalidInstance);
}

TEST_CASE("witness order on sum N=2 uses no more nodes than reversed order",
          "[dpnl]") {
  ref::Rng rng(44);
  const SumInstanceSpec spec = ref::random_sum_spec(rng, 2, 0.0);
  const SumTask t = build_sum_instance(spec);
  const Oracle full = exhaustive_oracle(t.function);
  std::uint64_t witness = 0, reversed = 0;
  for (Value o : {0, 63, 99, 150}) {
    const auto a = dpnl::dpnl(t.instance, o, full, VariableOrder::witness_guided(iota(4)));
    const auto b = dpnl::dpnl(t.instance, o, full, VariableOrder::reversed(4));
    CHECK_THAT(a.probability, WithinAbs(b.probability, 1e-12));
    witness += a.stats.branch_nodes;
    reversed += b.stats.branch_nodes;
  }
  CHECK(witness <= reversed);
}

TEST_CASE("gradient of P(sum = 0)", "[dpnl][gradient]") {
  ref::Rng rng(45);
  const SumInstanceSpec spec = ref::random_sum_spec(rng, 1, 0.0);
  const SumTask t = build_sum_instance(spec);
  const auto g = dpnl_gradient(t.instance, 0, t.oracle, t.order);
  CHECK_THAT(g.value, WithinAbs(spec.digit_dists[0][0] * spec.digit_dists[1][0],
                                1e-15));
  CHECK_THAT(g.partials[0][0], WithinAbs(spec.digit_dists[1][0], 1e-15));
  CHECK_THAT(g.partials[1][0], WithinAbs(spec.digit_dists[0][0], 1e-15));
  for (std::size_t x = 1; x < 10; ++x) CHECK(g.partials[0][x] == 0.0);
}

TEST_CASE("property: gradients match finite differences", "[dpnl][gradient][property]") {
  ref::Rng rng(46);
  for (int iter = 0; iter < 30; ++iter) {
    const auto t = ref::random_table_instance(rng, 4, 4);
    const Instance inst = t.instance();
    const Oracle full = exhaustive_oracle(t.function());
    const Value o = static_cast<Value>(ref::pick(rng, 0, t.outputs - 1));
    const auto order = iter % 2 ? VariableOrder::identity(t.sizes.size())
                                : VariableOrder::witness_guided(iota(t.sizes.size()));
    const auto g = dpnl_gradient(inst, o, full, order);
    CHECK(g.value == dpnl::dpnl(inst, o, full, order).probability);
    CHECK(g.value >= 0.0);
    CHECK(g.value <= 1.0);
    std::vector<std::vector<double>> w;
    for (std::size_t k = 0; k < t.sizes.size(); ++k) {
      w.emplace_back(inst.dist(k).probs().begin(), inst.dist(k).probs().end());
    }
    auto eval = [&](std::span<const Value> x) { return t.eval(x); };
    const auto fd = ref::finite_differences(
        w, [&](const auto& ww) { return ref::enumerate_probability(t.sizes, ww, eval, o); },
        1e-6);
    for (std::size_t k = 0; k < w.size(); ++k) {
      double recon = 0.0;
      for (std::size_t x = 0; x < w[k].size(); ++x) {
        CHECK(ref::rel_err(g.partials[k][x], fd[k][x]) <= 1e-6);
        recon += w[k][x] * g.partials[k][x];
      }
      CHECK_THAT(recon, WithinAbs(g.value, 1e-9));
    }
  }
}

TEST_CASE("search-tree checker on the sum task", "[dpnl]") {
  const SumTask t = build_sum_instance(SumInstanceSpec::uniform(1));
  const Oracle erased = t.erased_oracle();
  for (Value o = 0; o < 19; ++o) {
    const CheckReport r = check_oracle_on_search_tree(
        t.instance, exhaustive_oracle(t.function), t.function, t.order, o);
    CHECK(r.passed());
  }
  // The naive oracle is valid but leaves undecided nodes it could close.
  const CheckReport naive = check_oracle_on_search_tree(
      t.instance, naive_oracle(t.function), t.function, t.order, 3);
  CHECK_FALSE(naive.passed());
  CHECK(erased.name().size() > 0);
}
