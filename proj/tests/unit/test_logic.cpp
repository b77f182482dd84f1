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

#include <catch_amalgamated.hpp>

#include "dpnl/dpnl.hpp"
#include "dpnl/logic.hpp"
#include "reference.hpp"

using namespace dpnl;
using Catch::Matchers::WithinAbs;

namespace {

constexpr Value U = kUnknown;

std::vector<std::size_t> iota(std::size_t m) {
  std::vector<std::size_t> p(m);
  for (std::size_t i = 0; i < m; ++i) p[i] = i;
  return p;
}

// Index of probabilistic fact g(ei,ej) in a loop-free reachability program.
std::size_t edge_index(const HornProgram& prog, const std::string& name) {
  const AtomId id = *prog.atoms.find(name);
  for (std::size_t k = 0; k < prog.m(); ++k) {
    if (prog.probabilistic[k].rule.head == id) return k;
  }
  throw std::logic_error("no such edge");
}

}  // namespace

TEST_CASE("parse a small program", "[logic]") {
  const HornProgram p = parse_program(
      "% comment\n"
      "a.\n"
      "b :- a, c(x,1).\n"
      "0.85 :: c(x,1).\n"
      "0.5 :: d :- b.\n"
      "query(d).\n");
  CHECK(p.rules.size() == 2);
  REQUIRE(p.m() == 2);
  CHECK_THAT(p.probabilistic[0].probability, WithinAbs(0.85, 1e-15));
  CHECK(p.probabilistic[1].rule.body.size() == 1);
  CHECK(p.atoms.name(p.query) == "d");
  CHECK(p.atoms.find("c(x,1)").has_value());
}

TEST_CASE("format and parse round trip", "[logic]") {
  ref::Rng rng(71);
  for (int iter = 0; iter < 50; ++iter) {
    const HornProgram p = ref::random_program(rng, 6);
    const HornProgram q = parse_program(format_program(p));
    REQUIRE(q.m() == p.m());
    CHECK(q.rules.size() == p.rules.size());
    CHECK_THAT(problog_bruteforce(q), WithinAbs(problog_bruteforce(p), 1e-15));
  }
}

TEST_CASE("parser rejects non-ground and unsupported input", "[logic]") {
  CHECK_THROWS_AS(parse_program("p(X) :- q(X).\nquery(p(a)).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("p(_x).\nquery(p(a)).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("p :- \\+ q.\nquery(p).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("p :- not(q).\nquery(p).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("p(f(a)).\nquery(p(f(a))).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("a.\n"), ParseError);
  CHECK_THROWS_AS(parse_program("a.\nquery(a).\nquery(a).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("1.5 :: a.\nquery(a).\n"), ParseError);
  CHECK_THROWS_AS(parse_program("a\nquery(a).\n"), ParseError);
  try {
    parse_program("a.\nb :- A.\nquery(b).\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("ground") != std::string::npos);
  }
}

TEST_CASE("entailment", "[logic]") {
  AtomTable t;
  const AtomId a = t.intern("a"), b = t.intern("b");
  const std::vector<HornRule> chain{{a, {}}, {b, {a}}};
  CHECK(entails(chain, t.size(), b));
  const std::vector<HornRule> no_facts{{b, {a}}};
  CHECK_FALSE(entails(no_facts, t.size(), b));
  CHECK_FALSE(entails(chain, t.size(), 99));

  const HornProgram k4 = reachability_program(4, 1.0);
  std::vector<HornRule> all = k4.rules;
  for (const auto& pr : k4.probabilistic) all.push_back(pr.rule);
  CHECK(entails(all, k4.atoms.size(), k4.query));
}

TEST_CASE("property: entailment matches a naive fixpoint", "[logic][property]") {
  ref::Rng rng(72);
  for (int iter = 0; iter < 500; ++iter) {
    const HornProgram p = ref::random_program(rng, 8);
    std::vector<HornRule> rules = p.rules;
    for (const auto& pr : p.probabilistic) {
      if (ref::uniform01(rng) < 0.6) rules.push_back(pr.rule);
    }
    for (AtomId q = 0; q < p.atoms.size(); ++q) {
      CHECK(entails(rules, p.atoms.size(), q) ==
            ref::naive_entails(rules, p.atoms.size(), q));
    }
  }
}

TEST_CASE("logic oracle fixed verdicts", "[logic]") {
  const HornProgram k4 = reachability_program(4, 0.5);
  const LogicOracle o(k4);
  const std::size_t m = k4.m();
  CHECK(o.query(Valuation(std::vector<Value>(m, 1)), 1).answer == Answer::True);
  CHECK(o.query(Valuation(std::vector<Value>(m, 0)), 1).answer == Answer::False);
  CHECK(o.query(Valuation(std::vector<Value>(m, 0)), 0).answer == Answer::True);
  std::vector<Value> direct(m, U);
  direct[edge_index(k4, "g(e1,e4)")] = 1;
  CHECK(o.query(Valuation(direct), 1).answer == Answer::True);
  CHECK(o.query(Valuation(direct), 0).answer == Answer::False);
  const OracleVerdict root = o.query(fresh_valuation(m), 1);
  REQUIRE(root.is_unknown());
  REQUIRE(root.has_witnesses());
  const SymbolicFunction s = logic_function(k4);
  CHECK(s(*root.witness_true) == 1);
  CHECK(s(*root.witness_false) == 0);
  CHECK(o.query(fresh_valuation(m), 2).answer == Answer::False);
}

TEST_CASE("deterministic query is certain", "[logic]") {
  const HornProgram p = parse_program("q.\n0.3 :: a.\nquery(q).\n");
  CHECK(LogicOracle(p).query(fresh_valuation(1), 1).answer == Answer::True);
  const auto r = dpnl::dpnl(logic_instance(p), 1, LogicOracle(p),
                      VariableOrder::identity(1));
  CHECK(r.probability == 1.0);
  CHECK_THROWS_AS(logic_instance(parse_program("q.\nquery(q).\n")),
                  InvalidInstance);
}

TEST_CASE("property: logic oracle is valid and complete", "[logic][property]") {
  ref::Rng rng(73);
  for (int iter = 0; iter < 60; ++iter) {
    const HornProgram p = ref::random_program(rng, 7);
    const SymbolicFunction s = logic_function(p);
    const Oracle o = logic_oracle(p);
    const CheckReport v = check_validity_exhaustive(o, s);
    const CheckReport c = check_completeness_exhaustive(o, s);
    INFO(format_program(p) << (v.passed() ? "" : v.counterexample->reason)
                           << (c.passed() ? "" : c.counterexample->reason));
    CHECK(v.passed());
    CHECK(c.passed());
  }
}

TEST_CASE("property: logic oracle is monotone in the switches", "[logic][property]") {
  ref::Rng rng(74);
  for (int iter = 0; iter < 200; ++iter) {
    const HornProgram p = ref::random_program(rng, 8);
    const LogicOracle o(p);
    std::vector<Value> cells(p.m());
    for (Value& c : cells) {
      const double u = ref::uniform01(rng);
      c = u < 0.33 ? U : u < 0.66 ? 0 : 1;
    }
    const Valuation v(cells);
    if (o.query(v, 1).answer != Answer::True) continue;
    for (std::size_t k = 0; k < p.m(); ++k) {
      if (v[k] == 1) continue;
      CHECK(o.query(v.with(k, 1), 1).answer == Answer::True);
    }
  }
}

TEST_CASE("property: dpnl success probability equals subset enumeration",
          "[logic][property]") {
  ref::Rng rng(75);
  for (int iter = 0; iter < 80; ++iter) {
    const HornProgram p = ref::random_program(rng, 10);
    const double want = ref::problog_enumerate(p);
    CHECK_THAT(problog_bruteforce(p), WithinAbs(want, 1e-12));
    const Instance inst = logic_instance(p);
    const LogicOracle o(p);
    for (const auto& order : {VariableOrder::witness_guided(iota(p.m())),
                              VariableOrder::identity(p.m())}) {
      CHECK_THAT(dpnl::dpnl(inst, 1, o, order).probability, WithinAbs(want, 1e-10));
      CHECK_THAT(dpnl::dpnl(inst, 0, o, order).probability, WithinAbs(1.0 - want, 1e-10));
    }
  }
}

TEST_CASE("reachability programs", "[logic]") {
  CHECK(reachability_program(3, 0.5).m() == 6);
  CHECK(reachability_program(3, 0.5, true).m() == 9);
  CHECK_THROWS_AS(reachability_program(1, 0.5), InvalidInstance);

  const HornProgram two = reachability_program(2, 0.5);
  CHECK_THAT(dpnl::dpnl(logic_instance(two), 1, LogicOracle(two),
                  VariableOrder::identity(two.m()))
                 .probability,
             WithinAbs(0.5, 1e-15));

  // Three nodes with random edge probabilities against graph search over
  // every edge subset.
  ref::Rng rng(76);
  for (bool loops : {false, true}) {
    std::vector<std::vector<double>> probs(3, std::vector<double>(3));
    for (auto& row : probs) {
      for (double& x : row) x = ref::uniform01(rng);
    }
    const HornProgram p = reachability_program(3, probs, loops);
    double want = 0.0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << p.m()); ++s) {
      std::vector<std::vector<char>> adj(3, std::vector<char>(3, 0));
      double w = 1.0;
      std::size_t k = 0;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          if (i == j && !loops) continue;
          const bool on = (s >> k) & 1;
          adj[i][j] = on;
          w *= on ? probs[i][j] : 1.0 - probs[i][j];
          ++k;
        }
      }
      if (ref::reaches(adj)) want += w;
    }
    const auto got = dpnl::dpnl(logic_instance(p), 1, LogicOracle(p),
                          VariableOrder::witness_guided(iota(p.m())));
    CHECK_THAT(got.probability, WithinAbs(want, 1e-12));
  }
}

TEST_CASE("provenance clause counts", "[logic]") {
  const std::uint64_t expected[] = {1, 2, 5, 16, 65, 326};
  for (std::size_t n = 2; n <= 7; ++n) {
    CHECK(provenance_clause_count(n) == expected[n - 2]);
    CHECK(provenance_clause_count(n) == ref::count_simple_paths(n));
  }
  for (std::size_t n = 8; n <= 10; ++n) {
    CHECK(provenance_clause_count(n) == ref::count_simple_paths(n));
  }
  CHECK_THROWS_AS(provenance_clause_count(1), InvalidInstance);
  CHECK_THROWS_AS(provenance_clause_count(40), Error);
}

TEST_CASE("theory oracle on the Horn backend", "[logic]") {
  const HornProgram k3 = reachability_program(3, 0.5);
  const auto theory = std::make_shared<HornTheory>(k3);
  const Oracle o = theory_oracle(theory);
  const SymbolicFunction s = logic_function(k3);
  CHECK(check_validity_exhaustive(o, s).passed());
  // Negative hypotheses cannot refute a Horn query until all are decided.
  std::vector<Value> cells(k3.m(), 0);
  cells[0] = U;
  CHECK_FALSE(theory->refutes_query(Valuation(cells)));
  CHECK(theory->refutes_query(Valuation(std::vector<Value>(k3.m(), 0))));
  CHECK(theory->proves_query(Valuation(std::vector<Value>(k3.m(), 1))));
  const double want = problog_bruteforce(k3);
  CHECK_THAT(dpnl::dpnl(logic_instance(k3), 1, o, VariableOrder::identity(k3.m()))
                 .probability,
             WithinAbs(want, 1e-12));
}

TEST_CASE("annotated disjunction transform", "[logic]") {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const auto t = ad_transform(p);
  CHECK_THAT(t[0], WithinAbs(0.2, 1e-12));
  CHECK_THAT(t[1], WithinAbs(0.375, 1e-12));
  CHECK_THAT(t[2], WithinAbs(1.0, 1e-12));
  const auto back = ad_recover(t);
  for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(back[i], WithinAbs(p[i], 1e-12));

  const std::vector<double> point{1, 0, 0};
  CHECK(ad_transform(point) == point);
  const std::vector<double> zero_first{0, 0.4, 0.6};
  const auto z = ad_transform(zero_first);
  CHECK(z[0] == 0.0);
  CHECK_THAT(z[1], WithinAbs(0.4, 1e-12));
  CHECK_THAT(z[2], WithinAbs(1.0, 1e-12));
  const std::vector<double> one{1.0};
  CHECK(ad_recover(one) == one);

  const std::vector<double> degenerate{1.0, 1e-10};
  CHECK_THROWS_AS(ad_transform(degenerate), DegeneratePrefix);
  const std::vector<double> negative{-0.1, 1.1};
  CHECK_THROWS_AS(ad_transform(negative), InvalidInstance);
  const std::vector<double> outside{0.5, 1.5};
  CHECK_THROWS_AS(ad_recover(outside), InvalidInstance);
}

TEST_CASE("property: AD round trip", "[logic][property]") {
  ref::Rng rng(77);
  for (int iter = 0; iter < 1000; ++iter) {
    const auto p = ref::random_categorical(rng, ref::pick(rng, 1, 8), 0.2);
    const auto back = ad_recover(ad_transform(p));
    REQUIRE(back.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK_THAT(back[i], WithinAbs(p[i], 1e-12));
    }
  }
}

TEST_CASE("AD switches reproduce the categorical", "[logic]") {
  // Category i is chosen when switch i fires and every earlier one stayed off.
  ref::Rng rng(78);
  for (int iter = 0; iter < 100; ++iter) {
    const auto p = ref::random_categorical(rng, ref::pick(rng, 1, 6), 0.2);
    const auto t = ad_transform(p);
    const std::size_t n = p.size();
    std::vector<double> chosen(n, 0.0);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      double w = 1.0;
      for (std::size_t i = 0; i < n; ++i) w *= ((s >> i) & 1) ? t[i] : 1.0 - t[i];
      for (std::size_t i = 0; i < n; ++i) {
        if ((s >> i) & 1) {
          chosen[i] += w;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) CHECK_THAT(chosen[i], WithinAbs(p[i], 1e-12));
  }
}
