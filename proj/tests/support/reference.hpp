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

// Random generators and slow reference computations shared by the unit and
// acceptance tests. Nothing here calls into the library's own enumerators,
// so a bug in one cannot hide behind the other.

#ifndef DPNL_TESTS_REFERENCE_HPP_
#define DPNL_TESTS_REFERENCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpnl/cnf.hpp"
#include "dpnl/core.hpp"
#include "dpnl/logic.hpp"
#include "dpnl/oracle.hpp"
#include "dpnl/sumtask.hpp"

namespace dpnl::ref {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Dirichlet(1) draw; with probability `zero_chance` per entry the weight is
// forced to 0 (at least one entry stays positive).
inline std::vector<double> random_categorical(Rng& rng, std::size_t size,
                                              double zero_chance = 0.0) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(size);
  double total = 0.0;
  for (double& x : w) {
    x = uniform01(rng) < zero_chance ? 0.0 : ex(rng);
    total += x;
  }
  if (total == 0.0) {
    w[pick(rng, 0, size - 1)] = 1.0;
    total = 1.0;
  }
  for (double& x : w) x /= total;
  return w;
}

// ---------------------------------------------------------------------------
// CNF

struct RawCnf {
  std::size_t num_vars = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS literals

  CnfFormula formula() const {
    std::vector<Clause> cs;
    for (const auto& c : clauses) {
      Clause out;
      for (int lit : c) out.push_back(Literal::from_dimacs(lit));
      cs.push_back(std::move(out));
    }
    return CnfFormula(num_vars, std::move(cs));
  }
};

inline RawCnf random_cnf(Rng& rng, std::size_t max_vars,
                         std::size_t max_clauses) {
  RawCnf g;
  g.num_vars = pick(rng, 1, max_vars);
  const std::size_t nc = pick(rng, 0, max_clauses);
  for (std::size_t i = 0; i < nc; ++i) {
    const std::size_t width = pick(rng, 1, std::min<std::size_t>(4, g.num_vars));
    std::vector<int> c;
    for (std::size_t j = 0; j < width; ++j) {
      const int v = static_cast<int>(pick(rng, 1, g.num_vars));
      c.push_back(uniform01(rng) < 0.5 ? v : -v);
    }
    g.clauses.push_back(std::move(c));
  }
  return g;
}

inline std::vector<double> random_sigma(Rng& rng, std::size_t n) {
  std::vector<double> s(n);
  for (double& x : s) {
    const double u = uniform01(rng);
    // Some exact 0/1 weights to exercise the edges.
    x = u < 0.05 ? 0.0 : u > 0.95 ? 1.0 : uniform01(rng);
  }
  return s;
}

// Sum of model weights over all 2^n assignments.
inline double pwmc_enumerate(const RawCnf& g, const std::vector<double>& s) {
  double total = 0.0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << g.num_vars); ++a) {
    bool sat = true;
    for (const auto& c : g.clauses) {
      bool any = false;
      for (int lit : c) {
        const bool val = (a >> (std::abs(lit) - 1)) & 1;
        if ((lit > 0) == val) {
          any = true;
          break;
        }
      }
      if (!any) {
        sat = false;
        break;
      }
    }
    if (!sat) continue;
    double w = 1.0;
    for (std::size_t i = 0; i < g.num_vars; ++i) {
      w *= ((a >> i) & 1) ? s[i] : 1.0 - s[i];
    }
    total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Generic finite-domain instances

// Mixed-radix odometer over all total assignments.
template <class F>
void for_each_assignment(const std::vector<std::size_t>& sizes, F&& f) {
  std::vector<Value> x(sizes.size(), 0);
  while (true) {
    f(static_cast<const std::vector<Value>&>(x));
    std::size_t k = 0;
    while (k < sizes.size()) {
      if (static_cast<std::size_t>(++x[k]) < sizes[k]) break;
      x[k] = 0;
      ++k;
    }
    if (k == sizes.size()) return;
  }
}

struct TableInstance {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> probs;
  std::size_t outputs = 0;
  std::shared_ptr<std::vector<Value>> table;  // indexed mixed-radix, k=0 fastest

  std::size_t index(std::span<const Value> x) const {
    std::size_t idx = 0;
    for (std::size_t k = sizes.size(); k-- > 0;) {
      idx = idx * sizes[k] + static_cast<std::size_t>(x[k]);
    }
    return idx;
  }
  Value eval(std::span<const Value> x) const { return (*table)[index(x)]; }

  std::vector<Domain> domains() const {
    std::vector<Domain> d;
    for (std::size_t s : sizes) d.emplace_back(s);
    return d;
  }
  Instance instance() const {
    std::vector<DiscreteDistribution> dists;
    for (const auto& p : probs) dists.emplace_back(p);
    return Instance(domains(), std::move(dists), Domain(outputs));
  }
  SymbolicFunction function() const {
    auto t = table;
    auto sz = sizes;
    return SymbolicFunction(domains(), Domain(outputs),
                            [t, sz](std::span<const Value> x) {
                              std::size_t idx = 0;
                              for (std::size_t k = sz.size(); k-- > 0;) {
                                idx = idx * sz[k] + static_cast<std::size_t>(x[k]);
                              }
                              return (*t)[idx];
                            });
  }
};

inline TableInstance random_table_instance(Rng& rng, std::size_t max_m,
                                           std::size_t max_domain) {
  TableInstance t;
  const std::size_t m = pick(rng, 1, max_m);
  std::size_t total = 1;
  for (std::size_t k = 0; k < m; ++k) {
    t.sizes.push_back(pick(rng, 1, max_domain));
    total *= t.sizes.back();
    t.probs.push_back(random_categorical(rng, t.sizes.back(), 0.1));
  }
  t.outputs = pick(rng, 1, 4);
  t.table = std::make_shared<std::vector<Value>>(total);
  // Skewed outputs so that some regions are constant and prune early.
  const bool structured = uniform01(rng) < 0.5;
  for (std::size_t i = 0; i < total; ++i) {
    if (structured) {
      (*t.table)[i] = static_cast<Value>((i % 7 == 0 ? 1 : 0) % t.outputs);
    } else {
      (*t.table)[i] = static_cast<Value>(pick(rng, 0, t.outputs - 1));
    }
  }
  return t;
}

// sum over assignments x with S(x) = o of prod_k w_k(x_k); weights need not
// be normalized.
inline double enumerate_probability(const std::vector<std::size_t>& sizes,
                            const std::vector<std::vector<double>>& w,
                            const std::function<Value(std::span<const Value>)>& s,
                            Value o) {
  double total = 0.0;
  for_each_assignment(sizes, [&](const std::vector<Value>& x) {
    if (s(x) != o) return;
    double p = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) p *= w[k][x[k]];
    total += p;
  });
  return total;
}

// Central differences of `value` over every weight w[k][x].
inline std::vector<std::vector<double>> finite_differences(
    std::vector<std::vector<double>> w,
    const std::function<double(const std::vector<std::vector<double>>&)>& value,
    double h) {
  std::vector<std::vector<double>> d(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    for (std::size_t x = 0; x < w[k].size(); ++x) {
      const double keep = w[k][x];
      w[k][x] = keep + h;
      const double up = value(w);
      w[k][x] = keep - h;
      const double down = value(w);
      w[k][x] = keep;
      d[k].push_back((up - down) / (2.0 * h));
    }
  }
  return d;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

// ---------------------------------------------------------------------------
// Sum task

inline SumInstanceSpec random_sum_spec(Rng& rng, int n, double zero_chance) {
  SumInstanceSpec spec;
  spec.n = n;
  for (int i = 0; i < 2 * n; ++i) {
    spec.digit_dists.emplace_back(random_categorical(rng, 10, zero_chance));
  }
  return spec;
}

// Column-wise schoolbook sum of two N-digit numbers, most significant first.
inline Value schoolbook_sum(std::span<const Value> d) {
  const std::size_t n = d.size() / 2;
  Value a = 0, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a = a * 10 + d[i];
    b = b * 10 + d[n + i];
  }
  return a + b;
}

// Output distribution of the sum: enumerate every value of each summand
// (product of its digit probabilities), then convolve.
inline std::vector<double> sum_distribution_reference(const SumInstanceSpec& spec) {
  const int n = spec.n;
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= 10;
  auto summand = [&](int first) {
    std::vector<double> p(count);
    for (std::size_t v = 0; v < count; ++v) {
      double w = 1.0;
      std::size_t rest = v;
      for (int i = n - 1; i >= 0; --i) {
        w *= spec.digit_dists[static_cast<std::size_t>(first + i)][rest % 10];
        rest /= 10;
      }
      p[v] = w;
    }
    return p;
  };
  const auto a = summand(0);
  const auto b = summand(n);
  std::vector<double> out(2 * count);
  for (std::size_t i = 0; i < count; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < count; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Horn programs

// Repeated full scans until nothing changes.
inline bool naive_entails(const std::vector<HornRule>& rules,
                          std::size_t num_atoms, AtomId q) {
  std::vector<char> known(num_atoms, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const HornRule& r : rules) {
      if (known[r.head]) continue;
      bool fire = true;
      for (AtomId b : r.body) fire = fire && known[b];
      if (fire) {
        known[r.head] = 1;
        changed = true;
      }
    }
  }
  return q < num_atoms && known[q];
}

// Does the theory with switch set `on` (bit k) prove the query?
inline bool program_proves(const HornProgram& prog, std::uint64_t on) {
  std::vector<HornRule> rules = prog.rules;
  for (std::size_t k = 0; k < prog.m(); ++k) {
    if ((on >> k) & 1) rules.push_back(prog.probabilistic[k].rule);
  }
  return naive_entails(rules, prog.atoms.size(), prog.query);
}

// Success probability as a sum over all 2^m switch subsets.
inline double problog_enumerate(const HornProgram& prog) {
  double total = 0.0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << prog.m()); ++s) {
    if (!program_proves(prog, s)) continue;
    double w = 1.0;
    for (std::size_t k = 0; k < prog.m(); ++k) {
      const double p = prog.probabilistic[k].probability;
      w *= ((s >> k) & 1) ? p : 1.0 - p;
    }
    total += w;
  }
  return total;
}

// Atoms a0..a{n-1}; a few facts, some deterministic rules, m probabilistic
// facts or rules, query on a random atom.
inline HornProgram random_program(Rng& rng, std::size_t max_m) {
  HornProgram prog;
  const std::size_t atoms = pick(rng, 2, 9);
  for (std::size_t i = 0; i < atoms; ++i) {
    prog.atoms.intern("a" + std::to_string(i));
  }
  auto random_rule = [&](std::size_t max_body) {
    HornRule r;
    r.head = static_cast<AtomId>(pick(rng, 0, atoms - 1));
    const std::size_t body = pick(rng, 0, max_body);
    for (std::size_t j = 0; j < body; ++j) {
      r.body.push_back(static_cast<AtomId>(pick(rng, 0, atoms - 1)));
    }
    return r;
  };
  const std::size_t det = pick(rng, 0, 6);
  for (std::size_t i = 0; i < det; ++i) {
    HornRule r = random_rule(3);
    // Keep deterministic facts rare so the query is not always trivial.
    if (r.body.empty() && uniform01(rng) < 0.7) continue;
    prog.rules.push_back(std::move(r));
  }
  const std::size_t m = pick(rng, 1, max_m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = uniform01(rng);
    const double p = u < 0.05 ? 0.0 : u > 0.95 ? 1.0 : uniform01(rng);
    prog.probabilistic.push_back({random_rule(2), p});
  }
  prog.query = static_cast<AtomId>(pick(rng, 0, atoms - 1));
  return prog;
}

// ---------------------------------------------------------------------------
// Graphs

// Simple paths from node 0 to node n-1 in the complete loop-free digraph.
inline std::uint64_t count_simple_paths(std::size_t n) {
  std::vector<char> seen(n, 0);
  std::function<std::uint64_t(std::size_t)> dfs = [&](std::size_t u) {
    if (u == n - 1) return std::uint64_t{1};
    std::uint64_t total = 0;
    seen[u] = 1;
    for (std::size_t w = 0; w < n; ++w) {
      if (w != u && !seen[w]) total += dfs(w);
    }
    seen[u] = 0;
    return total;
  };
  return dfs(0);
}

// BFS reachability of the last node from node 0 given an adjacency matrix.
inline bool reaches(const std::vector<std::vector<char>>& adj) {
  const std::size_t n = adj.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t w = 0; w < n; ++w) {
      if (adj[u][w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen[n - 1];
}

}  // namespace dpnl::ref

#endif  // DPNL_TESTS_REFERENCE_HPP_
