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

#include "dpnl/cnf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace dpnl {

// ---------------------------------------------------------------------------
// CnfFormula

CnfFormula::CnfFormula(std::size_t num_vars, std::vector<Clause> clauses)
    : num_vars_(num_vars) {
  clauses_.reserve(clauses.size());
  for (Clause& c : clauses) {
    for (const Literal& l : c) {
      if (l.var >= num_vars_) {
        throw InvalidInstance("literal variable " + std::to_string(l.var + 1) +
                              " exceeds the declared " +
                              std::to_string(num_vars_) + " variables");
      }
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    // Sorted by (var, sign): complementary literals are adjacent.
    bool tautology = false;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i].var == c[i - 1].var) {
        tautology = true;
        break;
      }
    }
    if (tautology) continue;
    if (c.empty()) has_empty_clause_ = true;
    clauses_.push_back(std::make_shared<const Clause>(std::move(c)));
  }
}

bool CnfFormula::occurs(std::uint32_t var) const {
  for (const auto& c : clauses_) {
    for (const Literal& l : *c) {
      if (l.var == var) return true;
    }
  }
  return false;
}

std::vector<std::size_t> CnfFormula::occurrence_counts() const {
  std::vector<std::size_t> counts(num_vars_, 0);
  for (const auto& c : clauses_) {
    for (const Literal& l : *c) ++counts[l.var];
  }
  return counts;
}

CnfFormula CnfFormula::condition(std::uint32_t var, bool value) const {
  if (var >= num_vars_) {
    throw InvalidInstance("conditioning on variable " +
                          std::to_string(var + 1) + " of a formula with " +
                          std::to_string(num_vars_) + " variables");
  }
  const Literal satisfied{var, value};
  const Literal falsified{var, !value};

  CnfFormula out;
  out.num_vars_ = num_vars_;
  out.clauses_.reserve(clauses_.size());
  for (const auto& c : clauses_) {
    const bool has_sat =
        std::binary_search(c->begin(), c->end(), satisfied);
    if (has_sat) continue;
    if (std::binary_search(c->begin(), c->end(), falsified)) {
      Clause reduced;
      reduced.reserve(c->size() - 1);
      for (const Literal& l : *c) {
        if (l != falsified) reduced.push_back(l);
      }
      if (reduced.empty()) out.has_empty_clause_ = true;
      out.clauses_.push_back(std::make_shared<const Clause>(std::move(reduced)));
    } else {
      if (c->empty()) out.has_empty_clause_ = true;
      out.clauses_.push_back(c);
    }
  }
  return out;
}

bool CnfFormula::evaluate(std::uint64_t assignment) const {
  for (const auto& c : clauses_) {
    bool sat = false;
    for (const Literal& l : *c) {
      const bool bit = (assignment >> l.var) & 1U;
      if (bit == l.positive) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// WeightMap

WeightMap::WeightMap(std::vector<double> probs) : probs_(std::move(probs)) {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0)) {
      throw InvalidInstance("weight of variable " + std::to_string(i + 1) +
                            " is outside [0,1]");
    }
  }
}

// ---------------------------------------------------------------------------
// ProbDPLL

namespace {

std::uint32_t choose_variable(const CnfFormula& g, BranchRule rule) {
  const std::vector<std::size_t> counts = g.occurrence_counts();
  std::uint32_t best = 0;
  std::size_t best_count = 0;
  for (std::uint32_t v = 0; v < counts.size(); ++v) {
    if (counts[v] == 0) continue;
    if (rule == BranchRule::kFixedOrder) return v;
    if (counts[v] > best_count) {
      best = v;
      best_count = counts[v];
    }
  }
  return best;
}

double probdpll_rec(const CnfFormula& g, const WeightMap& sigma,
                    BranchRule rule, ProbDpllStats& stats) {
  ++stats.calls;
  if (g.has_no_clauses()) return 1.0;
  if (g.has_empty_clause()) return 0.0;
  ++stats.branch_nodes;
  const std::uint32_t x = choose_variable(g, rule);
  const double p_true = probdpll_rec(g.condition(x, true), sigma, rule, stats);
  const double p_false =
      probdpll_rec(g.condition(x, false), sigma, rule, stats);
  return sigma[x] * p_true + (1.0 - sigma[x]) * p_false;
}

}  // namespace

double probdpll(const CnfFormula& g, const WeightMap& sigma, BranchRule rule,
                ProbDpllStats* stats) {
  if (sigma.size() < g.num_vars()) {
    throw InvalidInstance("weight map covers " + std::to_string(sigma.size()) +
                          " of " + std::to_string(g.num_vars()) +
                          " variables");
  }
  ProbDpllStats local;
  const double p = probdpll_rec(g, sigma, rule, local);
  if (stats) *stats = local;
  return p;
}

double pwmc_bruteforce(const CnfFormula& g, const WeightMap& sigma,
                       std::size_t max_vars) {
  const std::size_t n = g.num_vars();
  if (n > std::min<std::size_t>(max_vars, 24)) {
    throw SizeLimitExceeded("brute-force PWMC refuses " + std::to_string(n) +
                            " variables (limit " +
                            std::to_string(std::min<std::size_t>(max_vars, 24)) +
                            ")");
  }
  if (sigma.size() < n) throw InvalidInstance("weight map too short");

  // Each clause as (positive mask, negative mask).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> masks;
  masks.reserve(g.num_clauses());
  for (std::size_t i = 0; i < g.num_clauses(); ++i) {
    std::uint64_t p = 0, q = 0;
    for (const Literal& l : g.clause(i)) {
      (l.positive ? p : q) |= std::uint64_t{1} << l.var;
    }
    masks.emplace_back(p, q);
  }

  double total = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < count; ++a) {
    bool model = true;
    for (const auto& [p, q] : masks) {
      if (((p & a) | (q & ~a)) == 0) {
        model = false;
        break;
      }
    }
    if (!model) continue;
    double w = 1.0;
    for (std::size_t v = 0; v < n; ++v) {
      w *= ((a >> v) & 1U) ? sigma[v] : 1.0 - sigma[v];
    }
    total += w;
  }
  return total;
}

double prob_of_dnf(std::size_t num_vars, std::span<const DnfTerm> terms,
                   const WeightMap& sigma, BranchRule rule) {
  std::vector<Clause> negation;
  negation.reserve(terms.size());
  for (const DnfTerm& t : terms) {
    Clause c;
    c.reserve(t.size());
    for (const Literal& l : t) c.push_back(l.negated());
    negation.push_back(std::move(c));
  }
  const CnfFormula g(num_vars, std::move(negation));
  return 1.0 - probdpll(g, sigma, rule);
}

// ---------------------------------------------------------------------------
// DIMACS

namespace {

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

double parse_probability(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "bad probability '" + tok + "'");
  }
  if (used != tok.size()) throw ParseError(line, "bad probability '" + tok + "'");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParseError(line, "probability " + tok + " outside [0,1]");
  }
  return p;
}

long parse_integer(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
  return v;
}

}  // namespace

DimacsProblem parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  long declared_vars = 0, declared_clauses = 0;
  std::vector<Clause> clauses;
  Clause current;
  std::size_t current_started = 0;
  std::vector<double> weights;
  bool any_weight = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "c") continue;
    if (tok == "%") break;  // SATLIB trailer
    if (tok == "p") {
      if (have_header) throw ParseError(line_no, "duplicate problem line");
      std::string fmt, nv, nc, extra;
      if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || (ls >> extra)) {
        throw ParseError(line_no, "malformed header, expected 'p cnf <vars> "
                                  "<clauses>'");
      }
      declared_vars = parse_integer(nv, line_no);
      declared_clauses = parse_integer(nc, line_no);
      if (declared_vars < 0 || declared_clauses < 0) {
        throw ParseError(line_no, "negative count in header");
      }
      have_header = true;
      weights.assign(static_cast<std::size_t>(declared_vars), 0.5);
      continue;
    }
    if (!have_header) {
      throw ParseError(line_no, "clause or weight before the 'p cnf' header");
    }
    if (tok == "w") {
      std::string var_tok, prob_tok, extra;
      if (!(ls >> var_tok >> prob_tok) || (ls >> extra)) {
        throw ParseError(line_no, "malformed weight line, expected 'w <var> "
                                  "<prob>'");
      }
      const long var = parse_integer(var_tok, line_no);
      if (var < 1 || var > declared_vars) {
        throw ParseError(line_no, "weight for variable " + var_tok +
                                      " out of range");
      }
      weights[static_cast<std::size_t>(var - 1)] =
          parse_probability(prob_tok, line_no);
      any_weight = true;
      continue;
    }
    // Clause literals, possibly spanning lines.
    do {
      const long lit = parse_integer(tok, line_no);
      if (lit == 0) {
        clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (lit < -declared_vars || lit > declared_vars) {
        throw ParseError(line_no, "literal " + tok + " out of range (" +
                                      std::to_string(declared_vars) +
                                      " variables)");
      }
      if (current.empty()) current_started = line_no;
      current.push_back(Literal::from_dimacs(static_cast<int>(lit)));
    } while (ls >> tok);
  }
  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (!current.empty()) {
    throw ParseError(current_started, "unterminated clause (missing 0)");
  }
  if (static_cast<long>(clauses.size()) != declared_clauses) {
    throw ParseError(line_no, "header declares " +
                                  std::to_string(declared_clauses) +
                                  " clauses, found " +
                                  std::to_string(clauses.size()));
  }
  DimacsProblem out{
      CnfFormula(static_cast<std::size_t>(declared_vars), std::move(clauses)),
      std::nullopt};
  if (any_weight) out.weights = WeightMap(std::move(weights));
  return out;
}

DimacsProblem parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

WeightMap parse_weights(std::istream& in, std::size_t num_vars) {
  std::vector<double> weights(num_vars, 0.5);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "c") continue;
    if (tok == "w" && !(ls >> tok)) {
      throw ParseError(line_no, "malformed weight line");
    }
    std::string prob_tok, extra;
    if (!(ls >> prob_tok) || (ls >> extra)) {
      throw ParseError(line_no, "malformed weight line, expected 'w <var> "
                                "<prob>'");
    }
    const long var = parse_integer(tok, line_no);
    if (var < 1 || static_cast<std::size_t>(var) > num_vars) {
      throw ParseError(line_no, "weight for variable " + tok + " out of range");
    }
    weights[static_cast<std::size_t>(var - 1)] =
        parse_probability(prob_tok, line_no);
  }
  return WeightMap(std::move(weights));
}

}  // namespace dpnl
