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

#include "dpnl/logic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <sstream>

namespace dpnl {

AtomId AtomTable::intern(const std::string& name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  const AtomId id = static_cast<AtomId>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

std::optional<AtomId> AtomTable::find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void HornProgram::validate() const {
  const std::size_t n = atoms.size();
  auto check_rule = [n](const HornRule& r) {
    if (r.head >= n) throw InvalidInstance("rule head outside atom table");
    for (AtomId b : r.body) {
      if (b >= n) throw InvalidInstance("rule body atom outside atom table");
    }
  };
  for (const HornRule& r : rules) check_rule(r);
  for (const ProbabilisticRule& pr : probabilistic) {
    check_rule(pr.rule);
    if (!(pr.probability >= 0.0 && pr.probability <= 1.0)) {
      throw InvalidInstance("probability outside [0,1]");
    }
  }
  if (query >= n) throw InvalidInstance("query atom outside atom table");
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { kName, kVariable, kNumber, kLParen, kRParen, kComma, kDot,
                 kIf, kAnnot, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    if (pos_ >= src_.size()) return {Tok::kEnd, "", line_};
    const char c = src_[pos_];
    const std::size_t line = line_;
    if (std::isdigit(static_cast<unsigned char>(c))) return number(line);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) ||
              src_[end] == '_')) {
        ++end;
      }
      std::string word(src_.substr(pos_, end - pos_));
      pos_ = end;
      const bool var = std::isupper(static_cast<unsigned char>(c)) || c == '_';
      return {var ? Tok::kVariable : Tok::kName, std::move(word), line};
    }
    ++pos_;
    switch (c) {
      case '(':
        return {Tok::kLParen, "(", line};
      case ')':
        return {Tok::kRParen, ")", line};
      case ',':
        return {Tok::kComma, ",", line};
      case '.':
        return {Tok::kDot, ".", line};
      case ':':
        if (pos_ < src_.size() && src_[pos_] == '-') {
          ++pos_;
          return {Tok::kIf, ":-", line};
        }
        if (pos_ < src_.size() && src_[pos_] == ':') {
          ++pos_;
          return {Tok::kAnnot, "::", line};
        }
        break;
      case '\\':
        if (pos_ < src_.size() && src_[pos_] == '+') {
          throw ParseError(line, "negation is not supported");
        }
        break;
      default:
        break;
    }
    throw ParseError(line, std::string("unexpected character '") + c + "'");
  }

 private:
  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  // Digits, then an optional fraction and exponent. A '.' counts as a
  // fraction point only when a digit follows, so `p(1).` ends the clause.
  Token number(std::size_t line) {
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[end]))) {
        ++end;
      }
    };
    digits();
    if (end + 1 < src_.size() && src_[end] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[end + 1]))) {
      ++end;
      digits();
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
        end = e;
        digits();
      }
    }
    Token t{Tok::kNumber, std::string(src_.substr(pos_, end - pos_)), line};
    pos_ = end;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { advance(); }

  HornProgram run() {
    std::optional<AtomId> query;
    std::size_t query_line = 0;
    while (tok_.kind != Tok::kEnd) {
      const std::size_t line = tok_.line;
      if (tok_.kind == Tok::kName && tok_.text == "query") {
        advance();
        expect(Tok::kLParen, "'(' after query");
        const AtomId q = atom();
        expect(Tok::kRParen, "')' closing query");
        expect(Tok::kDot, "'.' after query");
        if (query) {
          throw ParseError(line, "second query (first on line " +
                                     std::to_string(query_line) + ")");
        }
        query = q;
        query_line = line;
        continue;
      }
      std::optional<double> prob;
      if (tok_.kind == Tok::kNumber) {
        prob = probability();
        advance();
        expect(Tok::kAnnot, "'::' after probability");
      }
      HornRule rule;
      rule.head = atom();
      if (tok_.kind == Tok::kIf) {
        advance();
        rule.body.push_back(atom());
        while (tok_.kind == Tok::kComma) {
          advance();
          rule.body.push_back(atom());
        }
      }
      expect(Tok::kDot, "'.' ending clause");
      if (prob) {
        prog_.probabilistic.push_back({std::move(rule), *prob});
      } else {
        prog_.rules.push_back(std::move(rule));
      }
    }
    if (!query) throw ParseError(lex_line(), "program has no query");
    prog_.query = *query;
    return std::move(prog_);
  }

 private:
  void advance() { tok_ = lex_.next(); }
  std::size_t lex_line() const { return tok_.line; }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) {
      throw ParseError(tok_.line, std::string("expected ") + what +
                                      (tok_.kind == Tok::kEnd
                                           ? std::string(", got end of input")
                                           : ", got '" + tok_.text + "'"));
    }
    advance();
  }

  double probability() {
    double p = 0.0;
    const char* b = tok_.text.data();
    const char* e = b + tok_.text.size();
    auto [ptr, ec] = std::from_chars(b, e, p);
    if (ec != std::errc() || ptr != e) {
      throw ParseError(tok_.line, "bad probability '" + tok_.text + "'");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ParseError(tok_.line, "probability " + tok_.text +
                                      " outside [0,1]");
    }
    return p;
  }

  std::string constant() {
    if (tok_.kind == Tok::kVariable) {
      throw ParseError(tok_.line, "variable '" + tok_.text +
                                      "': ground programs only");
    }
    if (tok_.kind != Tok::kName && tok_.kind != Tok::kNumber) {
      throw ParseError(tok_.line, "expected a constant argument");
    }
    std::string c = tok_.text;
    advance();
    if (tok_.kind == Tok::kLParen) {
      throw ParseError(tok_.line, "function symbols are not supported");
    }
    return c;
  }

  AtomId atom() {
    if (tok_.kind == Tok::kVariable) {
      throw ParseError(tok_.line, "variable '" + tok_.text +
                                      "' in atom position: ground programs "
                                      "only");
    }
    if (tok_.kind != Tok::kName) {
      throw ParseError(tok_.line, "expected an atom");
    }
    std::string name = tok_.text;
    if (name == "not") throw ParseError(tok_.line, "negation is not supported");
    advance();
    if (tok_.kind == Tok::kLParen) {
      advance();
      name += '(';
      name += constant();
      while (tok_.kind == Tok::kComma) {
        advance();
        name += ',';
        name += constant();
      }
      if (tok_.kind != Tok::kRParen) {
        throw ParseError(tok_.line, "expected ')' closing atom arguments");
      }
      advance();
      name += ')';
    }
    return prog_.atoms.intern(name);
  }

  Lexer lex_;
  Token tok_{Tok::kEnd, "", 1};
  HornProgram prog_;
};

void write_rule(std::ostream& os, const AtomTable& atoms, const HornRule& r) {
  os << atoms.name(r.head);
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    os << (i ? ", " : " :- ") << atoms.name(r.body[i]);
  }
  os << ".\n";
}

}  // namespace

HornProgram parse_program(std::string_view text) {
  HornProgram prog = Parser(text).run();
  prog.validate();
  return prog;
}

HornProgram parse_program(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return parse_program(std::string_view(text));
}

std::string format_program(const HornProgram& prog) {
  std::ostringstream os;
  os.precision(17);
  for (const HornRule& r : prog.rules) write_rule(os, prog.atoms, r);
  for (const ProbabilisticRule& pr : prog.probabilistic) {
    os << pr.probability << " :: ";
    write_rule(os, prog.atoms, pr.rule);
  }
  os << "query(" << prog.atoms.name(prog.query) << ").\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Entailment

bool entails(std::span<const HornRule> rules, std::size_t num_atoms,
             AtomId q) {
  if (q >= num_atoms) return false;
  std::vector<std::uint32_t> remaining(rules.size());
  std::vector<std::vector<std::uint32_t>> watchers(num_atoms);
  std::vector<char> derived(num_atoms, 0);
  std::vector<AtomId> queue;

  auto derive = [&](AtomId a) {
    if (a < num_atoms && !derived[a]) {
      derived[a] = 1;
      queue.push_back(a);
    }
  };

  for (std::size_t r = 0; r < rules.size(); ++r) {
    std::vector<AtomId> body = rules[r].body;
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    bool reachable = true;
    for (AtomId b : body) {
      if (b >= num_atoms) reachable = false;
    }
    if (!reachable) {
      remaining[r] = std::numeric_limits<std::uint32_t>::max();
      continue;
    }
    remaining[r] = static_cast<std::uint32_t>(body.size());
    for (AtomId b : body) watchers[b].push_back(static_cast<std::uint32_t>(r));
    if (body.empty()) derive(rules[r].head);
  }
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (std::uint32_t r : watchers[queue[i]]) {
      if (--remaining[r] == 0) derive(rules[r].head);
    }
  }
  return derived[q] != 0;
}

HornEngine::HornEngine(const HornProgram& prog)
    : num_atoms_(prog.atoms.size()),
      num_optional_(prog.probabilistic.size()),
      query_(prog.query) {
  prog.validate();
  auto add = [this](const HornRule& r, std::int64_t optional_index) {
    std::vector<AtomId> body = r.body;
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    const auto index = static_cast<std::uint32_t>(rules_.size());
    rules_.push_back({r.head, static_cast<std::uint32_t>(body.size()),
                      optional_index});
    for (AtomId b : body) watchers_[b].push_back(index);
    bodies_.push_back(std::move(body));
  };
  watchers_.resize(num_atoms_);
  for (const HornRule& r : prog.rules) add(r, -1);
  for (std::size_t k = 0; k < prog.probabilistic.size(); ++k) {
    add(prog.probabilistic[k].rule, static_cast<std::int64_t>(k));
  }
}

HornEngine::Outcome HornEngine::evaluate(const Valuation& v,
                                         bool want_support) const {
  if (v.size() != num_optional_) {
    throw InvalidInstance("valuation has " + std::to_string(v.size()) +
                          " cells for " + std::to_string(num_optional_) +
                          " probabilistic rules");
  }
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> remaining(rules_.size());
  std::vector<std::uint32_t> justification(num_atoms_, kNone);
  std::vector<AtomId> queue;
  queue.reserve(num_atoms_);
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    remaining[r] = rules_[r].body_size;
  }

  // Phase 1 enables deterministic rules and switches set to 1; phase 2 adds
  // the unknown switches on top of the committed fixpoint.
  bool optimistic = false;
  auto enabled = [&](const CompiledRule& r) {
    if (r.optional_index < 0) return true;
    const Value x = v[static_cast<std::size_t>(r.optional_index)];
    return x == 1 || (optimistic && x == kUnknown);
  };
  auto fire = [&](std::uint32_t r) {
    const AtomId h = rules_[r].head;
    if (justification[h] == kNone) {
      justification[h] = r;
      queue.push_back(h);
    }
  };
  std::size_t head = 0;
  auto propagate = [&] {
    while (head < queue.size() && justification[query_] == kNone) {
      for (std::uint32_t r : watchers_[queue[head++]]) {
        if (--remaining[r] == 0 && enabled(rules_[r])) fire(r);
      }
    }
  };

  for (std::uint32_t r = 0; r < rules_.size(); ++r) {
    if (remaining[r] == 0 && enabled(rules_[r])) fire(r);
  }
  propagate();
  Outcome out;
  if (justification[query_] != kNone) {
    out.answer = Answer::True;
    return out;
  }

  optimistic = true;
  for (std::uint32_t r = 0; r < rules_.size(); ++r) {
    const CompiledRule& rule = rules_[r];
    if (rule.optional_index >= 0 && remaining[r] == 0 &&
        v.is_unknown(static_cast<std::size_t>(rule.optional_index))) {
      fire(r);
    }
  }
  propagate();
  if (justification[query_] == kNone) {
    out.answer = Answer::False;
    return out;
  }
  out.answer = Answer::Unknown;
  if (!want_support) return out;

  std::vector<char> seen(num_atoms_, 0);
  std::vector<AtomId> stack{query_};
  seen[query_] = 1;
  while (!stack.empty()) {
    const AtomId a = stack.back();
    stack.pop_back();
    const std::uint32_t r = justification[a];
    const CompiledRule& rule = rules_[r];
    if (rule.optional_index >= 0 &&
        v.is_unknown(static_cast<std::size_t>(rule.optional_index))) {
      out.support.push_back(static_cast<std::size_t>(rule.optional_index));
    }
    for (AtomId b : bodies_[r]) {
      if (!seen[b]) {
        seen[b] = 1;
        stack.push_back(b);
      }
    }
  }
  std::sort(out.support.begin(), out.support.end());
  out.support.erase(std::unique(out.support.begin(), out.support.end()),
                    out.support.end());
  return out;
}

bool HornEngine::proves(const Valuation& v) const {
  return evaluate(v, false).answer == Answer::True;
}

// ---------------------------------------------------------------------------
// Oracle

LogicOracle::LogicOracle(const HornProgram& prog, bool with_witnesses)
    : engine_(std::make_shared<const HornEngine>(prog)),
      with_witnesses_(with_witnesses) {}

OracleVerdict LogicOracle::query(const Valuation& v, Value o) const {
  if (o != 0 && o != 1) return OracleVerdict::no();
  HornEngine::Outcome res = engine_->evaluate(v, with_witnesses_);
  if (res.answer != Answer::Unknown) {
    const bool holds = res.answer == Answer::True;
    return OracleVerdict::from_bool(o == 1 ? holds : !holds);
  }
  OracleVerdict out = OracleVerdict::unknown();
  if (!with_witnesses_) return out;
  std::vector<Value> off(v.cells().begin(), v.cells().end());
  for (Value& x : off) {
    if (x == kUnknown) x = 0;
  }
  std::vector<Value> proof = off;
  for (std::size_t k : res.support) proof[k] = 1;
  Valuation proving(std::move(proof));
  Valuation failing(std::move(off));
  if (o == 1) {
    out.witness_true = std::move(proving);
    out.witness_false = std::move(failing);
  } else {
    out.witness_true = std::move(failing);
    out.witness_false = std::move(proving);
  }
  return out;
}

Oracle logic_oracle(const HornProgram& prog, bool with_witnesses) {
  return Oracle(LogicOracle(prog, with_witnesses), true, "logic");
}

SymbolicFunction logic_function(const HornProgram& prog) {
  auto engine = std::make_shared<const HornEngine>(prog);
  std::vector<Domain> domains(prog.m(), Domain(2));
  return SymbolicFunction(
      std::move(domains), Domain(2),
      [engine](std::span<const Value> x) -> Value {
        return engine->proves(Valuation(std::vector<Value>(x.begin(), x.end())))
                   ? 1
                   : 0;
      });
}

Instance logic_instance(const HornProgram& prog) {
  if (prog.m() == 0) {
    throw InvalidInstance("program has no probabilistic rules");
  }
  std::vector<Domain> domains(prog.m(), Domain(2));
  std::vector<DiscreteDistribution> dists;
  dists.reserve(prog.m());
  for (const ProbabilisticRule& pr : prog.probabilistic) {
    dists.push_back(DiscreteDistribution::bernoulli(pr.probability));
  }
  return Instance(std::move(domains), std::move(dists), Domain(2));
}

double problog_bruteforce(const HornProgram& prog, std::size_t max_facts) {
  const std::size_t m = prog.m();
  if (m > max_facts || m >= 63) {
    throw SizeLimitExceeded("2^" + std::to_string(m) +
                            " rule subsets exceed the enumeration limit");
  }
  std::vector<HornRule> rules = prog.rules;
  const std::size_t base = rules.size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double w = 1.0;
    rules.resize(base);
    for (std::size_t k = 0; k < m; ++k) {
      const double p = prog.probabilistic[k].probability;
      if (mask >> k & 1) {
        w *= p;
        rules.push_back(prog.probabilistic[k].rule);
      } else {
        w *= 1.0 - p;
      }
    }
    if (w == 0.0) continue;
    if (entails(rules, prog.atoms.size(), prog.query)) total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Theories

bool HornTheory::proves_query(const Valuation& hyps) const {
  return engine_.proves(hyps);
}

bool HornTheory::refutes_query(const Valuation& hyps) const {
  return hyps.is_total() && !engine_.proves(hyps);
}

Oracle theory_oracle(std::shared_ptr<const TheoryBackend> theory) {
  if (!theory) throw InvalidInstance("null theory backend");
  return Oracle(
      [theory](const Valuation& v, Value o) -> OracleVerdict {
        if (o != 0 && o != 1) return OracleVerdict::no();
        if (theory->refutes_query(v)) return OracleVerdict::from_bool(o == 0);
        if (theory->proves_query(v)) return OracleVerdict::from_bool(o == 1);
        return OracleVerdict::unknown();
      },
      false, "theory");
}

// ---------------------------------------------------------------------------
// Reachability

namespace {

std::string node(std::size_t i) { return "e" + std::to_string(i + 1); }

}  // namespace

HornProgram reachability_program(
    std::size_t n, const std::vector<std::vector<double>>& edge_probs,
    bool self_loops) {
  if (n < 2) throw InvalidInstance("reachability needs at least 2 nodes");
  if (edge_probs.size() != n) {
    throw InvalidInstance("edge probability table must be n x n");
  }
  for (const auto& row : edge_probs) {
    if (row.size() != n) {
      throw InvalidInstance("edge probability table must be n x n");
    }
  }
  HornProgram prog;
  std::vector<AtomId> reach(n);
  for (std::size_t i = 0; i < n; ++i) {
    reach[i] = prog.atoms.intern("r(" + node(i) + ")");
  }
  prog.rules.push_back({reach[0], {}});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && !self_loops) continue;
      const AtomId g =
          prog.atoms.intern("g(" + node(i) + "," + node(j) + ")");
      prog.probabilistic.push_back({{g, {}}, edge_probs[i][j]});
      prog.rules.push_back({reach[j], {reach[i], g}});
    }
  }
  prog.query = reach[n - 1];
  prog.validate();
  return prog;
}

HornProgram reachability_program(std::size_t n, double edge_prob,
                                 bool self_loops) {
  return reachability_program(
      n, std::vector<std::vector<double>>(n, std::vector<double>(n, edge_prob)),
      self_loops);
}

std::uint64_t provenance_clause_count(std::size_t n) {
  if (n < 2) throw InvalidInstance("provenance count needs n >= 2");
  const std::uint64_t k = n - 2;
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  // Term i is the falling factorial k (k-1) ... (k-i+1).
  std::uint64_t term = 1;
  std::uint64_t total = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t f = k - i + 1;
    if (term > kMax / f) {
      throw Error("provenance clause count overflows 64 bits at n = " +
                  std::to_string(n));
    }
    term *= f;
    if (total > kMax - term) {
      throw Error("provenance clause count overflows 64 bits at n = " +
                  std::to_string(n));
    }
    total += term;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Annotated disjunctions

std::vector<double> ad_transform(std::span<const double> p) {
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidInstance("category probabilities must be non-negative");
    }
    total += x;
  }
  if (total > 1.0 + 1e-9) {
    throw InvalidInstance("category probabilities sum above 1");
  }
  std::vector<double> out(p.size(), 0.0);
  double prefix = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      const double rest = 1.0 - prefix;
      if (rest <= 0.0) {
        throw DegeneratePrefix("categories before index " + std::to_string(i) +
                               " already carry all the mass");
      }
      // Rounding in the prefix can push the last ratio just above 1.
      out[i] = std::min(1.0, p[i] / rest);
    }
    prefix += p[i];
  }
  return out;
}

std::vector<double> ad_recover(std::span<const double> p_tilde) {
  std::vector<double> out(p_tilde.size());
  double prefix = 0.0;
  for (std::size_t i = 0; i < p_tilde.size(); ++i) {
    if (!(p_tilde[i] >= 0.0 && p_tilde[i] <= 1.0)) {
      throw InvalidInstance("switch probability outside [0,1]");
    }
    out[i] = p_tilde[i] * (1.0 - prefix);
    prefix += out[i];
  }
  return out;
}

}  // namespace dpnl
