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

// Domain types shared by every inference engine: finite domains, partial
// valuations over them, per-variable distributions, oracle verdicts and
// query statistics.

#ifndef DPNL_CORE_HPP_
#define DPNL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpnl {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed instance, valuation or distribution.
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

// A brute-force or exhaustive routine refused because the enumeration would
// exceed its configured ceiling.
class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

// Values of a domain are the dense indices 0..size-1.
using Value = std::int32_t;
inline constexpr Value kUnknown = -1;

class Domain {
 public:
  explicit Domain(std::size_t size, std::vector<std::string> labels = {});

  std::size_t size() const { return size_; }
  bool contains(Value x) const {
    return x >= 0 && static_cast<std::size_t>(x) < size_;
  }
  bool has_labels() const { return !labels_.empty(); }
  // Label of `x`, or its decimal index when the domain is unlabelled.
  std::string label(Value x) const;

  bool operator==(const Domain&) const = default;

 private:
  std::size_t size_;
  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Valuation
// ---------------------------------------------------------------------------

// A partial assignment of m finite-domain variables. Cells hold a value
// index or kUnknown.
class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::vector<Value> cells) : cells_(std::move(cells)) {}

  std::size_t size() const { return cells_.size(); }
  Value operator[](std::size_t k) const { return cells_[k]; }
  bool is_unknown(std::size_t k) const { return cells_[k] == kUnknown; }
  bool is_total() const;
  std::size_t unknown_count() const;

  // v_{v[k] <- x}; returns a new valuation.
  Valuation with(std::size_t k, Value x) const {
    Valuation out(*this);
    out.cells_[k] = x;
    return out;
  }

  // In-place update for search scratch state.
  void assign(std::size_t k, Value x) { cells_[k] = x; }
  void clear(std::size_t k) { cells_[k] = kUnknown; }

  std::span<const Value> cells() const { return cells_; }

  bool operator==(const Valuation&) const = default;
  // Lexicographic with kUnknown ordered before every value.
  auto operator<=>(const Valuation&) const = default;

 private:
  std::vector<Value> cells_;
};

std::ostream& operator<<(std::ostream& os, const Valuation& v);

struct ValuationHash {
  std::size_t operator()(const Valuation& v) const noexcept;
};

// All-unknown valuation of length m. Throws InvalidInstance when m == 0.
Valuation fresh_valuation(std::size_t m);

// Throws InvalidInstance unless v has one cell per domain and every assigned
// cell lies inside its domain.
void check_valuation(const Valuation& v, std::span<const Domain> domains);

// True iff `sub` agrees with `v` on every cell assigned in `v`.
bool is_subvaluation(const Valuation& sub, const Valuation& v);

// Number of total completions of v, saturating at UINT64_MAX.
std::uint64_t completion_count(const Valuation& v,
                               std::span<const Domain> domains);

// Lazy stream over tot(v): lexicographic over the free cells with the
// leftmost free cell varying fastest. A total v yields exactly itself.
class Completions {
 public:
  Completions(Valuation v, std::vector<std::size_t> domain_sizes);
  Completions(const Valuation& v, std::span<const Domain> domains);

  class iterator {
   public:
    using value_type = Valuation;
    using difference_type = std::ptrdiff_t;
    using reference = const Valuation&;
    using pointer = const Valuation*;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(std::default_sentinel_t) const { return done_; }

   private:
    friend class Completions;
    iterator(const Completions* owner, Valuation start);

    const Completions* owner_ = nullptr;
    Valuation current_;
    bool done_ = true;
  };

  iterator begin() const { return iterator(this, start_); }
  std::default_sentinel_t end() const { return {}; }

 private:
  Valuation start_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> free_;
};

inline Completions total_completions(const Valuation& v,
                                     std::span<const Domain> domains) {
  return Completions(v, domains);
}

// ---------------------------------------------------------------------------
// DiscreteDistribution
// ---------------------------------------------------------------------------

// Probability table over a finite domain. Construction rejects negative or
// non-finite entries and zero total mass, then normalizes.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> weights);

  static DiscreteDistribution uniform(std::size_t size);
  static DiscreteDistribution point_mass(std::size_t size, Value at);
  static DiscreteDistribution bernoulli(double p_true);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t x) const { return probs_[x]; }
  std::span<const double> probs() const { return probs_; }
  // Sum of the weights before normalization.
  double original_mass() const { return original_mass_; }

 private:
  std::vector<double> probs_;
  double original_mass_ = 1.0;
};

// ---------------------------------------------------------------------------
// Oracle verdicts
// ---------------------------------------------------------------------------

enum class Answer : std::uint8_t { False = 0, True = 1, Unknown = 2 };

const char* to_string(Answer a);

struct OracleVerdict {
  Answer answer = Answer::Unknown;
  // Total completions of the queried valuation mapping to the queried output
  // (witness_true) and elsewhere (witness_false). Optional.
  std::optional<Valuation> witness_true;
  std::optional<Valuation> witness_false;

  static OracleVerdict yes() { return {Answer::True, {}, {}}; }
  static OracleVerdict no() { return {Answer::False, {}, {}}; }
  static OracleVerdict unknown() { return {Answer::Unknown, {}, {}}; }
  static OracleVerdict from_bool(bool b) { return b ? yes() : no(); }

  bool is_unknown() const { return answer == Answer::Unknown; }
  bool has_witnesses() const {
    return witness_true.has_value() && witness_false.has_value();
  }
};

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

// The probabilistic side of an inference problem: m independent variables,
// their domains and distributions, and the output domain of the function
// being evaluated.
class Instance {
 public:
  Instance(std::vector<Domain> domains, std::vector<DiscreteDistribution> dists,
           Domain output_domain);

  std::size_t m() const { return domains_.size(); }
  std::span<const Domain> domains() const { return domains_; }
  const Domain& domain(std::size_t k) const { return domains_[k]; }
  std::span<const DiscreteDistribution> dists() const { return dists_; }
  const DiscreteDistribution& dist(std::size_t k) const { return dists_[k]; }
  const Domain& output_domain() const { return output_domain_; }

  // Copy with dists[k] replaced.
  Instance with_dist(std::size_t k, DiscreteDistribution d) const;

 private:
  std::vector<Domain> domains_;
  std::vector<DiscreteDistribution> dists_;
  Domain output_domain_;
};

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct QueryStats {
  std::uint64_t oracle_calls = 0;
  std::uint64_t branch_nodes = 0;
  std::uint64_t leaves_true = 0;
  std::uint64_t leaves_false = 0;
  double wall_time = 0.0;  // seconds

  QueryStats& operator+=(const QueryStats& o) {
    oracle_calls += o.oracle_calls;
    branch_nodes += o.branch_nodes;
    leaves_true += o.leaves_true;
    leaves_false += o.leaves_false;
    wall_time += o.wall_time;
    return *this;
  }
};

}  // namespace dpnl

#endif  // DPNL_CORE_HPP_
