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

#include "dpnl/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace dpnl {

Domain::Domain(std::size_t size, std::vector<std::string> labels)
    : size_(size), labels_(std::move(labels)) {
  if (size_ == 0) throw InvalidInstance("domain size must be at least 1");
  if (!labels_.empty() && labels_.size() != size_) {
    throw InvalidInstance("domain has " + std::to_string(size_) +
                          " values but " + std::to_string(labels_.size()) +
                          " labels");
  }
}

std::string Domain::label(Value x) const {
  if (!labels_.empty() && contains(x)) return labels_[x];
  return std::to_string(x);
}

bool Valuation::is_total() const {
  return std::none_of(cells_.begin(), cells_.end(),
                      [](Value x) { return x == kUnknown; });
}

std::size_t Valuation::unknown_count() const {
  return static_cast<std::size_t>(
      std::count(cells_.begin(), cells_.end(), kUnknown));
}

std::ostream& operator<<(std::ostream& os, const Valuation& v) {
  os << '[';
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) os << ',';
    if (v.is_unknown(k)) {
      os << '?';
    } else {
      os << v[k];
    }
  }
  return os << ']';
}

std::size_t ValuationHash::operator()(const Valuation& v) const noexcept {
  // FNV-1a over the cell values.
  std::uint64_t h = 1469598103934665603ULL;
  for (Value x : v.cells()) {
    h ^= static_cast<std::uint32_t>(x);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

Valuation fresh_valuation(std::size_t m) {
  if (m == 0) throw InvalidInstance("valuation needs at least one variable");
  return Valuation(std::vector<Value>(m, kUnknown));
}

void check_valuation(const Valuation& v, std::span<const Domain> domains) {
  if (v.size() != domains.size()) {
    throw InvalidInstance("valuation has " + std::to_string(v.size()) +
                          " cells, expected " +
                          std::to_string(domains.size()));
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v.is_unknown(k) && !domains[k].contains(v[k])) {
      throw InvalidInstance("cell " + std::to_string(k) + " holds value " +
                            std::to_string(v[k]) + " outside its domain");
    }
  }
}

bool is_subvaluation(const Valuation& sub, const Valuation& v) {
  if (sub.size() != v.size()) {
    throw InvalidInstance("sub-valuation test on valuations of different "
                          "lengths");
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v.is_unknown(k) && sub[k] != v[k]) return false;
  }
  return true;
}

std::uint64_t completion_count(const Valuation& v,
                               std::span<const Domain> domains) {
  check_valuation(v, domains);
  std::uint64_t n = 1;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v.is_unknown(k)) continue;
    const std::uint64_t s = domains[k].size();
    if (n > std::numeric_limits<std::uint64_t>::max() / s) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= s;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Completions

namespace {

std::vector<std::size_t> sizes_of(std::span<const Domain> domains) {
  std::vector<std::size_t> out;
  out.reserve(domains.size());
  for (const Domain& d : domains) out.push_back(d.size());
  return out;
}

}  // namespace

Completions::Completions(Valuation v, std::vector<std::size_t> domain_sizes)
    : start_(std::move(v)), sizes_(std::move(domain_sizes)) {
  if (start_.size() != sizes_.size()) {
    throw InvalidInstance("valuation length does not match domain count");
  }
  for (std::size_t k = 0; k < start_.size(); ++k) {
    if (start_.is_unknown(k)) {
      free_.push_back(k);
      start_.assign(k, 0);
    }
  }
}

Completions::Completions(const Valuation& v, std::span<const Domain> domains)
    : Completions(v, sizes_of(domains)) {}

Completions::iterator::iterator(const Completions* owner, Valuation start)
    : owner_(owner), current_(std::move(start)), done_(false) {}

Completions::iterator& Completions::iterator::operator++() {
  for (std::size_t k : owner_->free_) {
    const Value next = current_[k] + 1;
    if (static_cast<std::size_t>(next) < owner_->sizes_[k]) {
      current_.assign(k, next);
      return *this;
    }
    current_.assign(k, 0);
  }
  done_ = true;
  return *this;
}

// ---------------------------------------------------------------------------
// DiscreteDistribution

DiscreteDistribution::DiscreteDistribution(std::vector<double> weights)
    : probs_(std::move(weights)) {
  if (probs_.empty()) throw InvalidInstance("empty distribution");
  double total = 0.0;
  for (double w : probs_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInstance("distribution entries must be finite and "
                            "non-negative");
    }
    total += w;
  }
  if (total <= 0.0) throw InvalidInstance("distribution has zero mass");
  original_mass_ = total;
  // Tables that already sum to one up to rounding are kept verbatim.
  if (std::abs(total - 1.0) > 1e-12) {
    for (double& w : probs_) w /= total;
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t size) {
  return DiscreteDistribution(std::vector<double>(size, 1.0 / size));
}

DiscreteDistribution DiscreteDistribution::point_mass(std::size_t size,
                                                      Value at) {
  if (at < 0 || static_cast<std::size_t>(at) >= size) {
    throw InvalidInstance("point mass outside domain");
  }
  std::vector<double> p(size, 0.0);
  p[at] = 1.0;
  return DiscreteDistribution(std::move(p));
}

DiscreteDistribution DiscreteDistribution::bernoulli(double p_true) {
  if (!(p_true >= 0.0 && p_true <= 1.0)) {
    throw InvalidInstance("probability outside [0,1]");
  }
  return DiscreteDistribution({1.0 - p_true, p_true});
}

const char* to_string(Answer a) {
  switch (a) {
    case Answer::False:
      return "0";
    case Answer::True:
      return "1";
    case Answer::Unknown:
      return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(std::vector<Domain> domains,
                   std::vector<DiscreteDistribution> dists,
                   Domain output_domain)
    : domains_(std::move(domains)),
      dists_(std::move(dists)),
      output_domain_(std::move(output_domain)) {
  if (domains_.empty()) throw InvalidInstance("instance has no variables");
  if (dists_.size() != domains_.size()) {
    throw InvalidInstance("need one distribution per variable");
  }
  for (std::size_t k = 0; k < domains_.size(); ++k) {
    if (dists_[k].size() != domains_[k].size()) {
      throw InvalidInstance("distribution " + std::to_string(k) + " has " +
                            std::to_string(dists_[k].size()) +
                            " entries for a domain of size " +
                            std::to_string(domains_[k].size()));
    }
  }
}

Instance Instance::with_dist(std::size_t k, DiscreteDistribution d) const {
  std::vector<DiscreteDistribution> dists = dists_;
  dists.at(k) = std::move(d);
  return Instance(domains_, std::move(dists), output_domain_);
}

}  // namespace dpnl
