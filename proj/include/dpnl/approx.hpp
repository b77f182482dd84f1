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

// Anytime approximate inference with certified bounds.
//
// The search keeps a frontier of unresolved partial valuations. Popping a
// valuation and asking the oracle either moves its prior mass into the
// lower bound (answer 1), removes it from the upper bound (answer 0), or
// splits it on one unknown variable. At every step the frontier masses,
// the lower bound and the rejected mass 1 - up sum to one.

#ifndef DPNL_APPROX_HPP_
#define DPNL_APPROX_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <vector>

#include "dpnl/core.hpp"
#include "dpnl/dpnl.hpp"
#include "dpnl/oracle.hpp"

namespace dpnl {

struct Bounds {
  double low = 0.0;
  double up = 1.0;

  // Geometric mean of the bounds; 0 while low is 0.
  double estimate() const { return low > 0.0 ? std::sqrt(low * up) : 0.0; }
  double gap() const { return up - low; }
};

class StopPolicy {
 public:
  enum class Kind { kEpsMultiplicative, kEpsAdditive, kTimeBudget, kExhaustive };

  // Stop once up <= low * (1 + eps)^2.
  static StopPolicy eps_multiplicative(double eps);
  // Stop once up - low <= eps.
  static StopPolicy eps_additive(double eps);
  // Stop once `seconds` of wall time have elapsed.
  static StopPolicy time_budget(double seconds);
  // Never stop early.
  static StopPolicy exhaustive();

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }

  bool should_stop(const Bounds& b, double elapsed_seconds) const;

 private:
  StopPolicy(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

class ExploreHeuristic {
 public:
  enum class Kind { kMaxProbability, kFifo, kRandom };

  // Highest prior mass first; ties go to the lexicographically smallest
  // valuation (unknown cells sort first).
  static ExploreHeuristic max_probability() {
    return ExploreHeuristic(Kind::kMaxProbability, 0);
  }
  static ExploreHeuristic fifo() { return ExploreHeuristic(Kind::kFifo, 0); }
  // Uniform choice among frontier entries.
  static ExploreHeuristic random(std::uint64_t seed) {
    return ExploreHeuristic(Kind::kRandom, seed);
  }

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

 private:
  ExploreHeuristic(Kind kind, std::uint64_t seed) : kind_(kind), seed_(seed) {}
  Kind kind_;
  std::uint64_t seed_;
};

struct BoundSnapshot {
  std::uint64_t iteration = 0;
  double low = 0.0;
  double up = 1.0;
  double frontier_mass = 1.0;
  std::size_t frontier_size = 1;
};

struct ApproxResult {
  Bounds bounds;
  QueryStats stats;
  std::uint64_t iterations = 0;
  // The loop ended because no unresolved valuation was left.
  bool exhausted = false;
};

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct FrontierEntry {
  Valuation v;
  double mass;
  double log_mass;
};

class Frontier {
 public:
  explicit Frontier(const ExploreHeuristic& h) : kind_(h.kind()), rng_(h.seed()) {}

  bool empty() const { return size() == 0; }
  std::size_t size() const { return entries_.size() - head_; }

  void push(FrontierEntry e) {
    entries_.push_back(std::move(e));
    if (kind_ == ExploreHeuristic::Kind::kMaxProbability) {
      std::push_heap(entries_.begin(), entries_.end(), HeapLess{});
    }
  }

  FrontierEntry pop() {
    switch (kind_) {
      case ExploreHeuristic::Kind::kMaxProbability: {
        std::pop_heap(entries_.begin(), entries_.end(), HeapLess{});
        break;
      }
      case ExploreHeuristic::Kind::kFifo: {
        FrontierEntry e = std::move(entries_[head_++]);
        if (head_ > 1024 && head_ * 2 > entries_.size()) {
          entries_.erase(entries_.begin(),
                         entries_.begin() + static_cast<std::ptrdiff_t>(head_));
          head_ = 0;
        }
        return e;
      }
      case ExploreHeuristic::Kind::kRandom: {
        const std::size_t i = std::uniform_int_distribution<std::size_t>(
            0, entries_.size() - 1)(rng_);
        std::swap(entries_[i], entries_.back());
        break;
      }
    }
    FrontierEntry e = std::move(entries_.back());
    entries_.pop_back();
    return e;
  }

 private:
  // Max-heap on log mass; among equal masses the smallest valuation is on
  // top.
  struct HeapLess {
    bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
      if (a.log_mass != b.log_mass) return a.log_mass < b.log_mass;
      return a.v > b.v;
    }
  };

  ExploreHeuristic::Kind kind_;
  std::mt19937_64 rng_;
  std::vector<FrontierEntry> entries_;
  std::size_t head_ = 0;  // FIFO read position
};

}  // namespace detail

// Best-first exploration with bounds. When `trace` is non-null it receives
// the initial bounds (0, 1) and one snapshot after every iteration. At most
// `max_iterations` valuations are popped.
template <OracleLike O>
ApproxResult approx_dpnl(
    const Instance& inst, Value o, const O& oracle, const StopPolicy& stop,
    const ExploreHeuristic& h, const VariableOrder& order,
    std::vector<BoundSnapshot>* trace = nullptr,
    std::uint64_t max_iterations = std::numeric_limits<std::uint64_t>::max()) {
  const Valuation root = fresh_valuation(inst.m());
  detail::check_query(inst, o, root, order);
  const auto t0 = std::chrono::steady_clock::now();

  detail::Frontier frontier(h);
  frontier.push({root, 1.0, 0.0});
  detail::CompensatedSum low, rejected, frontier_mass;
  frontier_mass.add(1.0);

  ApproxResult out;
  // Exact bounds only tighten; carrying the previous pair keeps rounding in
  // the running sums from loosening them by an ulp.
  Bounds last;
  auto current_bounds = [&] {
    Bounds b;
    b.low = std::max(last.low, std::clamp(low.value(), 0.0, 1.0));
    b.up = std::min(last.up, std::clamp(1.0 - rejected.value(), 0.0, 1.0));
    if (b.low > b.up) {
      b.up = std::min(last.up, b.low);
      b.low = b.up;
    }
    last = b;
    return b;
  };
  auto snapshot = [&] {
    if (!trace) return;
    const Bounds b = current_bounds();
    trace->push_back({out.iterations, b.low, b.up, frontier_mass.value(),
                      frontier.size()});
  };
  snapshot();

  while (!frontier.empty() &&
         !stop.should_stop(current_bounds(), detail::seconds_since(t0)) &&
         out.iterations < max_iterations) {
    detail::FrontierEntry e = frontier.pop();
    frontier_mass.add(-e.mass);
    ++out.iterations;
    ++out.stats.oracle_calls;
    const OracleVerdict verdict = oracle.query(e.v, o);
    if (verdict.answer == Answer::True) {
      ++out.stats.leaves_true;
      low.add(e.mass);
    } else if (verdict.answer == Answer::False) {
      ++out.stats.leaves_false;
      rejected.add(e.mass);
    } else {
      ++out.stats.branch_nodes;
      const std::size_t k = order.choose(e.v, verdict);
      const auto probs = inst.dist(k).probs();
      for (std::size_t y = 0; y < probs.size(); ++y) {
        const double p = probs[y];
        const double mass = e.mass * p;
        const double log_mass =
            p > 0.0 ? e.log_mass + std::log(p)
                    : -std::numeric_limits<double>::infinity();
        frontier_mass.add(mass);
        frontier.push({e.v.with(k, static_cast<Value>(y)), mass, log_mass});
      }
    }
    snapshot();
  }

  out.bounds = current_bounds();
  out.exhausted = frontier.empty();
  out.stats.wall_time = detail::seconds_since(t0);
  return out;
}

template <OracleLike O>
ApproxResult approx_dpnl(const Instance& inst, Value o, const O& oracle,
                         const StopPolicy& stop, const ExploreHeuristic& h) {
  return approx_dpnl(inst, o, oracle, stop, h,
                     VariableOrder::identity(inst.m()));
}

// Bounds after each of the first `max_steps` iterations of an unbounded run,
// preceded by the initial (0, 1).
template <OracleLike O>
std::vector<BoundSnapshot> bound_trace(const Instance& inst, Value o,
                                       const O& oracle,
                                       const ExploreHeuristic& h,
                                       std::uint64_t max_steps,
                                       const VariableOrder& order) {
  if (max_steps == 0) throw InvalidInstance("bound trace needs max_steps >= 1");
  std::vector<BoundSnapshot> trace;
  approx_dpnl(inst, o, oracle, StopPolicy::exhaustive(), h, order, &trace,
              max_steps);
  return trace;
}

}  // namespace dpnl

#endif  // DPNL_APPROX_HPP_
