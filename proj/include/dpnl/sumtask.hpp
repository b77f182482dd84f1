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

// Multi-digit addition: two N-digit numbers given as 2N independent digit
// variables, their sum, and a digit-by-digit oracle for it.

#ifndef DPNL_SUMTASK_HPP_
#define DPNL_SUMTASK_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dpnl/core.hpp"
#include "dpnl/dpnl.hpp"
#include "dpnl/oracle.hpp"

namespace dpnl {

inline constexpr int kMaxSumDigits = 6;

// Digits are ordered d_1..d_N (first number, most significant first)
// followed by d_{N+1}..d_{2N} (second number).
struct SumInstanceSpec {
  int n = 1;
  std::vector<DiscreteDistribution> digit_dists;  // 2N tables of 10 entries

  static SumInstanceSpec uniform(int n);
  // Throws InvalidInstance unless 1 <= n <= kMaxSumDigits and there are 2N
  // tables of size 10.
  void validate() const;

  std::size_t m() const { return 2 * static_cast<std::size_t>(n); }
  // 2 * 10^N.
  std::size_t output_size() const;
};

// n1 + n2 by right-to-left carry addition over 2N digits.
Value addition(std::span<const Value> digits);

namespace detail {

// next[carry][a + b][digit of r]: the outgoing carry when the result digit
// matches, 2 when it does not.
struct AddStepTable {
  std::uint8_t next[2][19][10];
  constexpr AddStepTable() : next{} {
    for (int c = 0; c < 2; ++c) {
      for (int s = 0; s < 19; ++s) {
        for (int rd = 0; rd < 10; ++rd) {
          next[c][s][rd] = (c + s) % 10 == rd
                               ? static_cast<std::uint8_t>((c + s) / 10)
                               : std::uint8_t{2};
        }
      }
    }
  }
};
inline constexpr AddStepTable kAddStep{};

}  // namespace detail

class AdditionOracle {
 public:
  explicit AdditionOracle(int n);

  int n() const { return n_; }

  // Scans digit pairs from the least significant: unknown at the first pair
  // with an unknown digit, 0 at the first result digit that differs from r,
  // and after the last pair 1 iff the final carry equals r's leading digit.
  OracleVerdict query(const Valuation& v, Value r) const {
    return {answer(v, r), {}, {}};
  }

  Answer answer(const Valuation& v, Value r) const {
    if (r < 0 || r >= limit_) return Answer::False;
    const Value* cells = v.cells().data();
    const std::uint32_t digits = (*digits_)[static_cast<std::size_t>(r)];
    switch (n_) {
      case 1: return scan<1>(cells, digits);
      case 2: return scan<2>(cells, digits);
      case 3: return scan<3>(cells, digits);
      case 4: return scan<4>(cells, digits);
      case 5: return scan<5>(cells, digits);
      default: return scan<6>(cells, digits);
    }
  }

  // Incremental form used by the search. A state records how many low pairs
  // of a valuation are complete and match r, and the carry out of them;
  // extend() answers for the valuation with one more cell assigned at O(1)
  // amortized cost. Both return what answer() returns.
  struct State {
    std::uint32_t digits = 0;    // digits of r above the verified pairs
    std::uint16_t verified = 0;  // pairs checked
    std::uint16_t carry = 0;
  };

  std::pair<State, Answer> start(const Valuation& v, Value r) const {
    if (r < 0 || r >= limit_) return {State{}, Answer::False};
    State st{(*digits_)[static_cast<std::size_t>(r)], 0, 0};
    const Answer a = advance(st, v.cells().data());
    return {st, a};
  }

  // `st` belongs to v without cell k and its answer was unknown; on return
  // it belongs to v.
  Answer extend(State& st, const Valuation& v, std::size_t k) const {
    const std::size_t n = width_;
    const std::size_t pair = k < n ? n - 1 - k : 2 * n - 1 - k;
    // The lowest open pair is still open.
    if (pair != st.verified) return Answer::Unknown;
    return advance(st, v.cells().data());
  }

 private:
  Answer advance(State& st, const Value* cells) const {
    const std::size_t n = width_;
    std::size_t j = st.verified;
    std::uint32_t carry = st.carry;
    std::uint32_t digits = st.digits;
    Answer out;
    for (;; ++j) {
      if (j == n) {
        out = carry == digits ? Answer::True : Answer::False;
        break;
      }
      const Value a = cells[n - 1 - j];
      const Value b = cells[2 * n - 1 - j];
      if ((a | b) < 0) {
        out = Answer::Unknown;
        break;
      }
      carry = detail::kAddStep.next[carry][a + b][digits & 15u];
      if (carry == 2) return Answer::False;
      digits >>= 4;
    }
    st.verified = static_cast<std::uint16_t>(j);
    st.carry = static_cast<std::uint16_t>(carry);
    st.digits = digits;
    return out;
  }

  // `digits` holds the N+1 digits of r, least significant in the low four
  // bits.
  template <int N>
  static Answer scan(const Value* cells, std::uint32_t digits) {
    std::uint32_t carry = 0;
#pragma GCC unroll 8
    for (int j = 0; j < N; ++j) {
      const Value a = cells[N - 1 - j];
      const Value b = cells[2 * N - 1 - j];
      if ((a | b) < 0) return Answer::Unknown;
      carry = detail::kAddStep.next[carry][a + b][(digits >> (4 * j)) & 15u];
      if (carry == 2) return Answer::False;
    }
    return carry == (digits >> (4 * N)) ? Answer::True : Answer::False;
  }

  int n_;
  // n_ again, typed so that writes to Value cells cannot alias it.
  std::size_t width_;
  std::shared_ptr<const std::vector<std::uint32_t>> digits_;
  Value limit_;
};

// Positions N, 2N, N-1, 2N-1, ..., 1, N+1 (given 0-based).
VariableOrder right_to_left_order(int n);

struct SumTask {
  SumInstanceSpec spec;
  Instance instance;
  SymbolicFunction function;
  AdditionOracle oracle;
  VariableOrder order;

  // Type-erased view of `oracle` for the generic checkers.
  Oracle erased_oracle() const;
};

SumTask build_sum_instance(const SumInstanceSpec& spec);

// Reference output distribution: distribution of each summand by a
// positional digit DP, then their convolution. Independent of the oracle
// search. Throws SizeLimitExceeded for N > 4.
std::vector<double> sum_distribution_by_convolution(const SumInstanceSpec& spec);

}  // namespace dpnl

#endif  // DPNL_SUMTASK_HPP_
