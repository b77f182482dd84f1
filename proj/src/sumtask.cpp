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

#include "dpnl/sumtask.hpp"

#include <string>

namespace dpnl {

namespace {

Value pow10(int n) {
  Value p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

}  // namespace

SumInstanceSpec SumInstanceSpec::uniform(int n) {
  SumInstanceSpec spec;
  spec.n = n;
  if (n >= 1 && n <= kMaxSumDigits) {
    spec.digit_dists.assign(2 * static_cast<std::size_t>(n),
                            DiscreteDistribution::uniform(10));
  }
  spec.validate();
  return spec;
}

void SumInstanceSpec::validate() const {
  if (n < 1 || n > kMaxSumDigits) {
    throw InvalidInstance("digit count must be in 1.." +
                          std::to_string(kMaxSumDigits));
  }
  if (digit_dists.size() != m()) {
    throw InvalidInstance("expected " + std::to_string(m()) +
                          " digit distributions, got " +
                          std::to_string(digit_dists.size()));
  }
  for (const DiscreteDistribution& d : digit_dists) {
    if (d.size() != 10) {
      throw InvalidInstance("digit distributions must have 10 entries");
    }
  }
}

std::size_t SumInstanceSpec::output_size() const {
  return 2 * static_cast<std::size_t>(pow10(n));
}

Value addition(std::span<const Value> digits) {
  if (digits.empty() || digits.size() % 2 != 0) {
    throw InvalidInstance("addition needs an even, non-zero number of digits");
  }
  const std::size_t n = digits.size() / 2;
  if (n > static_cast<std::size_t>(kMaxSumDigits)) {
    throw InvalidInstance("too many digits");
  }
  for (Value d : digits) {
    if (d < 0 || d > 9) {
      throw InvalidInstance("digit " + std::to_string(d) + " outside 0..9");
    }
  }
  Value result = 0;
  Value place = 1;
  Value carry = 0;
  for (std::size_t i = n; i-- > 0;) {
    const Value d = carry + digits[i] + digits[n + i];
    result += (d % 10) * place;
    carry = d / 10;
    place *= 10;
  }
  return result + carry * place;
}

AdditionOracle::AdditionOracle(int n)
    : n_(n), width_(static_cast<std::size_t>(n)) {
  if (n < 1 || n > kMaxSumDigits) {
    throw InvalidInstance("digit count must be in 1.." +
                          std::to_string(kMaxSumDigits));
  }
  limit_ = 2 * pow10(n);
  auto digits = std::make_shared<std::vector<std::uint32_t>>(
      static_cast<std::size_t>(limit_));
  for (Value r = 0; r < limit_; ++r) {
    std::uint32_t packed = 0;
    Value rest = r;
    for (int j = 0; j <= n; ++j) {
      packed |= static_cast<std::uint32_t>(rest % 10) << (4 * j);
      rest /= 10;
    }
    (*digits)[static_cast<std::size_t>(r)] = packed;
  }
  digits_ = std::move(digits);
}

VariableOrder right_to_left_order(int n) {
  if (n < 1) throw InvalidInstance("digit count must be at least 1");
  std::vector<std::size_t> perm;
  perm.reserve(2 * static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    perm.push_back(static_cast<std::size_t>(i));
    perm.push_back(static_cast<std::size_t>(n + i));
  }
  return VariableOrder::sequential(std::move(perm));
}

Oracle SumTask::erased_oracle() const {
  return Oracle(oracle, /*claims_complete=*/false, "addition");
}

SumTask build_sum_instance(const SumInstanceSpec& spec) {
  spec.validate();
  std::vector<Domain> domains(spec.m(), Domain(10));
  const Domain out(spec.output_size());
  Instance inst(domains, spec.digit_dists, out);
  SymbolicFunction f(std::move(domains), out,
                     [](std::span<const Value> x) { return addition(x); });
  return SumTask{spec, std::move(inst), std::move(f), AdditionOracle(spec.n),
                 right_to_left_order(spec.n)};
}

std::vector<double> sum_distribution_by_convolution(
    const SumInstanceSpec& spec) {
  spec.validate();
  if (spec.n > 4) {
    throw SizeLimitExceeded("convolution reference limited to N <= 4");
  }
  const std::size_t n = static_cast<std::size_t>(spec.n);
  auto summand = [&](std::size_t first) {
    std::vector<double> dist{1.0};
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = spec.digit_dists[first + i].probs();
      std::vector<double> next(dist.size() * 10, 0.0);
      for (std::size_t v = 0; v < dist.size(); ++v) {
        for (std::size_t d = 0; d < 10; ++d) next[v * 10 + d] += dist[v] * p[d];
      }
      dist = std::move(next);
    }
    return dist;
  };
  const std::vector<double> a = summand(0);
  const std::vector<double> b = summand(n);
  std::vector<double> out(spec.output_size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace dpnl
