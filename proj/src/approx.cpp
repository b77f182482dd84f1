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

#include "dpnl/approx.hpp"

#include <string>

namespace dpnl {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidInstance(std::string(what) + " must be a positive number");
  }
}

}  // namespace

StopPolicy StopPolicy::eps_multiplicative(double eps) {
  require_positive(eps, "epsilon");
  return StopPolicy(Kind::kEpsMultiplicative, eps);
}

StopPolicy StopPolicy::eps_additive(double eps) {
  require_positive(eps, "epsilon");
  return StopPolicy(Kind::kEpsAdditive, eps);
}

StopPolicy StopPolicy::time_budget(double seconds) {
  require_positive(seconds, "time budget");
  return StopPolicy(Kind::kTimeBudget, seconds);
}

StopPolicy StopPolicy::exhaustive() { return StopPolicy(Kind::kExhaustive, 0.0); }

bool StopPolicy::should_stop(const Bounds& b, double elapsed_seconds) const {
  switch (kind_) {
    case Kind::kEpsMultiplicative:
      return b.up <= b.low * (1.0 + param_) * (1.0 + param_);
    case Kind::kEpsAdditive:
      return b.up - b.low <= param_;
    case Kind::kTimeBudget:
      return elapsed_seconds >= param_;
    case Kind::kExhaustive:
      return false;
  }
  return false;
}

}  // namespace dpnl
