//
// Copyright 2026 The ldpkm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "ldpkm/privacy_budget.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "ldpkm/point_io.h"

namespace ldpkm {

Rational ExactRational(double v) {
  // Every finite double is m * 2^e with integer m.
  int exp = 0;
  const double frac = std::frexp(v, &exp);
  const auto mant = static_cast<int64_t>(std::ldexp(frac, 53));
  exp -= 53;
  Rational r(mant);
  using boost::multiprecision::cpp_int;
  if (exp > 0) {
    r *= Rational(cpp_int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(cpp_int(1) << -exp);
  }
  return r;
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!std::isfinite(epsilon) || !std::isfinite(delta)) {
    return absl::InvalidArgumentError("budget must be finite");
  }
  return Create(ExactRational(epsilon), ExactRational(delta));
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(Rational epsilon,
                                                    Rational delta) {
  if (epsilon <= 0) return absl::InvalidArgumentError("epsilon must be > 0");
  if (delta < 0 || delta >= 1) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  return PrivacyBudget(std::move(epsilon), std::move(delta));
}

PrivacyBudget PrivacyBudget::Scaled(int64_t num, int64_t den) const {
  const Rational f(num, den);
  return PrivacyBudget(epsilon_ * f, delta_ * f);
}

PrivacyBudget PrivacyBudget::ScaledEpsilon(int64_t num, int64_t den) const {
  return PrivacyBudget(epsilon_ * Rational(num, den), delta_);
}

PrivacyBudget PrivacyBudget::WithDelta(const Rational& delta) const {
  return PrivacyBudget(epsilon_, delta);
}

PrivacyBudget PrivacyBudget::WithoutDelta() const {
  return PrivacyBudget(epsilon_, Rational(0));
}

absl::StatusOr<PrivacyBudget> Compose(std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    return absl::InvalidArgumentError("compose needs at least one budget");
  }
  Rational e(0), d(0);
  for (const auto& b : budgets) {
    e += b.exact_epsilon();
    d += b.exact_delta();
  }
  if (d >= 1) return absl::OutOfRangeError("composed delta reaches 1");
  return PrivacyBudget::Create(e, d);
}

void BudgetLedger::Charge(std::string step, const PrivacyBudget& budget,
                          std::string note) {
  entries_.push_back({std::move(step), budget, std::move(note)});
}

void BudgetLedger::ChargeAll(const std::string& prefix,
                             std::span<const LedgerEntry> entries) {
  for (const auto& e : entries) {
    Charge(absl::StrCat(prefix, e.step), e.budget, e.note);
  }
}

Rational BudgetLedger::total_epsilon() const {
  Rational s(0);
  for (const auto& e : entries_) s += e.budget.exact_epsilon();
  return s;
}

Rational BudgetLedger::total_delta() const {
  Rational s(0);
  for (const auto& e : entries_) s += e.budget.exact_delta();
  return s;
}

bool BudgetLedger::FitsWithin(const PrivacyBudget& cap) const {
  return total_epsilon() <= cap.exact_epsilon() &&
         total_delta() <= cap.exact_delta();
}

std::string BudgetLedger::ToCsv() const {
  std::string out = "step,epsilon,delta,note\n";
  for (const auto& e : entries_) {
    absl::StrAppend(&out, e.step, ",", FormatDouble(e.budget.epsilon()), ",",
                    FormatDouble(e.budget.delta()), ",", e.note, "\n");
  }
  absl::StrAppend(&out, "total,", FormatDouble(total_epsilon().convert_to<double>()),
                  ",", FormatDouble(total_delta().convert_to<double>()), ",\n");
  return out;
}

}  // namespace ldpkm
