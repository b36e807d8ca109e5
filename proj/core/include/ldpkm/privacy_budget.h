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

// (epsilon, delta) budgets with exact composition, and the ledger a run
// charges its invocations against.

#ifndef LDPKM_PRIVACY_BUDGET_H_
#define LDPKM_PRIVACY_BUDGET_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "boost/multiprecision/cpp_int.hpp"

namespace ldpkm {

using Rational = boost::multiprecision::cpp_rational;

// Exact rational value of a finite double.
Rational ExactRational(double v);

class PrivacyBudget {
 public:
  // epsilon > 0, 0 <= delta < 1.
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);
  static absl::StatusOr<PrivacyBudget> Create(Rational epsilon, Rational delta);

  double epsilon() const { return epsilon_.convert_to<double>(); }
  double delta() const { return delta_.convert_to<double>(); }
  const Rational& exact_epsilon() const { return epsilon_; }
  const Rational& exact_delta() const { return delta_; }

  // (epsilon * num / den, delta * num / den), exactly.
  PrivacyBudget Scaled(int64_t num, int64_t den) const;
  PrivacyBudget ScaledEpsilon(int64_t num, int64_t den) const;
  PrivacyBudget WithDelta(const Rational& delta) const;
  PrivacyBudget WithoutDelta() const;

  bool FitsWithin(const PrivacyBudget& cap) const {
    return epsilon_ <= cap.epsilon_ && delta_ <= cap.delta_;
  }
  friend bool operator==(const PrivacyBudget& a, const PrivacyBudget& b) {
    return a.epsilon_ == b.epsilon_ && a.delta_ == b.delta_;
  }

 private:
  PrivacyBudget(Rational e, Rational d)
      : epsilon_(std::move(e)), delta_(std::move(d)) {}
  Rational epsilon_;
  Rational delta_;
};

// Basic composition: (sum epsilon_i, sum delta_i). Requires a non-empty input.
absl::StatusOr<PrivacyBudget> Compose(std::span<const PrivacyBudget> budgets);

struct LedgerEntry {
  std::string step;
  PrivacyBudget budget;
  std::string note;
};

// Append-only record of every charged invocation.
class BudgetLedger {
 public:
  void Charge(std::string step, const PrivacyBudget& budget,
              std::string note = "");
  void ChargeAll(const std::string& prefix, std::span<const LedgerEntry> entries);
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  // Composed total; zero budget when empty.
  Rational total_epsilon() const;
  Rational total_delta() const;
  bool FitsWithin(const PrivacyBudget& cap) const;
  // Header "step,epsilon,delta,note".
  std::string ToCsv() const;

 private:
  std::vector<LedgerEntry> entries_;
};

}  // namespace ldpkm

#endif  // LDPKM_PRIVACY_BUDGET_H_
