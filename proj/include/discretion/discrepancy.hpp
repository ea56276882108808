// Copyright 2026 The Discretion Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discretion/priority.hpp"

namespace discretion {

// Rank key with infinite sentinels. Sentinels order against everything but
// never participate in arithmetic; a +inf key ties only with another +inf
// key (likewise -inf).
class RankKey {
 public:
  enum class Kind { NegInf = -1, Finite = 0, PosInf = 1 };

  constexpr RankKey() = default;
  static constexpr RankKey finite(double v) {
    return RankKey(Kind::Finite, v);
  }
  static constexpr RankKey pos_inf() { return RankKey(Kind::PosInf, 0.0); }
  static constexpr RankKey neg_inf() { return RankKey(Kind::NegInf, 0.0); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  // Meaningful only when finite.
  constexpr double finite_value() const { return value_; }

  friend constexpr bool operator<(RankKey a, RankKey b) {
    if (a.kind_ != b.kind_)
      return static_cast<int>(a.kind_) < static_cast<int>(b.kind_);
    return a.kind_ == Kind::Finite && a.value_ < b.value_;
  }
  friend constexpr bool operator==(RankKey a, RankKey b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Kind::Finite || a.value_ == b.value_;
  }

 private:
  constexpr RankKey(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

// A profile reduced to orderable rank keys. no_data principles are absent.
struct PrincipleRanking {
  std::map<std::string, RankKey> ranks;
  std::string provenance;  // annotator id of the originating profile
};

// Normalized Kendall tau-b rank distance with exact pair counts. value is
// nullopt when either side is entirely tied (zero denominator).
struct DiscrepancyScore {
  std::optional<double> value;  // (1 - tau_b) / 2
  double tau_b = 0.0;           // meaningful when value is set
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;     // pairs tied in x (includes tied_both)
  std::int64_t tied_y = 0;     // pairs tied in y (includes tied_both)
  std::int64_t tied_both = 0;  // pairs tied in both
};

// Finite weights keep their values as keys; always_top maps to +inf,
// always_bottom to -inf, no_data is omitted.
PrincipleRanking rank_profile(const PriorityProfile& profile);

// Tau-b distance between two aligned rank vectors via an O(n log n)
// merge-count; counts are exact. Throws DataError when n < 2.
DiscrepancyScore kendall_tau_b_distance(std::span<const RankKey> xs,
                                        std::span<const RankKey> ys);

// Discretion discrepancy between two profiles: rank both, intersect on
// principles ranked in both, and take the tau-b distance. Throws DataError
// when fewer than two principles are shared.
DiscrepancyScore discretion_discrepancy(const PriorityProfile& profile_a,
                                        const PriorityProfile& profile_b);

}  // namespace discretion
