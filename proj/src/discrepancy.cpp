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

#include "discretion/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace discretion {

namespace {

// Pairs (i < j) with v[i] == v[j], summed over tie groups: sum t*(t-1)/2.
std::int64_t tied_pairs(std::vector<RankKey> v) {
  std::sort(v.begin(), v.end());
  std::int64_t total = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    std::int64_t t = static_cast<std::int64_t>(j - i);
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

// Counts inversions (strictly descending pairs) in ys by merge sort.
std::int64_t count_inversions(std::vector<RankKey>& ys,
                              std::vector<RankKey>& buf, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(ys, buf, lo, mid) +
                     count_inversions(ys, buf, mid, hi);
  std::size_t a = lo;
  std::size_t b = mid;
  std::size_t k = lo;
  while (a < mid && b < hi) {
    if (ys[b] < ys[a]) {
      inv += static_cast<std::int64_t>(mid - a);
      buf[k++] = ys[b++];
    } else {
      buf[k++] = ys[a++];
    }
  }
  while (a < mid) buf[k++] = ys[a++];
  while (b < hi) buf[k++] = ys[b++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            ys.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

PrincipleRanking rank_profile(const PriorityProfile& profile) {
  PrincipleRanking out;
  out.provenance = profile.annotator_id;
  for (const auto& [id, w] : profile.weights) {
    out.ranks[id] = RankKey::finite(w);
  }
  for (const auto& id : profile.partition.always_top) {
    out.ranks[id] = RankKey::pos_inf();
  }
  for (const auto& id : profile.partition.always_bottom) {
    out.ranks[id] = RankKey::neg_inf();
  }
  return out;
}

DiscrepancyScore kendall_tau_b_distance(std::span<const RankKey> xs,
                                        std::span<const RankKey> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size())
    throw DataError("rank vectors must have equal length");
  if (n < 2)
    throw DataError("tau-b needs at least two ranked principles");

  DiscrepancyScore score;
  const std::int64_t total_pairs =
      static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

  // Sort jointly by (x, y); equal-x runs then give the x and (x,y) tie
  // counts, and inversions of y within the sorted order are exactly the
  // discordant pairs.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (xs[a] < xs[b]) return true;
                     if (xs[b] < xs[a]) return false;
                     return ys[a] < ys[b];
                   });

  std::int64_t tx = 0;
  std::int64_t txy = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i + 1;
      while (j < n && xs[order[j]] == xs[order[i]]) ++j;
      std::int64_t t = static_cast<std::int64_t>(j - i);
      tx += t * (t - 1) / 2;
      std::size_t a = i;
      while (a < j) {
        std::size_t b = a + 1;
        while (b < j && ys[order[b]] == ys[order[a]]) ++b;
        std::int64_t u = static_cast<std::int64_t>(b - a);
        txy += u * (u - 1) / 2;
        a = b;
      }
      i = j;
    }
  }

  std::vector<RankKey> y_sorted_by_x(n);
  for (std::size_t i = 0; i < n; ++i) y_sorted_by_x[i] = ys[order[i]];
  std::vector<RankKey> buf(n);
  std::int64_t discordant = count_inversions(y_sorted_by_x, buf, 0, n);

  std::vector<RankKey> y_copy(ys.begin(), ys.end());
  std::int64_t ty = tied_pairs(std::move(y_copy));

  score.discordant = discordant;
  score.tied_x = tx;
  score.tied_y = ty;
  score.tied_both = txy;
  score.concordant = total_pairs - tx - ty + txy - discordant;

  const std::int64_t denom_x = total_pairs - tx;
  const std::int64_t denom_y = total_pairs - ty;
  if (denom_x == 0 || denom_y == 0) return score;  // all tied: undefined

  score.tau_b = static_cast<double>(score.concordant - score.discordant) /
                std::sqrt(static_cast<double>(denom_x) *
                          static_cast<double>(denom_y));
  score.value = (1.0 - score.tau_b) / 2.0;
  return score;
}

DiscrepancyScore discretion_discrepancy(const PriorityProfile& profile_a,
                                        const PriorityProfile& profile_b) {
  PrincipleRanking ra = rank_profile(profile_a);
  PrincipleRanking rb = rank_profile(profile_b);

  std::vector<RankKey> xs;
  std::vector<RankKey> ys;
  for (const auto& [id, key_a] : ra.ranks) {
    auto it = rb.ranks.find(id);
    if (it == rb.ranks.end()) continue;  // no_data on the other side
    xs.push_back(key_a);
    ys.push_back(it->second);
  }
  if (xs.size() < 2)
    throw DataError(
        "discretion discrepancy needs at least two principles ranked by "
        "both annotators, got " +
        std::to_string(xs.size()));
  return kendall_tau_b_distance(xs, ys);
}

}  // namespace discretion
