/*
 * Copyright (C) 2026 The dmcid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dmcid/bounds.hpp"

namespace dmcid::testing {

// Maximum over the full product of per-channel relabelings.
inline double brute_force_bound(const std::vector<Channel>& channels, double delta) {
  const auto g = gaps(channels);
  const double num = std::log(1.0 / (2.4 * delta));
  auto term = [&](double kl) { return kl == kInfiniteDivergence ? 0.0 : num / kl; };
  const Channel& best = channels[g.best];
  std::vector<Relabeling> all;
  Relabeling pi = Relabeling::identity(best.input_size(), best.output_size());
  do {
    std::iota(pi.output.begin(), pi.output.end(), std::size_t{0});
    do all.push_back(pi);
    while (std::next_permutation(pi.output.begin(), pi.output.end()));
  } while (std::next_permutation(pi.input.begin(), pi.input.end()));

  std::vector<std::size_t> sub;
  for (std::size_t a = 0; a < channels.size(); ++a)
    if (a != g.best) sub.push_back(a);
  std::vector<std::size_t> idx(sub.size(), 0);
  double best_value = -1.0;
  for (;;) {
    double total = 0.0, rev = 0.0;
    for (std::size_t i = 0; i < sub.size(); ++i) {
      total += term(kl_row_term(channels[sub[i]], best, all[idx[i]]));
      rev = std::max(rev, kl_reverse_row_term(channels[sub[i]], best, all[idx[i]]));
    }
    best_value = std::max(best_value, total + term(rev));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == all.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  return best_value;
}

}  // namespace dmcid::testing
