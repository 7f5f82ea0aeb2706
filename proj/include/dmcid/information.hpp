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

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"

namespace dmcid {

/// Divergence value returned when p puts mass where q has none.
inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

/// D(p || q) in nats, with 0 log(0/q) = 0. Returns kInfiniteDivergence on
/// support mismatch rather than throwing.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "kl_divergence operands differ in length");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfiniteDivergence;
    d += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave tiny negatives when p == q.
  return d > 0.0 ? d : 0.0;
}

inline double kl_divergence(const Distribution& p, const Distribution& q) {
  return kl_divergence(p.probs(), q.probs());
}

/// h_b(t) = -t ln t - (1-t) ln(1-t).
inline double binary_entropy(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -t * std::log(t) - (1.0 - t) * std::log1p(-t);
}

/// Sum-of-absolute-differences distance (no 1/2 factor).
inline double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "total_variation operands differ in length");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

/// Output marginal P_Y(y) = sum_x P_X(x) W(y|x).
inline std::vector<double> output_marginal(std::span<const double> input, const Channel& ch) {
  if (input.size() != ch.input_size()) throw Error(ErrorCode::LengthMismatch, "input distribution size");
  std::vector<double> out(ch.output_size(), 0.0);
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    if (input[x] == 0.0) continue;
    const auto r = ch.row(x);
    for (std::size_t y = 0; y < r.size(); ++y) out[y] += input[x] * r[y];
  }
  return out;
}

/// I(P_X; W) in nats.
inline double mutual_information(const Distribution& input, const Channel& ch) {
  if (input.size() != ch.input_size()) throw Error(ErrorCode::LengthMismatch, "input distribution size");
  const auto py = output_marginal(input.probs(), ch);
  double mi = 0.0;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    if (input[x] == 0.0) continue;
    mi += input[x] * kl_divergence(ch.row(x), py);
  }
  return mi;
}

}  // namespace dmcid
