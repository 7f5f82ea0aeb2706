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
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "dmcid/capacity.hpp"
#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"
#include "dmcid/information.hpp"
#include "dmcid/sensing.hpp"

namespace dmcid {

/// Input relabeling x -> input[x] and output relabeling y -> output[y].
struct Relabeling {
  std::vector<std::size_t> input;
  std::vector<std::size_t> output;

  static Relabeling identity(std::size_t inputs, std::size_t outputs) {
    Relabeling r;
    r.input.resize(inputs);
    r.output.resize(outputs);
    std::iota(r.input.begin(), r.input.end(), std::size_t{0});
    std::iota(r.output.begin(), r.output.end(), std::size_t{0});
    return r;
  }

  friend bool operator==(const Relabeling&, const Relabeling&) = default;
};

/// max_x D(W_a(pi_y | pi_x(x)) || W_best(.|x)).
inline double kl_row_term(const Channel& a, const Channel& best, const Relabeling& pi) {
  const Channel v = a.permuted(pi.input, pi.output);
  double m = 0.0;
  for (std::size_t x = 0; x < best.input_size(); ++x) m = std::max(m, kl_divergence(v.row(x), best.row(x)));
  return m;
}

/// max_x D(W_best(.|x) || W_a(pi_y | pi_x(x))).
inline double kl_reverse_row_term(const Channel& a, const Channel& best, const Relabeling& pi) {
  const Channel v = a.permuted(pi.input, pi.output);
  double m = 0.0;
  for (std::size_t x = 0; x < best.input_size(); ++x) m = std::max(m, kl_divergence(best.row(x), v.row(x)));
  return m;
}

enum class LowerBoundMode { Joint, Independent };

struct LowerBoundReport {
  double value = 0.0;  ///< expected senses
  std::size_t best = 0;
  std::vector<std::size_t> suboptimal;          ///< channel indices a != best
  std::vector<double> per_channel_terms;        ///< aligned with suboptimal
  double best_channel_term = 0.0;
  std::vector<Relabeling> chosen_permutations;  ///< aligned with suboptimal
  LowerBoundMode mode = LowerBoundMode::Joint;
  bool possibly_suboptimal = false;             ///< Independent mode does not maximize jointly
};

namespace detail {

// Numerator over a KL denominator; a separating (infinite) divergence contributes 0.
inline double lb_term(double numerator, double kl) {
  if (kl == kInfiniteDivergence) return 0.0;
  return numerator / kl;
}

struct RelabelCandidate {
  Relabeling pi;
  double forward = 0.0;  // D_a
  double reverse = 0.0;  // E_a
};

inline std::vector<RelabelCandidate> enumerate_relabelings(const Channel& a, const Channel& best) {
  std::vector<RelabelCandidate> out;
  Relabeling pi = Relabeling::identity(a.input_size(), a.output_size());
  do {
    std::iota(pi.output.begin(), pi.output.end(), std::size_t{0});
    do {
      out.push_back({pi, kl_row_term(a, best, pi), kl_reverse_row_term(a, best, pi)});
    } while (std::next_permutation(pi.output.begin(), pi.output.end()));
  } while (std::next_permutation(pi.input.begin(), pi.input.end()));
  return out;
}

inline double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace detail

/// Lower bound on the expected senses of any algorithm identifying the best
/// channel with probability at least 1 - delta:
///
///   sum_a L / max_x D(W_a(pi_y^a|pi_x^a(x)) || W_*(.|x))
///     + L / max_{a,x} D(W_*(.|x) || W_a(pi_y^a|pi_x^a(x))),   L = ln(1/(2.4 delta)),
///
/// with the relabelings chosen to maximize the whole expression (Joint) or
/// each minimizing its own forward divergence (Independent).
inline LowerBoundReport lower_bound(const std::vector<Channel>& channels, double delta,
                                    LowerBoundMode mode = LowerBoundMode::Joint) {
  if (!(delta > 0.0 && delta < 1.0 / 2.4)) throw Error(ErrorCode::BadDelta, "delta must lie in (0, 1/2.4)");
  if (channels.empty()) throw Error(ErrorCode::EmptySet, "lower_bound needs at least one channel");
  for (const auto& ch : channels)
    if (!ch.same_alphabets(channels.front())) throw Error(ErrorCode::AlphabetMismatch, "alphabet mismatch");
  const std::size_t nx = channels.front().input_size();
  const std::size_t ny = channels.front().output_size();
  if (detail::factorial(nx) * detail::factorial(ny) > 1e6) {
    throw Error(ErrorCode::BadParameter, "relabeling search too large (|X|! |Y|! > 1e6)");
  }

  const GapReport g = gaps(channels);
  if (!g.unique_best) throw Error(ErrorCode::NonUniqueBest, "best channel is not unique");

  LowerBoundReport rep;
  rep.mode = mode;
  rep.best = g.best;
  const double numerator = std::log(1.0 / (2.4 * delta));
  const Channel& best = channels[g.best];

  std::vector<std::vector<detail::RelabelCandidate>> cands;
  for (std::size_t a = 0; a < channels.size(); ++a) {
    if (a == g.best) continue;
    rep.suboptimal.push_back(a);
    cands.push_back(detail::enumerate_relabelings(channels[a], best));
  }
  if (rep.suboptimal.empty()) return rep;

  std::vector<std::size_t> choice(cands.size(), 0);
  if (mode == LowerBoundMode::Independent) {
    rep.possibly_suboptimal = true;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      for (std::size_t c = 1; c < cands[i].size(); ++c) {
        const auto& cur = cands[i][choice[i]];
        const auto& cand = cands[i][c];
        if (cand.forward < cur.forward || (cand.forward == cur.forward && cand.reverse < cur.reverse)) {
          choice[i] = c;
        }
      }
    }
  } else {
    // For a cap M on the shared reverse term, each channel independently takes
    // its smallest forward divergence among relabelings with reverse <= M.
    // Scanning every attained M is exact.
    std::vector<std::vector<std::size_t>> by_reverse(cands.size());
    std::vector<std::vector<std::size_t>> prefix_best(cands.size());
    std::vector<double> caps;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      auto& idx = by_reverse[i];
      idx.resize(cands[i].size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t l, std::size_t r) { return cands[i][l].reverse < cands[i][r].reverse; });
      auto& pb = prefix_best[i];
      pb.resize(idx.size());
      for (std::size_t t = 0; t < idx.size(); ++t) {
        pb[t] = idx[t];
        if (t > 0) {
          const auto prev = pb[t - 1];
          if (!(cands[i][idx[t]].forward < cands[i][prev].forward)) pb[t] = prev;
        }
        caps.push_back(cands[i][idx[t]].reverse);
      }
    }
    std::sort(caps.begin(), caps.end());
    caps.erase(std::unique(caps.begin(), caps.end()), caps.end());

    double best_value = -1.0;
    std::vector<std::size_t> pick(cands.size());
    for (double cap : caps) {
      bool feasible = true;
      double value = detail::lb_term(numerator, cap);
      for (std::size_t i = 0; i < cands.size() && feasible; ++i) {
        const auto& idx = by_reverse[i];
        const auto it = std::upper_bound(idx.begin(), idx.end(), cap, [&](double v, std::size_t c) {
          return v < cands[i][c].reverse;
        });
        if (it == idx.begin()) {
          feasible = false;
          break;
        }
        const auto pos = static_cast<std::size_t>(it - idx.begin()) - 1;
        pick[i] = prefix_best[i][pos];
        value += detail::lb_term(numerator, cands[i][pick[i]].forward);
      }
      if (feasible && value > best_value) {
        best_value = value;
        choice = pick;
      }
    }
  }

  double shared = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i][choice[i]];
    rep.chosen_permutations.push_back(c.pi);
    rep.per_channel_terms.push_back(detail::lb_term(numerator, c.forward));
    shared = std::max(shared, c.reverse);
  }
  rep.best_channel_term = detail::lb_term(numerator, shared);
  rep.value = std::accumulate(rep.per_channel_terms.begin(), rep.per_channel_terms.end(), 0.0) +
              rep.best_channel_term;
  return rep;
}

/// ln(1 + (1-q) q^(q/(1-q))): capacity of the Z-channel [[1,0],[q,1-q]].
inline double z_channel_capacity(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::BadParameter, "q must lie in (0,1)");
  return std::log1p((1.0 - q) * std::pow(q, q / (1.0 - q)));
}

/// Crossover p in (0, 1/2] with ln 2 - h_b(p) = target, for 0 <= target < ln 2.
inline double bsc_crossover_for_capacity(double target) {
  if (!(target >= 0.0 && target < std::log(2.0))) {
    throw Error(ErrorCode::BadParameter, "target capacity must lie in [0, ln 2)");
  }
  double lo = 0.0;
  double hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    // BSC capacity decreases on (0, 1/2].
    if (std::log(2.0) - binary_entropy(mid) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct GapKlRow {
  double eps = 0.0;
  double best_capacity = 0.0;   ///< C([[1-eps, eps], [q, 1-q]])
  double other_capacity = 0.0;  ///< C(BSC(p))
  double gap = 0.0;             ///< best_capacity - other_capacity
  double kl_term = 0.0;         ///< min over relabelings of max_x D(BSC row || Z row)
};

/// Perturbed Z-channel against a BSC: the capacity gap settles while the
/// row-wise divergence grows like ln(1/eps).
inline std::vector<GapKlRow> gap_vs_kl_demo(double q, double p, const std::vector<double>& eps_seq) {
  if (!(q > 0.0 && q < 1.0) || !(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::BadParameter, "q and p must lie in (0,1)");
  }
  for (std::size_t i = 0; i < eps_seq.size(); ++i) {
    if (!(eps_seq[i] > 0.0 && eps_seq[i] < 1.0)) throw Error(ErrorCode::BadParameter, "eps must lie in (0,1)");
    if (i > 0 && !(eps_seq[i] < eps_seq[i - 1])) throw Error(ErrorCode::BadParameter, "eps sequence must decrease");
  }
  // Row order [[p, 1-p], [1-p, p]]; capacity is label-free.
  const Channel other(2, 2, {p, 1.0 - p, 1.0 - p, p});
  const double c_other = capacity(other).capacity;
  std::vector<GapKlRow> rows;
  for (double eps : eps_seq) {
    const Channel z = z_channel(q, eps);
    GapKlRow row;
    row.eps = eps;
    row.best_capacity = capacity(z).capacity;
    row.other_capacity = c_other;
    row.gap = row.best_capacity - c_other;
    row.kl_term = kInfiniteDivergence;
    for (const auto& c : detail::enumerate_relabelings(other, z)) row.kl_term = std::min(row.kl_term, c.forward);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dmcid
