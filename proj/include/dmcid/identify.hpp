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
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "dmcid/error.hpp"
#include "dmcid/estimation.hpp"
#include "dmcid/sensing.hpp"

namespace dmcid {

/// Tolerance, confidence and per-channel pulls of one elimination round.
struct RoundSchedule {
  int round = 1;
  double eps = 0.0;
  double delta = 0.0;
  std::int64_t pulls = 0;  ///< senses per surviving channel

  friend bool operator==(const RoundSchedule&, const RoundSchedule&) = default;
};

enum class PacKind { Naive, Median };

/// Second argument of the MedianPAC per-round max: 2 n_a / eps_r^2 as printed
/// in the round formula, or 2 n_a / eps_r as in the single-channel sample bound.
enum class MedianSecondTerm { EpsSquared, Eps };

namespace detail {

inline void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::BadDelta, "delta must lie in (0,1)");
}

// 4 C_lin n / eps^2 ln^2(4 bbar n / eps^2)
inline double scaled_sample_term(double n_a, double bbar, double eps) {
  const double e2 = eps * eps;
  const double lg = std::log(4.0 * bbar * n_a / e2);
  return 4.0 * kLinearFactor * n_a / e2 * lg * lg;
}

inline std::int64_t ceil_log2(std::size_t k) {
  std::int64_t r = 0;
  std::size_t m = 1;
  while (m < k) {
    m <<= 1;
    ++r;
  }
  return r;
}

}  // namespace detail

/// Round r of the gap-elimination schedule: eps_r = 2^-r / 4, delta_r = delta / (50 r^3),
/// T_r = ceil(4 C_lin n_{delta_r} / eps_r^2 ln^2(4 bbar_{delta_r} n_{delta_r} / eps_r^2)).
inline RoundSchedule alg1_schedule(int r, double delta, std::size_t inputs, std::size_t outputs) {
  if (r < 1) throw Error(ErrorCode::BadParameter, "round index must be >= 1");
  detail::check_delta(delta);
  RoundSchedule s;
  s.round = r;
  s.eps = std::ldexp(1.0, -r) / 4.0;
  s.delta = delta / (50.0 * std::pow(static_cast<double>(r), 3));
  const double na = n_factor(s.delta, inputs, outputs);
  s.pulls = detail::checked_ceil(
      detail::scaled_sample_term(na, scaled_log_factor(s.delta, inputs, outputs), s.eps));
  return s;
}

/// Per-channel senses of NaivePAC over k candidates (confidence delta / (2k) per estimate).
inline std::int64_t naive_pulls(std::size_t k, double eps, double delta, std::size_t inputs,
                                std::size_t outputs) {
  if (!(eps > 0.0 && eps <= 2.0)) throw Error(ErrorCode::BadEps, "NaivePAC eps must lie in (0,2]");
  detail::check_delta(delta);
  if (k < 1) throw Error(ErrorCode::EmptySet, "NaivePAC needs at least one candidate");
  const double a = delta / (2.0 * static_cast<double>(k));
  const double na = n_factor(a, inputs, outputs);
  const double first = detail::scaled_sample_term(na, scaled_log_factor(a, inputs, outputs), eps);
  return detail::checked_ceil(std::max(first, 2.0 * na / eps));
}

/// Round r of MedianPAC: eps_r = (eps/4)(3/4)^(r-1), delta_r = (delta/2)(1/2)^(r-1),
/// pulls from the per-round bound at confidence delta_r / 3 with the alpha-free log factor.
inline RoundSchedule median_schedule(int r, double eps, double delta, std::size_t inputs,
                                     std::size_t outputs,
                                     MedianSecondTerm variant = MedianSecondTerm::EpsSquared) {
  if (r < 1) throw Error(ErrorCode::BadParameter, "round index must be >= 1");
  if (!(eps > 0.0 && eps <= 4.0)) throw Error(ErrorCode::BadEps, "MedianPAC eps must lie in (0,4]");
  detail::check_delta(delta);
  RoundSchedule s;
  s.round = r;
  s.eps = eps / 4.0 * std::pow(0.75, r - 1);
  s.delta = delta / 2.0 * std::ldexp(1.0, -(r - 1));
  const double na = n_factor(s.delta / 3.0, inputs, outputs);
  const double first = detail::scaled_sample_term(na, constant_scaled_log_factor(inputs, outputs), s.eps);
  const double second = variant == MedianSecondTerm::EpsSquared ? 2.0 * na / (s.eps * s.eps) : 2.0 * na / s.eps;
  s.pulls = detail::checked_ceil(std::max(first, second));
  return s;
}

/// Total senses of NaivePAC on k channels: k * naive_pulls.
inline std::int64_t naive_budget(std::size_t k, double eps, double delta, std::size_t inputs,
                                 std::size_t outputs) {
  if (k < 2) throw Error(ErrorCode::BadParameter, "budgets need k >= 2");
  const double total = static_cast<double>(k) * static_cast<double>(naive_pulls(k, eps, delta, inputs, outputs));
  return detail::checked_ceil(total);
}

/// Total senses of MedianPAC on k channels: sum over ceil(log2 k) rounds of
/// ceil(k / 2^(r-1)) * T_r.
inline std::int64_t median_budget(std::size_t k, double eps, double delta, std::size_t inputs,
                                  std::size_t outputs,
                                  MedianSecondTerm variant = MedianSecondTerm::EpsSquared) {
  if (k < 2) throw Error(ErrorCode::BadParameter, "budgets need k >= 2");
  double total = 0.0;
  std::size_t survivors = k;
  const auto rounds = detail::ceil_log2(k);
  for (int r = 1; r <= rounds; ++r) {
    total += static_cast<double>(survivors) *
             static_cast<double>(median_schedule(r, eps, delta, inputs, outputs, variant).pulls);
    survivors = (survivors + 1) / 2;
  }
  return detail::checked_ceil(total);
}

struct PacResult {
  std::size_t channel = 0;
  std::int64_t senses = 0;
  std::vector<RoundSchedule> rounds;
};

namespace detail {

inline std::vector<std::size_t> sorted_candidates(std::span<const std::size_t> candidates,
                                                  const Environment& env) {
  if (candidates.empty()) throw Error(ErrorCode::EmptySet, "empty candidate set");
  std::vector<std::size_t> c(candidates.begin(), candidates.end());
  std::sort(c.begin(), c.end());
  if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
    throw Error(ErrorCode::BadIndex, "duplicate candidate");
  }
  if (c.back() >= env.channel_count()) throw Error(ErrorCode::BadIndex, "candidate out of range");
  return c;
}

inline std::vector<double> sense_and_estimate(Environment& env, std::span<const std::size_t> channels,
                                              std::int64_t pulls, double tol) {
  std::vector<double> est;
  est.reserve(channels.size());
  for (auto j : channels) est.push_back(estimate_capacity(env.sense_uniform(j, pulls), tol));
  return est;
}

// Position of the largest estimate; lowest position on exact ties.
inline std::size_t argmax_position(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

/// Senses every candidate the same number of times and keeps the best estimate.
/// Returns an eps-best channel with probability at least 1 - delta.
inline PacResult naive_pac(Environment& env, std::span<const std::size_t> candidates, double eps,
                           double delta, double capacity_tol = 1e-12) {
  const auto c = detail::sorted_candidates(candidates, env);
  const auto n = naive_pulls(c.size(), eps, delta, env.input_size(), env.output_size());
  const auto before = env.ledger().total();
  const auto est = detail::sense_and_estimate(env, c, n, capacity_tol);
  PacResult out;
  out.channel = c[detail::argmax_position(est)];
  out.senses = env.ledger().total() - before;
  out.rounds.push_back(RoundSchedule{1, eps, delta, n});
  return out;
}

/// Median elimination: each round drops the floor(|C|/2) channels with the lowest
/// estimates (ties keep lower indices) until one remains.
inline PacResult median_pac(Environment& env, std::span<const std::size_t> candidates, double eps,
                            double delta, MedianSecondTerm variant = MedianSecondTerm::EpsSquared,
                            double capacity_tol = 1e-12) {
  auto c = detail::sorted_candidates(candidates, env);
  // Validate parameters even when no round runs.
  (void)median_schedule(1, eps, delta, env.input_size(), env.output_size(), variant);
  const auto before = env.ledger().total();
  PacResult out;
  for (int r = 1; c.size() > 1; ++r) {
    const auto s = median_schedule(r, eps, delta, env.input_size(), env.output_size(), variant);
    out.rounds.push_back(s);
    const auto est = detail::sense_and_estimate(env, c, s.pulls, capacity_tol);
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return est[a] > est[b]; });
    order.resize((c.size() + 1) / 2);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> next;
    next.reserve(order.size());
    for (auto i : order) next.push_back(c[i]);
    c = std::move(next);
  }
  out.channel = c.front();
  out.senses = env.ledger().total() - before;
  return out;
}

struct IdentifyOptions {
  PacKind pac = PacKind::Naive;
  MedianSecondTerm median_variant = MedianSecondTerm::EpsSquared;
  /// Stop before a round whose senses (estimation plus PAC subroutine) would push
  /// the total past this; 0 disables.
  std::int64_t budget_cap = 0;
  double capacity_tol = 1e-12;
};

struct RoundRecord {
  RoundSchedule schedule;
  std::vector<std::size_t> candidates;  ///< C_r at the start of the round
  std::vector<double> estimates;        ///< aligned with candidates
  std::size_t pivot = 0;                ///< channel returned by the PAC subroutine
  std::int64_t pac_senses = 0;
  std::vector<std::size_t> survivors;   ///< C_{r+1}
  std::int64_t total_senses = 0;        ///< cumulative after this round
};

struct IdentifyReport {
  std::size_t output_channel = 0;
  std::vector<RoundRecord> rounds;
  std::int64_t total_senses = 0;
  std::optional<bool> succeeded;
  bool truncated = false;
};

/// Gap elimination: each round senses the survivors T_r times, asks an
/// (eps_r/2, delta_r)-PAC subroutine for a pivot and drops every channel whose
/// estimate is below the pivot's by more than eps_r. Outputs the best channel
/// with probability at least 1 - delta.
inline IdentifyReport best_channel_id(Environment& env, double delta, const IdentifyOptions& opt = {}) {
  detail::check_delta(delta);
  const auto before = env.ledger().total();
  std::vector<std::size_t> c(env.channel_count());
  std::iota(c.begin(), c.end(), std::size_t{0});

  IdentifyReport report;
  for (int r = 1; c.size() > 1; ++r) {
    const auto s = alg1_schedule(r, delta, env.input_size(), env.output_size());
    double round_cost = static_cast<double>(s.pulls) * static_cast<double>(c.size());
    if (opt.budget_cap > 0) {
      round_cost += static_cast<double>(
          opt.pac == PacKind::Naive
              ? naive_budget(c.size(), s.eps / 2.0, s.delta, env.input_size(), env.output_size())
              : median_budget(c.size(), s.eps / 2.0, s.delta, env.input_size(), env.output_size(),
                              opt.median_variant));
    }
    const auto spent = env.ledger().total() - before;
    if (opt.budget_cap > 0 && static_cast<double>(spent) + round_cost > static_cast<double>(opt.budget_cap)) {
      report.truncated = true;
      if (!report.rounds.empty()) {
        const auto& last = report.rounds.back();
        std::size_t best = c.front();
        double best_est = -1.0;
        for (std::size_t i = 0; i < last.candidates.size(); ++i) {
          const auto j = last.candidates[i];
          if (std::find(c.begin(), c.end(), j) != c.end() && last.estimates[i] > best_est) {
            best_est = last.estimates[i];
            best = j;
          }
        }
        c = {best};
      } else {
        c = {c.front()};
      }
      break;
    }

    RoundRecord rec;
    rec.schedule = s;
    rec.candidates = c;
    rec.estimates = detail::sense_and_estimate(env, c, s.pulls, opt.capacity_tol);

    const auto pac_before = env.ledger().total();
    const PacResult pac = opt.pac == PacKind::Naive
                              ? naive_pac(env, c, s.eps / 2.0, s.delta, opt.capacity_tol)
                              : median_pac(env, c, s.eps / 2.0, s.delta, opt.median_variant, opt.capacity_tol);
    rec.pivot = pac.channel;
    rec.pac_senses = env.ledger().total() - pac_before;

    const auto pivot_pos = static_cast<std::size_t>(std::find(c.begin(), c.end(), pac.channel) - c.begin());
    const double threshold = rec.estimates[pivot_pos] - s.eps;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!(rec.estimates[i] < threshold)) rec.survivors.push_back(c[i]);

    c = rec.survivors;
    rec.total_senses = env.ledger().total() - before;
    report.rounds.push_back(std::move(rec));
  }
  report.output_channel = c.front();
  report.total_senses = env.ledger().total() - before;
  return report;
}

}  // namespace dmcid
