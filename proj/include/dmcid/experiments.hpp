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
#include <cstdint>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"
#include "dmcid/identify.hpp"
#include "dmcid/io.hpp"
#include "dmcid/rng.hpp"
#include "dmcid/sensing.hpp"

namespace dmcid {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results come back in index order.
/// The first exception (lowest index) is rethrown after all workers finish.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn, unsigned threads = 0) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += threads) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Sets `succeeded` from ground truth; left empty when the best channel is not unique.
inline void score(IdentifyReport& report, const std::vector<Channel>& channels) {
  const auto g = gaps(channels);
  if (g.unique_best) report.succeeded = report.output_channel == g.best;
  else report.succeeded.reset();
}

/// True when `channel` is within eps of the best capacity.
inline bool is_eps_best(const std::vector<Channel>& channels, std::size_t channel, double eps) {
  return gaps(channels).gaps.at(channel) <= eps;
}

// ---------------------------------------------------------------------------
// Random channel sets with a prescribed best-vs-runner-up gap

struct ChannelSetSpec {
  std::size_t k = 10;
  double delta_min = 0.13;
  double tolerance = 0.005;
  std::size_t input_size = 2;
  std::size_t output_size = 2;
  double concentration = 1.0;
  std::uint64_t seed = 1;
  std::int64_t max_attempts = 1000000;
};

/// Smallest nonzero suboptimality gap C_best - C_second.
inline double min_gap(const std::vector<Channel>& channels) {
  const auto g = gaps(channels);
  double m = kInfiniteDivergence;
  for (std::size_t j = 0; j < channels.size(); ++j)
    if (j != g.best) m = std::min(m, g.gaps[j]);
  return m;
}

/// Rejection-samples k Dirichlet channels until |Delta_min - target| <= tolerance.
inline std::vector<Channel> generate_channel_set(const ChannelSetSpec& spec) {
  if (spec.k < 2) throw Error(ErrorCode::BadParameter, "channel set needs k >= 2");
  if (!(spec.delta_min > 0.0) || !(spec.tolerance >= 0.0)) {
    throw Error(ErrorCode::BadParameter, "delta_min must be > 0 and tolerance >= 0");
  }
  Xoshiro256 gen(spec.seed);
  for (std::int64_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
    std::vector<Channel> set;
    std::vector<double> caps;
    set.reserve(spec.k);
    for (std::size_t j = 0; j < spec.k; ++j) {
      set.push_back(random_dirichlet_channel(spec.input_size, spec.output_size, spec.concentration, gen));
      caps.push_back(capacity(set.back(), 1e-10).capacity);
    }
    std::sort(caps.begin(), caps.end(), std::greater<>());
    // Cheap screen before the exact check.
    if (std::abs(caps[0] - caps[1] - spec.delta_min) > spec.tolerance + 1e-8) continue;
    if (std::abs(min_gap(set) - spec.delta_min) <= spec.tolerance) return set;
  }
  throw Error(ErrorCode::GenerationTimeout, "no channel set with delta_min " + format_real(spec.delta_min) +
                                                " after " + std::to_string(spec.max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// fig1: total senses of BestChannelID against the confidence level

struct Fig1Config {
  std::vector<std::size_t> ks = {5, 10};
  std::vector<double> delta_mins = {0.08, 0.2};
  std::vector<double> deltas = {0.1, 0.3, 0.5};
  std::vector<std::uint64_t> seeds;  ///< one replication per seed
  double tolerance = 0.005;
  std::uint64_t generation_seed = 2024;
  std::int64_t max_attempts = 1000000;
  IdentifyOptions identify;
  unsigned threads = 0;
};

struct Fig1Row {
  std::size_t k = 0;
  double delta_min = 0.0;  ///< target
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::int64_t total_senses = 0;
  bool success = false;
};

struct Fig1Summary {
  std::size_t k = 0;
  double delta_min = 0.0;
  double realized_delta_min = 0.0;
  double delta = 0.0;
  double mean_total_senses = 0.0;
  double success_rate = 0.0;
};

struct Fig1Result {
  std::vector<Fig1Row> rows;          ///< setting-major, then delta, then seed order
  std::vector<Fig1Summary> summary;   ///< one per (k, delta_min, delta)
};

/// Seed of the channel set for setting (k index, delta_min index).
inline std::uint64_t fig1_set_seed(std::uint64_t generation_seed, std::size_t ki, std::size_t di) {
  return derive_stream_seed(generation_seed, ki * 1024 + di);
}

inline Fig1Result run_fig1(const Fig1Config& cfg) {
  if (cfg.seeds.empty()) throw Error(ErrorCode::BadParameter, "fig1 needs at least one seed");
  for (double d : cfg.deltas) detail::check_delta(d);

  struct Setting {
    std::size_t k;
    double delta_min;
    std::vector<Channel> channels;
    double realized;
  };
  std::vector<Setting> settings;
  for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
    for (std::size_t di = 0; di < cfg.delta_mins.size(); ++di) {
      ChannelSetSpec spec;
      spec.k = cfg.ks[ki];
      spec.delta_min = cfg.delta_mins[di];
      spec.tolerance = cfg.tolerance;
      spec.seed = fig1_set_seed(cfg.generation_seed, ki, di);
      spec.max_attempts = cfg.max_attempts;
      auto set = generate_channel_set(spec);
      const double realized = min_gap(set);
      settings.push_back({spec.k, spec.delta_min, std::move(set), realized});
    }
  }

  struct Job {
    std::size_t setting;
    double delta;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < settings.size(); ++s)
    for (double d : cfg.deltas)
      for (auto seed : cfg.seeds) jobs.push_back({s, d, seed});

  auto rows = parallel_map(
      jobs.size(),
      [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto& st = settings[job.setting];
        Environment env(st.channels, job.seed);
        auto rep = best_channel_id(env, job.delta, cfg.identify);
        score(rep, st.channels);
        return Fig1Row{st.k, st.delta_min, job.delta, job.seed, rep.total_senses, rep.succeeded.value_or(false)};
      },
      cfg.threads);

  Fig1Result out;
  const std::size_t reps = cfg.seeds.size();
  for (std::size_t g = 0; g * reps < rows.size(); ++g) {
    const auto& first = rows[g * reps];
    Fig1Summary s;
    s.k = first.k;
    s.delta_min = first.delta_min;
    s.realized_delta_min = settings[jobs[g * reps].setting].realized;
    s.delta = first.delta;
    double senses = 0.0;
    double wins = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      senses += static_cast<double>(rows[g * reps + r].total_senses);
      wins += rows[g * reps + r].success ? 1.0 : 0.0;
    }
    s.mean_total_senses = senses / static_cast<double>(reps);
    s.success_rate = wins / static_cast<double>(reps);
    out.summary.push_back(s);
  }
  out.rows = std::move(rows);
  return out;
}

inline std::string fig1_csv(const std::vector<Fig1Row>& rows) {
  std::ostringstream os;
  os << "k,delta_min,delta,total_senses,success\n";
  for (const auto& r : rows) {
    os << r.k << ',' << format_real(r.delta_min) << ',' << format_real(r.delta) << ',' << r.total_senses << ','
       << (r.success ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string fig1_summary_csv(const std::vector<Fig1Summary>& rows) {
  std::ostringstream os;
  os << "k,delta_min,realized_delta_min,delta,mean_total_senses,success_rate\n";
  for (const auto& r : rows) {
    os << r.k << ',' << format_real(r.delta_min) << ',' << format_real(r.realized_delta_min) << ','
       << format_real(r.delta) << ',' << format_real(r.mean_total_senses) << ',' << format_real(r.success_rate)
       << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// fig2: NaivePAC vs MedianPAC budgets over k

struct Fig2Config {
  std::vector<std::size_t> ks;  ///< empty means 4, 8, ..., 1024
  std::vector<std::pair<double, double>> settings = {{0.1, 0.1}, {0.1, 0.7}, {0.3, 0.1}};  ///< (eps, delta)
  std::size_t input_size = 2;
  std::size_t output_size = 2;
  MedianSecondTerm median_variant = MedianSecondTerm::EpsSquared;
};

struct Fig2Row {
  std::size_t k = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::int64_t naive_budget = 0;
  std::int64_t median_budget = 0;
  bool crossover_flag = false;  ///< sign of median - naive differs from the previous k
};

struct Fig2Crossing {
  double eps = 0.0;
  double delta = 0.0;
  int sign_changes = 0;
  std::optional<std::size_t> crossing_k;  ///< set only when the sign changes exactly once
};

struct Fig2Result {
  std::vector<Fig2Row> rows;
  std::vector<Fig2Crossing> crossings;
};

inline std::vector<std::size_t> default_fig2_ks() {
  std::vector<std::size_t> ks;
  for (std::size_t k = 4; k <= 1024; k *= 2) ks.push_back(k);
  return ks;
}

inline Fig2Result run_fig2(const Fig2Config& cfg) {
  const auto ks = cfg.ks.empty() ? default_fig2_ks() : cfg.ks;
  Fig2Result out;
  for (const auto& [eps, delta] : cfg.settings) {
    Fig2Crossing c{eps, delta, 0, std::nullopt};
    int prev_sign = 0;
    for (auto k : ks) {
      Fig2Row row;
      row.k = k;
      row.eps = eps;
      row.delta = delta;
      row.naive_budget = naive_budget(k, eps, delta, cfg.input_size, cfg.output_size);
      row.median_budget = median_budget(k, eps, delta, cfg.input_size, cfg.output_size, cfg.median_variant);
      const auto diff = row.median_budget - row.naive_budget;
      const int sign = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
      if (sign != 0) {
        if (prev_sign != 0 && sign != prev_sign) {
          row.crossover_flag = true;
          if (++c.sign_changes == 1) c.crossing_k = k;
        }
        prev_sign = sign;
      }
      out.rows.push_back(row);
    }
    if (c.sign_changes != 1) c.crossing_k.reset();
    out.crossings.push_back(c);
  }
  return out;
}

inline std::string fig2_csv(const std::vector<Fig2Row>& rows) {
  std::ostringstream os;
  os << "k,eps,delta,naive_budget,median_budget,crossover_flag\n";
  for (const auto& r : rows) {
    os << r.k << ',' << format_real(r.eps) << ',' << format_real(r.delta) << ',' << r.naive_budget << ','
       << r.median_budget << ',' << (r.crossover_flag ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string fig2_crossings_text(const std::vector<Fig2Crossing>& cs) {
  std::ostringstream os;
  for (const auto& c : cs) {
    os << "eps=" << format_real(c.eps) << " delta=" << format_real(c.delta) << " sign_changes=" << c.sign_changes
       << " crossing_k=" << (c.crossing_k ? std::to_string(*c.crossing_k) : std::string("none")) << '\n';
  }
  return os.str();
}

}  // namespace dmcid
