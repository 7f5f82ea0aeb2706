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

// Acceptance checks; prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bounds_oracle.hpp"
#include "dmcid/dmcid.hpp"
#include "oracle_values.hpp"
#include "stats_util.hpp"
#include "test_util.hpp"

using namespace dmcid;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1 ---------------------------------------------------------------------

double printed_z_formula(double q) { return std::log(1.0 + std::pow(1.0 - q, q / (1.0 - q))); }

Outcome capacity_oracle() {
  double bsc_err = 0.0;
  for (double p : {0.05, 0.11, 0.25, 0.49})
    bsc_err = std::max(bsc_err, std::abs(capacity(bsc(p)).capacity - (std::log(2.0) - binary_entropy(p))));
  double z_err = 0.0, z_true_err = 0.0;
  std::string zs;
  for (double q : {0.1, 0.5, 0.9}) {
    const double c = capacity(z_channel(q)).capacity;
    z_err = std::max(z_err, std::abs(c - printed_z_formula(q)));
    z_true_err = std::max(z_true_err, std::abs(c - z_channel_capacity(q)));
    zs += fmt(" q=%.1f:BA=%.6f,formula=%.6f", q, c, printed_z_formula(q));
  }
  return {bsc_err <= 1e-9 && z_err <= 1e-9,
          fmt("bsc max err %.2e; z vs ln(1+(1-q)^(q/(1-q))) max err %.2e;", bsc_err, z_err) + zs +
              fmt("; z vs ln(1+(1-q)q^(q/(1-q))) max err %.2e", z_true_err)};
}

// --- 2 ---------------------------------------------------------------------

Outcome duality() {
  Xoshiro256 gen(20);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, capacity(testing::random_channel(gen)).duality_gap);
  return {worst <= 1e-6, fmt("max duality gap %.3e over 100 channels", worst)};
}

// --- 3 ---------------------------------------------------------------------

Outcome sandwich() {
  Xoshiro256 gen(30);
  double lo = 0.0, slack = -1.0;
  for (int i = 0; i < 100; ++i) {
    const auto ch = testing::random_channel(gen);
    const double c = capacity(ch).capacity;
    for (double eta : {1e-3, 1e-2}) {
      const double d = pseudo_capacity(ch, eta) - c;
      lo = std::min(lo, d);
      slack = std::max(slack, d - 2.0 * eta * static_cast<double>(ch.output_size()));
    }
  }
  double kl_slack = -1.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t ny = 2 + gen() % 7;
    const auto p = testing::random_simplex_point(gen, ny);
    const double eta = 0.5 / static_cast<double>(ny) * gen.uniform();
    const auto q = floor_projection(p, eta);
    if (q.min() < eta * (1.0 - 1e-12)) kl_slack = 1.0;
    kl_slack = std::max(kl_slack, kl_divergence(std::span<const double>(p), q.probs()) - 2.0 * eta * ny);
  }
  return {lo >= -1e-9 && slack <= 1e-6 && kl_slack <= 0.0,
          fmt("min C_eta-C %.2e, max (C_eta-C)-2eta|Y| %.3e, max projection KL slack %.3e", lo, slack, kl_slack)};
}

// --- 4 ---------------------------------------------------------------------

Outcome coverage() {
  const std::vector<Channel> chs{bsc(0.1), z_channel(0.5), binary_erasure(0.2),
                                 Channel::from_rows({{0.6, 0.3, 0.1}, {0.2, 0.2, 0.6}}),
                                 Channel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.25, 0.25, 0.5}})};
  double worst_margin = 1.0;
  std::string worst;
  for (std::size_t j = 0; j < chs.size(); ++j) {
    const double c = capacity(chs[j]).capacity;
    for (std::int64_t n : {10000, 100000}) {
      for (double alpha : {0.1, 0.3}) {
        const ConfidenceSpec spec(alpha, chs[j].input_size(), chs[j].output_size());
        const double eps = confidence_radius(spec, n).value;
        Environment env({chs[j]}, 4000 + j);
        int hit = 0;
        for (int r = 0; r < 2000; ++r) hit += std::abs(estimate_capacity(env.sense_uniform(0, n)) - c) <= eps;
        const double freq = hit / 2000.0;
        if (freq - (1.0 - alpha) < worst_margin) {
          worst_margin = freq - (1.0 - alpha);
          worst = fmt("channel %zu n=%lld alpha=%.1f freq %.4f", j, static_cast<long long>(n), alpha, freq);
        }
      }
    }
  }
  return {worst_margin >= 0.0, "worst case " + worst};
}

// --- 5 ---------------------------------------------------------------------

Outcome consistency() {
  double worst = -1.0;
  for (double eps : {0.5, 0.2, 0.1})
    for (double alpha : {0.1, 0.01})
      for (std::size_t nx = 2; nx <= 4; ++nx)
        for (std::size_t ny = 2; ny <= 4; ++ny) {
          const ConfidenceSpec spec(alpha, nx, ny);
          worst = std::max(worst, confidence_radius(spec, required_samples(spec, eps)).value / eps);
        }
  return {worst <= 1.0, fmt("max radius/eps %.4f", worst)};
}

// --- 6 ---------------------------------------------------------------------

Outcome best_channel() {
  const std::vector<Channel> chs{bsc(0.1), bsc(0.4)};
  const auto reports = parallel_map(200, [&](std::size_t s) {
    Environment env(chs, s);
    return best_channel_id(env, 0.1).output_channel;
  });
  int ok = 0;
  for (auto out : reports) ok += out == 0;
  return {ok >= 180, fmt("success %d/200", ok)};
}

// --- 7 ---------------------------------------------------------------------

Outcome pac() {
  const std::vector<Channel> chs{bsc(0.02), bsc(0.1), z_channel(0.4), bsc(0.3)};
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const double eps = 0.2, delta = 0.1;
  const auto hits = parallel_map(200, [&](std::size_t s) {
    Environment a(chs, s);
    Environment b(chs, s);
    const bool naive = is_eps_best(chs, naive_pac(a, all, eps, delta).channel, eps);
    const bool median = is_eps_best(chs, median_pac(b, all, eps, delta).channel, eps);
    return std::pair<int, int>(naive, median);
  });
  int n = 0, m = 0;
  for (auto [a, b] : hits) {
    n += a;
    m += b;
  }
  return {n >= 180 && m >= 180, fmt("naive %d/200, median %d/200", n, m)};
}

// --- 8 ---------------------------------------------------------------------

Outcome fig1_shape() {
  Fig1Config cfg;
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
  const auto res = run_fig1(cfg);
  auto mean = [&](std::size_t k, double dm, double d) {
    for (const auto& s : res.summary)
      if (s.k == k && s.delta_min == dm && s.delta == d) return s.mean_total_senses;
    throw std::logic_error("missing fig1 cell");
  };
  int violations = 0;
  for (auto k : cfg.ks)
    for (double dm : cfg.delta_mins) {
      for (std::size_t i = 1; i < cfg.deltas.size(); ++i)
        violations += !(mean(k, dm, cfg.deltas[i]) <= mean(k, dm, cfg.deltas[i - 1]));
      for (double d : cfg.deltas) {
        violations += !(mean(cfg.ks[1], dm, d) > mean(cfg.ks[0], dm, d));
        violations += !(mean(k, cfg.delta_mins[0], d) > mean(k, cfg.delta_mins[1], d));
      }
    }
  double min_success = 1.0;
  for (const auto& s : res.summary) min_success = std::min(min_success, s.success_rate);

  ChannelSetSpec spec;
  spec.k = 10;
  spec.delta_min = 0.13;
  spec.seed = fig1_set_seed(cfg.generation_seed, 99, 0);
  const auto set = generate_channel_set(spec);
  Environment env(set, 1);
  const auto full = static_cast<double>(best_channel_id(env, 0.01).total_senses);
  const double ratio = full / 7.99e9;
  return {violations == 0 && ratio >= 0.1 && ratio <= 10.0,
          fmt("%d monotonicity violations over %zu cells, min success %.2f; full scale k=10 Delta_min=%.4f "
              "delta=0.01 total %.4g (ratio %.3f to 7.99e9)",
              violations, res.summary.size(), min_success, min_gap(set), full, ratio)};
}

// --- 9 ---------------------------------------------------------------------

Outcome fig2_crossover() {
  const auto res = run_fig2({});
  bool single = true;
  std::string d;
  for (const auto& c : res.crossings) {
    single = single && c.sign_changes == 1;
    d += fmt("(%.1f,%.1f): %d crossings; ", c.eps, c.delta, c.sign_changes);
  }
  const auto& a = res.crossings[0];
  const auto& b = res.crossings[1];
  const bool order = a.crossing_k && b.crossing_k && *b.crossing_k < *a.crossing_k;
  const auto& r4 = res.rows.front();
  const double off = std::min(std::abs(std::log10(r4.naive_budget / 1.787e8)),
                              std::abs(std::log10(r4.median_budget / 1.787e8)));
  return {single && order && off <= 1.0,
          d + fmt("k=4 naive %.4g median %.4g (closest is %.2f decades from 1.787e8)",
                  static_cast<double>(r4.naive_budget), static_cast<double>(r4.median_budget), off)};
}

// --- 10 --------------------------------------------------------------------

Outcome lower_bound_check() {
  const std::vector<Channel> chs{bsc(0.1), bsc(0.3)};
  const double delta = 0.05;
  const auto lb = lower_bound(chs, delta);
  const double brute = testing::brute_force_bound(chs, delta);
  const auto totals = parallel_map(200, [&](std::size_t s) {
    Environment env(chs, s);
    return static_cast<double>(best_channel_id(env, delta).total_senses);
  });
  double mean = 0.0;
  for (double t : totals) mean += t / 200.0;
  return {lb.value == brute && std::abs(lb.value - oracle::kLowerBoundBsc) <= 1e-3 && mean > lb.value,
          fmt("bound %.12f, brute force %.12f, reference %.12f, simulated mean senses %.4g", lb.value, brute,
              oracle::kLowerBoundBsc, mean)};
}

// --- 11 --------------------------------------------------------------------

Outcome sufficiency() {
  Xoshiro256 gen(110);
  const double e2 = std::exp(2.0);
  int bad = 0;
  long long checked = 0;
  for (int i = 0; i < 100; ++i) {
    const double beta = std::exp(std::log(0.01) + gen.uniform() * std::log(1e4));
    const double y = 4.0 * beta / e2 * std::exp(gen.uniform() * std::log(1e-4));
    const auto n0 = sufficiency_check(beta, y);
    const double top = 100.0 * static_cast<double>(n0);
    for (int g = 0; g <= 2000; ++g) {
      const double n = std::ceil(static_cast<double>(n0) * std::pow(top / static_cast<double>(n0), g / 2000.0));
      const double l = std::log(beta * n);
      bad += l * l / n > y;
      ++checked;
    }
  }
  return {bad == 0, fmt("%d violations over %lld grid points", bad, checked)};
}

// --- 12 --------------------------------------------------------------------

Outcome batch_equivalence_check() {
  const auto ch = Channel::from_rows({{0.6, 0.3, 0.1}, {0.2, 0.2, 0.6}});
  const auto r = testing::batch_equivalence(ch, 10000, 500, 12);
  return {r.min_pooled_p >= 0.01 && r.spread_p >= 0.01,
          fmt("min pooled p %.4f, per-replication spread p %.4f", r.min_pooled_p, r.spread_p)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"capacity oracle", 1, capacity_oracle},
      {"duality", 10, duality},
      {"pseudo-capacity sandwich", 30, sandwich},
      {"estimation coverage", 120, coverage},
      {"sample-size consistency", 1, consistency},
      {"best channel identification", 300, best_channel},
      {"eps-best PAC", 600, pac},
      {"fig1 shape", 0, fig1_shape},
      {"fig2 crossover", 1, fig2_crossover},
      {"lower bound", 60, lower_bound_check},
      {"sufficiency grid", 1, sufficiency},
      {"batch equivalence", 30, batch_equivalence_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt(" [over time limit %.0f s]", c.limit_s);
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
