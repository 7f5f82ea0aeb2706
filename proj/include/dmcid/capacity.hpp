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
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"
#include "dmcid/information.hpp"

namespace dmcid {

struct CapacityResult {
  double capacity = 0.0;  ///< nats; equals I(input_dist; W)
  Distribution input_dist = Distribution::uniform(1);
  Distribution output_dist = Distribution::uniform(1);
  int iterations = 0;
  double duality_gap = 0.0;  ///< max_x D(W_x || output_dist) - capacity
  bool converged = false;    ///< false when max_iter was hit first
};

/// max_x D(W(.|x) || q): the objective of the minimax characterization of
/// capacity. Infinite when q misses the support of some row.
inline double dual_value(const Channel& ch, std::span<const double> q) {
  if (q.size() != ch.output_size()) throw Error(ErrorCode::LengthMismatch, "output distribution size");
  double best = 0.0;
  for (std::size_t x = 0; x < ch.input_size(); ++x) best = std::max(best, kl_divergence(ch.row(x), q));
  return best;
}

inline double dual_value(const Channel& ch, const Distribution& q) { return dual_value(ch, q.probs()); }

namespace detail {

inline void row_divergences(const Channel& ch, std::span<const double> q, std::vector<double>& d) {
  d.resize(ch.input_size());
  for (std::size_t x = 0; x < ch.input_size(); ++x) d[x] = kl_divergence(ch.row(x), q);
}

// p <- p * exp(d) / Z, shifted by max d for range safety.
inline void multiplicative_update(std::vector<double>& p, const std::vector<double>& d) {
  double dmax = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < p.size(); ++x)
    if (p[x] > 0.0) dmax = std::max(dmax, d[x]);
  double z = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    p[x] = p[x] > 0.0 ? p[x] * std::exp(d[x] - dmax) : 0.0;
    z += p[x];
  }
  for (double& v : p) v /= z;
}

inline Distribution clean_distribution(std::vector<double> v) {
  for (double& x : v) x = std::max(x, 0.0);
  return Distribution::normalized(std::move(v));
}

// Dense Gaussian elimination with partial pivoting; false when singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (!(std::abs(a[piv][c]) > 1e-300)) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = c + 1; k < n; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return true;
}

// Newton on the optimality conditions D(W_x || P_Y) = lambda over an active
// input set, with inputs dropped when their mass turns negative and added when
// their divergence exceeds lambda. Returns a candidate input distribution; the
// caller certifies it.
inline std::optional<std::vector<double>> kkt_polish(const Channel& ch, const std::vector<double>& start) {
  const std::size_t nx = ch.input_size();
  const std::size_t ny = ch.output_size();
  std::vector<double> p = start;
  std::vector<bool> active(nx);
  for (std::size_t x = 0; x < nx; ++x) active[x] = p[x] > 1e-12;
  std::vector<double> d;

  for (std::size_t round = 0; round < 2 * nx + 2; ++round) {
    std::vector<std::size_t> s;
    for (std::size_t x = 0; x < nx; ++x)
      if (active[x]) s.push_back(x);
      else p[x] = 0.0;
    if (s.empty()) return std::nullopt;
    double mass = 0.0;
    for (auto x : s) mass += std::max(p[x], 0.0);
    for (auto x : s) p[x] = mass > 0.0 ? std::max(p[x], 0.0) / mass : 1.0 / static_cast<double>(s.size());

    const std::size_t m = s.size();
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
      const auto q = output_marginal(p, ch);
      std::vector<double> rhs(m + 1);
      std::vector<std::vector<double>> jac(m + 1, std::vector<double>(m + 1, 0.0));
      double resid = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto wi = ch.row(s[i]);
        double di = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
          if (wi[y] <= 0.0) continue;
          if (!(q[y] > 0.0)) return std::nullopt;
          di += wi[y] * std::log(wi[y] / q[y]);
        }
        if (it == 0 && i == 0) lambda = di;
        rhs[i] = -(di - lambda);
        resid = std::max(resid, std::abs(rhs[i]));
        for (std::size_t j = 0; j < m; ++j) {
          const auto wj = ch.row(s[j]);
          double acc = 0.0;
          for (std::size_t y = 0; y < ny; ++y)
            if (q[y] > 0.0) acc += wi[y] * wj[y] / q[y];
          jac[i][j] = -acc;
        }
        jac[i][m] = -1.0;
        jac[m][i] = 1.0;
      }
      double sum = 0.0;
      for (auto x : s) sum += p[x];
      rhs[m] = -(sum - 1.0);
      if (resid < 1e-15 && std::abs(rhs[m]) < 1e-15) break;
      if (!solve_linear(jac, rhs)) return std::nullopt;
      // Halve the step while some used output would lose all mass.
      double t = 1.0;
      for (int h = 0; h < 60; ++h, t *= 0.5) {
        std::vector<double> trial = p;
        for (std::size_t i = 0; i < m; ++i) trial[s[i]] += t * rhs[i];
        const auto tq = output_marginal(trial, ch);
        bool ok = true;
        for (std::size_t y = 0; y < ny && ok; ++y)
          for (auto x : s)
            if (ch(x, y) > 0.0 && !(tq[y] > 0.0)) ok = false;
        if (ok) break;
      }
      double step = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        p[s[i]] += t * rhs[i];
        step = std::max(step, std::abs(t * rhs[i]));
      }
      lambda += t * rhs[m];
      if (step < 1e-17) break;
    }

    std::size_t worst = nx;
    for (auto x : s)
      if (p[x] < 0.0 && (worst == nx || p[x] < p[worst])) worst = x;
    if (worst != nx) {
      active[worst] = false;
      continue;
    }
    row_divergences(ch, output_marginal(p, ch), d);
    std::size_t violator = nx;
    double dmax = -1.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (active[x]) continue;
      if (d[x] > lambda + 1e-13 && d[x] - lambda > dmax) {
        dmax = d[x] - lambda;
        violator = x;
      }
    }
    if (violator == nx) return p;
    active[violator] = true;
  }
  return std::nullopt;
}

// (I(p;W), max_x D(W_x||P_Y)) at p.
inline std::pair<double, double> capacity_bounds(const Channel& ch, const std::vector<double>& p,
                                                 std::vector<double>& py, std::vector<double>& d) {
  py = output_marginal(p, ch);
  row_divergences(ch, py, d);
  double mi = 0.0;
  double upper = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) mi += p[x] * d[x];
    upper = std::max(upper, d[x]);
  }
  return {mi, upper};
}

}  // namespace detail

/// Channel capacity by Blahut-Arimoto from the uniform input. Stops once the
/// certified gap max_x D(W_x||P_Y) - I(P_X;W) drops below `tol`. When the
/// iteration stalls, a Newton step on the optimality conditions is tried and
/// kept only if its certified gap is smaller.
inline CapacityResult capacity(const Channel& ch, double tol = 1e-12, int max_iter = 100000) {
  if (!(tol > 0.0)) throw Error(ErrorCode::BadParameter, "capacity tolerance must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::BadParameter, "capacity max_iter must be >= 1");

  const std::size_t nx = ch.input_size();
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
  std::vector<double> d;
  std::vector<double> py;
  CapacityResult result;
  auto finish = [&](const std::vector<double>& pp, double mi, double gap, int it) {
    result.capacity = mi;
    result.duality_gap = gap;
    result.iterations = it;
    result.converged = gap < tol;
    result.input_dist = detail::clean_distribution(pp);
    result.output_dist = detail::clean_distribution(output_marginal(pp, ch));
    return result;
  };
  int next_polish = 64;
  for (int it = 1;; ++it) {
    const auto [mi, upper] = detail::capacity_bounds(ch, p, py, d);
    const double gap = std::max(upper - mi, 0.0);
    if (gap < tol || it >= max_iter) return finish(p, mi, gap, it);
    if (it == next_polish) {
      next_polish *= 4;
      if (auto polished = detail::kkt_polish(ch, p)) {
        std::vector<double> ppy, pd;
        const auto [pmi, pupper] = detail::capacity_bounds(ch, *polished, ppy, pd);
        const double pgap = std::max(pupper - pmi, 0.0);
        if (pgap < tol) return finish(*polished, pmi, pgap, it);
        if (pgap < gap) {
          p = *polished;
          continue;
        }
      }
    }
    detail::multiplicative_update(p, d);
  }
}

/// KL projection of p onto {Q : Q(y) >= eta, sum Q = 1}:
/// Q(y) = max{p(y), xi*eta} / xi with xi the normalizing root.
/// Requires 0 <= eta < 1/|Y|.
inline Distribution floor_projection(std::span<const double> p, double eta) {
  const std::size_t n = p.size();
  if (!(eta >= 0.0) || eta * static_cast<double>(n) >= 1.0) {
    throw Error(ErrorCode::BadEta, "eta must satisfy 0 <= eta < 1/|Y|");
  }
  std::vector<double> sorted(p.begin(), p.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // m = number of entries left unclipped (largest m that is self-consistent).
  double xi = 1.0;
  double head = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  for (std::size_t m = n; m >= 1; --m) {
    xi = head / (1.0 - eta * static_cast<double>(n - m));
    if (sorted[m - 1] >= xi * eta) break;
    head -= sorted[m - 1];
  }
  std::vector<double> q(n);
  double sum = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    q[y] = std::max(p[y], xi * eta) / xi;
    sum += q[y];
  }
  for (double& v : q) v /= sum;
  return Distribution(std::move(q));
}

inline Distribution floor_projection(const Distribution& p, double eta) {
  return floor_projection(p.probs(), eta);
}

struct PseudoCapacityResult {
  double value = 0.0;        ///< max_x D(W_x || output_dist), a certified upper bound
  double lower_bound = 0.0;  ///< best min_{Q in P_eta} sum_x P(x) D(W_x || Q) seen
  Distribution input_dist = Distribution::uniform(1);
  Distribution output_dist = Distribution::uniform(1);  ///< feasible, every mass >= eta
  int iterations = 0;
  bool converged = false;
};

/// min over Q with Q(y) >= eta of max_x D(W_x || Q).
///
/// Solved through the saddle form max_{P_X} min_{Q in P_eta} sum_x P(x) D(W_x||Q):
/// the inner minimum is the floor projection of the induced output marginal, the
/// outer step is the exponentiated-gradient update p <- p exp(D(W_x||Q)). For
/// eta = 0 this is exactly Blahut-Arimoto. Each iterate certifies
/// lower_bound <= C_eta <= value.
inline PseudoCapacityResult pseudo_capacity_solve(const Channel& ch, double eta, double tol = 1e-12,
                                                  int max_iter = 100000) {
  if (!(eta >= 0.0) || eta * static_cast<double>(ch.output_size()) >= 1.0) {
    throw Error(ErrorCode::BadEta, "eta must satisfy 0 <= eta < 1/|Y|");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::BadParameter, "pseudo-capacity tolerance must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::BadParameter, "pseudo-capacity max_iter must be >= 1");

  const std::size_t nx = ch.input_size();
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
  std::vector<double> d;
  PseudoCapacityResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.lower_bound = -std::numeric_limits<double>::infinity();
  for (int it = 1;; ++it) {
    const auto py = output_marginal(p, ch);
    Distribution q = floor_projection(py, eta);
    detail::row_divergences(ch, q.probs(), d);
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (p[x] > 0.0) lower += p[x] * d[x];
      upper = std::max(upper, d[x]);
    }
    if (lower > result.lower_bound) {
      result.lower_bound = lower;
      result.input_dist = detail::clean_distribution(p);
    }
    if (upper < result.value) {
      result.value = upper;
      result.output_dist = std::move(q);
    }
    result.iterations = it;
    if (result.value - result.lower_bound < tol) {
      result.converged = true;
      return result;
    }
    if (it >= max_iter) return result;
    detail::multiplicative_update(p, d);
  }
}

inline double pseudo_capacity(const Channel& ch, double eta, double tol = 1e-12) {
  return pseudo_capacity_solve(ch, eta, tol).value;
}

}  // namespace dmcid
