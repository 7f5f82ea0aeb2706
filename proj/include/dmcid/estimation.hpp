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
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "dmcid/capacity.hpp"
#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"

namespace dmcid {

/// Leading constant of the sample-count bound: 15 * 25 / 4.
inline constexpr double kLinearFactor = 15.0 * 25.0 / 4.0;

/// Largest sample count handed out; beyond this a budget is reported as overflow.
inline constexpr double kMaxSamples = 4.0e18;

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::BadAlpha, "alpha must lie in (0,1]");
}

inline void check_alphabets(std::size_t inputs, std::size_t outputs) {
  if (inputs < 1 || outputs < 2) throw Error(ErrorCode::BadParameter, "alphabet sizes need |X|>=1, |Y|>=2");
}

inline std::int64_t checked_ceil(double v) {
  if (!(v < kMaxSamples)) throw Error(ErrorCode::BudgetOverflow, "sample count " + std::to_string(v) + " overflows");
  return static_cast<std::int64_t>(std::ceil(v));
}

}  // namespace detail

/// n_alpha = 4 |X| |Y| ln(|X| / alpha).
inline double n_factor(double alpha, std::size_t inputs, std::size_t outputs) {
  detail::check_alpha(alpha);
  detail::check_alphabets(inputs, outputs);
  return 4.0 * static_cast<double>(inputs * outputs) * std::log(static_cast<double>(inputs) / alpha);
}

/// beta_alpha = (|Y| e^2 / (|X| ln(|X|/alpha)))^(1/5).
inline double log_factor(double alpha, std::size_t inputs, std::size_t outputs) {
  detail::check_alpha(alpha);
  detail::check_alphabets(inputs, outputs);
  const double l = std::log(static_cast<double>(inputs) / alpha);
  if (!(l > 0.0)) throw Error(ErrorCode::BadAlpha, "ln(|X|/alpha) must be positive");
  const double e2 = std::numbers::e * std::numbers::e;
  return std::pow(static_cast<double>(outputs) * e2 / (static_cast<double>(inputs) * l), 0.2);
}

/// beta-bar_alpha = (25/4) beta_alpha.
inline double scaled_log_factor(double alpha, std::size_t inputs, std::size_t outputs) {
  return 6.25 * log_factor(alpha, inputs, outputs);
}

/// alpha-free upper bound beta-bar_1 >= beta-bar_alpha for every alpha <= 1.
inline double constant_scaled_log_factor(std::size_t inputs, std::size_t outputs) {
  if (inputs < 2) throw Error(ErrorCode::BadParameter, "constant log factor needs |X| >= 2");
  return scaled_log_factor(1.0, inputs, outputs);
}

/// Confidence level and alphabet sizes with the derived constants.
struct ConfidenceSpec {
  double alpha;
  std::size_t input_size;
  std::size_t output_size;

  ConfidenceSpec(double alpha_, std::size_t inputs, std::size_t outputs)
      : alpha(alpha_), input_size(inputs), output_size(outputs) {
    detail::check_alpha(alpha);
    detail::check_alphabets(inputs, outputs);
  }

  double n_alpha() const { return n_factor(alpha, input_size, output_size); }
  double beta() const { return log_factor(alpha, input_size, output_size); }
  double beta_bar() const { return scaled_log_factor(alpha, input_size, output_size); }
  static constexpr double c_lin() { return kLinearFactor; }
};

/// Output tallies per input symbol from one batch of senses.
class CountMatrix {
 public:
  CountMatrix(std::size_t input_size, std::size_t output_size)
      : inputs_(input_size), outputs_(output_size), counts_(input_size * output_size, 0),
        sends_(input_size, 0) {
    detail::check_alphabets(input_size, output_size);
  }

  /// Builds from tallies; sends per input are the row sums.
  static CountMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    if (rows.empty()) throw Error(ErrorCode::BadParameter, "count matrix needs |X| >= 1");
    CountMatrix c(rows.size(), rows.front().size());
    for (std::size_t x = 0; x < rows.size(); ++x) {
      if (rows[x].size() != c.outputs_) throw Error(ErrorCode::LengthMismatch, "ragged count rows");
      for (std::size_t y = 0; y < c.outputs_; ++y) c.add(x, y, rows[x][y]);
    }
    return c;
  }

  std::size_t input_size() const noexcept { return inputs_; }
  std::size_t output_size() const noexcept { return outputs_; }
  std::int64_t count(std::size_t x, std::size_t y) const { return counts_[x * outputs_ + y]; }
  std::int64_t sends(std::size_t x) const { return sends_[x]; }
  const std::vector<std::int64_t>& sends_per_input() const noexcept { return sends_; }

  std::int64_t total() const noexcept {
    std::int64_t t = 0;
    for (auto s : sends_) t += s;
    return t;
  }

  /// Records `n` outputs y for input x.
  void add(std::size_t x, std::size_t y, std::int64_t n) {
    if (x >= inputs_ || y >= outputs_) throw Error(ErrorCode::BadIndex, "count index out of range");
    if (n < 0) throw Error(ErrorCode::NegativeEntry, "negative count");
    counts_[x * outputs_ + y] += n;
    sends_[x] += n;
  }

  CountMatrix& operator+=(const CountMatrix& other) {
    if (other.inputs_ != inputs_ || other.outputs_ != outputs_) {
      throw Error(ErrorCode::AlphabetMismatch, "count matrices differ in shape");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    for (std::size_t x = 0; x < inputs_; ++x) sends_[x] += other.sends_[x];
    return *this;
  }

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> sends_;
};

/// Splits n senses over the inputs: floor(n/|X|) each, remainder to the lowest indices.
inline std::vector<std::int64_t> allocate_inputs(std::int64_t n, std::size_t input_size) {
  if (n < 0) throw Error(ErrorCode::BadParameter, "negative sense count");
  if (input_size < 1) throw Error(ErrorCode::BadParameter, "input_size must be >= 1");
  const auto k = static_cast<std::int64_t>(input_size);
  std::vector<std::int64_t> out(input_size, n / k);
  for (std::int64_t x = 0; x < n % k; ++x) ++out[static_cast<std::size_t>(x)];
  return out;
}

/// Empirical conditional distribution W-hat(y|x) = count(x,y) / sends(x).
inline Channel empirical_channel(const CountMatrix& c) {
  std::vector<double> w(c.input_size() * c.output_size());
  for (std::size_t x = 0; x < c.input_size(); ++x) {
    const std::int64_t s = c.sends(x);
    if (s < 1) throw Error(ErrorCode::EmptyRow, "input " + std::to_string(x) + " was never sent");
    for (std::size_t y = 0; y < c.output_size(); ++y) {
      w[x * c.output_size() + y] = static_cast<double>(c.count(x, y)) / static_cast<double>(s);
    }
  }
  return Channel(c.input_size(), c.output_size(), std::move(w));
}

/// Plug-in capacity estimate C(W-hat).
inline double estimate_capacity(const CountMatrix& c, double tol = 1e-12) {
  return capacity(empirical_channel(c), tol).capacity;
}

struct ConfidenceRadius {
  double value = 0.0;          ///< nats, reported verbatim
  bool log_nonpositive = false;  ///< n * beta <= 1, the ln term is <= 0
  bool vacuous = false;        ///< log_nonpositive, or value exceeds ln min(|X|,|Y|)
};

/// eps = (5 sqrt(n_alpha) / 4) ln(n beta) / sqrt(n) + n_alpha / n; with probability
/// at least 1 - alpha the plug-in estimate from n senses is within eps of C.
inline ConfidenceRadius confidence_radius(const ConfidenceSpec& spec, std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::BadParameter, "confidence_radius needs n >= 1");
  const double na = spec.n_alpha();
  const double nn = static_cast<double>(n);
  const double nb = nn * spec.beta();
  ConfidenceRadius r;
  r.value = 1.25 * std::sqrt(na) * std::log(nb) / std::sqrt(nn) + na / nn;
  r.log_nonpositive = !(nb > 1.0);
  const double cap_max = std::log(static_cast<double>(std::min(spec.input_size, spec.output_size)));
  r.vacuous = r.log_nonpositive || r.value > cap_max;
  return r;
}

/// Smallest n meeting
///   n >= max{ C_lin n_a / eps^2 ln^2(beta-bar_a n_a / eps^2), 2 n_a / eps }.
inline std::int64_t required_samples(const ConfidenceSpec& spec, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::BadEps, "eps must be > 0");
  const double na = spec.n_alpha();
  const double lg = std::log(spec.beta_bar() * na / (eps * eps));
  const double first = kLinearFactor * na / (eps * eps) * lg * lg;
  const double second = 2.0 * na / eps;
  return detail::checked_ceil(std::max(first, second));
}

/// Radius of the empirical TV bound sqrt(4 |Y| ln(1/alpha) / n).
inline double tv_radius(double alpha, std::int64_t n, std::size_t output_size) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::BadAlpha, "alpha must lie in (0,1)");
  if (n < 1) throw Error(ErrorCode::BadParameter, "tv_radius needs n >= 1");
  return std::sqrt(4.0 * static_cast<double>(output_size) * std::log(1.0 / alpha) / static_cast<double>(n));
}

/// n0 = ceil(15 ln^2(beta/y) / y); ln^2(beta n)/n <= y for all n >= n0.
/// Valid for 0 < y <= 4 beta / e^2.
inline std::int64_t sufficiency_check(double beta, double y) {
  if (!(beta > 0.0)) throw Error(ErrorCode::BadParameter, "beta must be > 0");
  const double e2 = std::numbers::e * std::numbers::e;
  if (!(y > 0.0 && y <= 4.0 * beta / e2)) throw Error(ErrorCode::BadY, "y must lie in (0, 4 beta / e^2]");
  const double l = std::log(beta / y);
  return detail::checked_ceil(15.0 * l * l / y);
}

/// n'_alpha = 2 (3|X| + 2)^2 ln(4/alpha), for estimation at a known
/// capacity-achieving input.
inline double n_factor_prime(double alpha, std::size_t input_size) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::BadAlpha, "alpha must lie in (0,1)");
  const double t = 3.0 * static_cast<double>(input_size) + 2.0;
  return 2.0 * t * t * std::log(4.0 / alpha);
}

}  // namespace dmcid
