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
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmcid/error.hpp"
#include "dmcid/rng.hpp"

namespace dmcid {

/// Probability vector over a finite alphabet.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw Error(ErrorCode::BadParameter, "empty distribution");
    double sum = 0.0;
    for (double v : probs_) {
      if (!(v >= 0.0)) throw Error(ErrorCode::NegativeEntry, "distribution entry " + std::to_string(v));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::NonStochasticRow, "distribution sums to " + std::to_string(sum));
    }
  }

  static Distribution uniform(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  /// Rescales nonnegative weights to sum to one.
  static Distribution normalized(std::vector<double> weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw Error(ErrorCode::BadParameter, "weights have no mass");
    for (double& w : weights) w /= sum;
    return Distribution(std::move(weights));
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<double>& values() const noexcept { return probs_; }

  double min() const noexcept {
    double m = probs_.front();
    for (double v : probs_) m = std::min(m, v);
    return m;
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

/// Discrete memoryless channel: row-stochastic |X| x |Y| matrix, row x = W(.|x).
class Channel {
 public:
  static constexpr double kRowTolerance = 1e-9;

  Channel(std::size_t input_size, std::size_t output_size, std::vector<double> row_major)
      : inputs_(input_size), outputs_(output_size), w_(std::move(row_major)) {
    if (inputs_ < 1) throw Error(ErrorCode::BadParameter, "channel needs |X| >= 1");
    if (outputs_ < 2) throw Error(ErrorCode::BadParameter, "channel needs |Y| >= 2");
    if (w_.size() != inputs_ * outputs_) {
      throw Error(ErrorCode::LengthMismatch, "matrix has " + std::to_string(w_.size()) +
                                                 " entries, expected " +
                                                 std::to_string(inputs_ * outputs_));
    }
    for (std::size_t x = 0; x < inputs_; ++x) {
      double sum = 0.0;
      for (std::size_t y = 0; y < outputs_; ++y) {
        const double v = w_[x * outputs_ + y];
        if (!(v >= 0.0)) {
          throw Error(ErrorCode::NegativeEntry,
                      "W(" + std::to_string(y) + "|" + std::to_string(x) + ") = " + std::to_string(v));
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowTolerance) {
        throw Error(ErrorCode::NonStochasticRow,
                    "row " + std::to_string(x) + " sums to " + std::to_string(sum));
      }
      // Rows accepted at 1e-9 are tightened to Distribution precision.
      if (std::abs(sum - 1.0) > Distribution::kSumTolerance) {
        for (std::size_t y = 0; y < outputs_; ++y) w_[x * outputs_ + y] /= sum;
      }
    }
  }

  static Channel from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error(ErrorCode::BadParameter, "channel needs |X| >= 1");
    const std::size_t outputs = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * outputs);
    for (const auto& r : rows) {
      if (r.size() != outputs) throw Error(ErrorCode::LengthMismatch, "ragged channel rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return Channel(rows.size(), outputs, std::move(flat));
  }

  std::size_t input_size() const noexcept { return inputs_; }
  std::size_t output_size() const noexcept { return outputs_; }

  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(w_).subspan(x * outputs_, outputs_);
  }
  double operator()(std::size_t x, std::size_t y) const { return w_[x * outputs_ + y]; }
  const std::vector<double>& data() const noexcept { return w_; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(inputs_);
    for (std::size_t x = 0; x < inputs_; ++x) out[x].assign(row(x).begin(), row(x).end());
    return out;
  }

  /// Relabeled channel V with V(y|x) = W(output_perm[y] | input_perm[x]).
  Channel permuted(std::span<const std::size_t> input_perm,
                   std::span<const std::size_t> output_perm) const {
    if (input_perm.size() != inputs_ || output_perm.size() != outputs_) {
      throw Error(ErrorCode::LengthMismatch, "permutation size");
    }
    std::vector<double> v(w_.size());
    for (std::size_t x = 0; x < inputs_; ++x)
      for (std::size_t y = 0; y < outputs_; ++y)
        v[x * outputs_ + y] = (*this)(input_perm[x], output_perm[y]);
    return Channel(inputs_, outputs_, std::move(v));
  }

  bool same_alphabets(const Channel& other) const noexcept {
    return inputs_ == other.inputs_ && outputs_ == other.outputs_;
  }

  friend bool operator==(const Channel&, const Channel&) = default;

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<double> w_;
};

inline Channel identity_channel(std::size_t n) {
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 1.0;
  return Channel(n, n, std::move(w));
}

/// Binary symmetric channel with crossover probability p.
inline Channel bsc(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadParameter, "bsc crossover must lie in (0,1)");
  return Channel(2, 2, {1.0 - p, p, p, 1.0 - p});
}

/// Perturbed Z-channel [[1-eps, eps], [q, 1-q]]; eps = 0 gives the Z-channel.
inline Channel z_channel(double q, double eps = 0.0) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::BadParameter, "z-channel q must lie in (0,1)");
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorCode::BadParameter, "z-channel eps must lie in [0,1)");
  return Channel(2, 2, {1.0 - eps, eps, q, 1.0 - q});
}

/// Binary erasure channel; output 1 is the erasure symbol.
inline Channel binary_erasure(double erasure) {
  if (!(erasure > 0.0 && erasure < 1.0)) {
    throw Error(ErrorCode::BadParameter, "erasure probability must lie in (0,1)");
  }
  return Channel(2, 3, {1.0 - erasure, erasure, 0.0, 0.0, erasure, 1.0 - erasure});
}

/// Each row drawn independently from a symmetric Dirichlet(concentration).
template <class Engine>
Channel random_dirichlet_channel(std::size_t input_size, std::size_t output_size,
                                 double concentration, Engine& gen) {
  if (!(concentration > 0.0)) throw Error(ErrorCode::BadParameter, "dirichlet concentration must be > 0");
  if (input_size < 1 || output_size < 2) throw Error(ErrorCode::BadParameter, "alphabet sizes");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> w(input_size * output_size);
  for (std::size_t x = 0; x < input_size; ++x) {
    double sum = 0.0;
    do {
      sum = 0.0;
      for (std::size_t y = 0; y < output_size; ++y) {
        w[x * output_size + y] = gamma(gen);
        sum += w[x * output_size + y];
      }
    } while (!(sum > 0.0));
    for (std::size_t y = 0; y < output_size; ++y) w[x * output_size + y] /= sum;
  }
  return Channel(input_size, output_size, std::move(w));
}

}  // namespace dmcid
