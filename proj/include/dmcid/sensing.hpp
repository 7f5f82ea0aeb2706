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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dmcid/capacity.hpp"
#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"
#include "dmcid/estimation.hpp"
#include "dmcid/rng.hpp"

namespace dmcid {

/// Draws Multinomial(n, probs) into `out` by sequential conditional binomials.
template <class Engine>
void sample_multinomial(std::int64_t n, std::span<const double> probs, Engine& gen,
                        std::span<std::int64_t> out) {
  std::int64_t remaining = n;
  double mass = 1.0;
  for (std::size_t y = 0; y < probs.size(); ++y) {
    if (remaining == 0 || y + 1 == probs.size()) {
      out[y] = remaining;
      remaining = 0;
      continue;
    }
    const double p = mass > 0.0 ? std::clamp(probs[y] / mass, 0.0, 1.0) : 0.0;
    std::int64_t draw = 0;
    if (p >= 1.0) {
      draw = remaining;
    } else if (p > 0.0) {
      std::binomial_distribution<std::int64_t> bin(remaining, p);
      draw = bin(gen);
    }
    out[y] = draw;
    remaining -= draw;
    mass -= probs[y];
  }
}

/// Sense counts per (channel, input symbol).
class SenseLedger {
 public:
  SenseLedger(std::size_t channels, std::size_t input_size)
      : inputs_(input_size), sends_(channels * input_size, 0) {}

  std::size_t channel_count() const noexcept { return inputs_ == 0 ? 0 : sends_.size() / inputs_; }
  std::size_t input_size() const noexcept { return inputs_; }
  std::int64_t sends(std::size_t channel, std::size_t x) const { return sends_[channel * inputs_ + x]; }
  std::int64_t total() const noexcept { return total_; }

  std::int64_t channel_total(std::size_t channel) const {
    std::int64_t t = 0;
    for (std::size_t x = 0; x < inputs_; ++x) t += sends(channel, x);
    return t;
  }

  void record(std::size_t channel, std::size_t x, std::int64_t n) {
    sends_[channel * inputs_ + x] += n;
    total_ += n;
  }

 private:
  std::size_t inputs_;
  std::vector<std::int64_t> sends_;
  std::int64_t total_ = 0;
};

/// Simulated sensing over k hidden channels. Each channel owns an independent
/// random stream derived from (seed, channel index), so draws on one channel
/// do not depend on how others were sensed.
class Environment {
 public:
  Environment(std::vector<Channel> channels, std::uint64_t seed)
      : channels_(std::move(channels)), seed_(seed), ledger_(0, 0) {
    if (channels_.empty()) throw Error(ErrorCode::EmptySet, "environment needs at least one channel");
    for (const auto& ch : channels_) {
      if (!ch.same_alphabets(channels_.front())) {
        throw Error(ErrorCode::AlphabetMismatch, "all channels must share |X| and |Y|");
      }
    }
    streams_.reserve(channels_.size());
    for (std::size_t j = 0; j < channels_.size(); ++j) streams_.emplace_back(derive_stream_seed(seed, j));
    ledger_ = SenseLedger(channels_.size(), input_size());
  }

  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;
  Environment(Environment&&) = default;
  Environment& operator=(Environment&&) = default;

  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t input_size() const noexcept { return channels_.front().input_size(); }
  std::size_t output_size() const noexcept { return channels_.front().output_size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const SenseLedger& ledger() const noexcept { return ledger_; }

  /// Ground truth, for scoring only; algorithms must not read it.
  const std::vector<Channel>& channels() const noexcept { return channels_; }

  /// Sends input x per_input[x] times through channel j; output counts are
  /// Multinomial(per_input[x], W_j(.|x)).
  CountMatrix sense_batch(std::size_t j, std::span<const std::int64_t> per_input) {
    check_index(j);
    if (per_input.size() != input_size()) throw Error(ErrorCode::LengthMismatch, "per_input size");
    for (auto n : per_input)
      if (n < 0) throw Error(ErrorCode::BadParameter, "negative per-input sense count");
    CountMatrix counts(input_size(), output_size());
    std::vector<std::int64_t> row(output_size());
    for (std::size_t x = 0; x < input_size(); ++x) {
      if (per_input[x] == 0) continue;
      sample_multinomial(per_input[x], channels_[j].row(x), streams_[j], std::span<std::int64_t>(row));
      for (std::size_t y = 0; y < row.size(); ++y) counts.add(x, y, row[y]);
      ledger_.record(j, x, per_input[x]);
    }
    return counts;
  }

  /// n senses with the inputs allocated uniformly.
  CountMatrix sense_uniform(std::size_t j, std::int64_t n) {
    const auto alloc = allocate_inputs(n, input_size());
    return sense_batch(j, alloc);
  }

  /// One channel use: returns the observed output symbol.
  std::size_t sense_one(std::size_t j, std::size_t x) {
    check_index(j);
    if (x >= input_size()) throw Error(ErrorCode::BadIndex, "input symbol out of range");
    const auto r = channels_[j].row(x);
    const double u = streams_[j].uniform();
    double acc = 0.0;
    std::size_t y = 0;
    for (; y + 1 < r.size(); ++y) {
      acc += r[y];
      if (u < acc) break;
    }
    ledger_.record(j, x, 1);
    return y;
  }

 private:
  void check_index(std::size_t j) const {
    if (j >= channels_.size()) throw Error(ErrorCode::BadIndex, "channel index " + std::to_string(j));
  }

  std::vector<Channel> channels_;
  std::uint64_t seed_;
  std::vector<Xoshiro256> streams_;
  SenseLedger ledger_;
};

struct GapReport {
  std::vector<double> capacities;
  std::vector<double> gaps;  ///< C_best - C_j
  std::size_t best = 0;      ///< lowest index attaining the maximum
  bool unique_best = true;   ///< false when another capacity is within 1e-9 of the best
};

/// Suboptimality gaps; ties are reported, not thrown.
inline GapReport gaps(const std::vector<Channel>& channels) {
  if (channels.empty()) throw Error(ErrorCode::EmptySet, "gaps needs at least one channel");
  GapReport r;
  for (const auto& ch : channels) r.capacities.push_back(capacity(ch, 1e-12).capacity);
  r.best = static_cast<std::size_t>(std::max_element(r.capacities.begin(), r.capacities.end()) -
                                    r.capacities.begin());
  const double cbest = r.capacities[r.best];
  for (std::size_t j = 0; j < channels.size(); ++j) {
    r.gaps.push_back(cbest - r.capacities[j]);
    if (j != r.best && r.gaps.back() <= 1e-9) r.unique_best = false;
  }
  return r;
}

}  // namespace dmcid
