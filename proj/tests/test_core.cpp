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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "dmcid/capacity.hpp"
#include "dmcid/channel.hpp"
#include "dmcid/information.hpp"
#include "oracle_values.hpp"
#include "test_util.hpp"

namespace dmcid {
namespace {

using testing::random_channel;
using testing::random_simplex_point;

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Distribution, ValidatesEntries) {
  EXPECT_NO_THROW(Distribution({0.25, 0.75}));
  expect_code(ErrorCode::NegativeEntry, [] { Distribution({-0.1, 1.1}); });
  expect_code(ErrorCode::NonStochasticRow, [] { Distribution({0.5, 0.6}); });
  expect_code(ErrorCode::BadParameter, [] { Distribution(std::vector<double>{}); });
  EXPECT_DOUBLE_EQ(Distribution::normalized({1, 3})[1], 0.75);
  EXPECT_DOUBLE_EQ(Distribution::uniform(4).min(), 0.25);
}

TEST(Channel, Constructors) {
  const auto b = bsc(0.11);
  EXPECT_EQ(b.rows(), (std::vector<std::vector<double>>{{0.89, 0.11}, {0.11, 0.89}}));
  const auto z = z_channel(0.5);
  EXPECT_EQ(z.rows(), (std::vector<std::vector<double>>{{1.0, 0.0}, {0.5, 0.5}}));
  EXPECT_EQ(z_channel(0.5, 0.1).rows(), (std::vector<std::vector<double>>{{0.9, 0.1}, {0.5, 0.5}}));
  const auto e = binary_erasure(0.2);
  EXPECT_EQ(e.output_size(), 3u);
  EXPECT_DOUBLE_EQ(e(1, 2), 0.8);
  EXPECT_EQ(identity_channel(3)(2, 2), 1.0);
}

TEST(Channel, Errors) {
  expect_code(ErrorCode::NonStochasticRow, [] { Channel::from_rows({{0.5, 0.6}, {0.5, 0.5}}); });
  expect_code(ErrorCode::NegativeEntry, [] { Channel::from_rows({{1.1, -0.1}, {0.5, 0.5}}); });
  expect_code(ErrorCode::LengthMismatch, [] { Channel::from_rows({{1.0, 0.0}, {1.0}}); });
  expect_code(ErrorCode::BadParameter, [] { Channel::from_rows({{1.0}}); });
  expect_code(ErrorCode::BadParameter, [] { bsc(0.0); });
  expect_code(ErrorCode::BadParameter, [] { z_channel(1.0); });
  expect_code(ErrorCode::BadParameter, [] {
    Xoshiro256 g(1);
    random_dirichlet_channel(2, 2, 0.0, g);
  });
}

TEST(Channel, RowToleranceRenormalizes) {
  const auto ch = Channel::from_rows({{0.5 + 4e-10, 0.5}, {0.3, 0.7}});
  EXPECT_NEAR(ch(0, 0) + ch(0, 1), 1.0, 1e-15);
}

TEST(Channel, DirichletIsSeeded) {
  Xoshiro256 a(42), b(42);
  EXPECT_EQ(random_dirichlet_channel(3, 4, 1.0, a), random_dirichlet_channel(3, 4, 1.0, b));
}

TEST(Channel, Permuted) {
  const auto ch = Channel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}});
  const std::vector<std::size_t> in{1, 0}, out{2, 0, 1};
  const auto v = ch.permuted(in, out);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 3; ++y) EXPECT_EQ(v(x, y), ch(in[x], out[y]));
}

TEST(Information, KlDivergence) {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(p, q), oracle::kKlHalfQuarter, 1e-15);
  EXPECT_EQ(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1}), kInfiniteDivergence);
  EXPECT_EQ(kl_divergence(std::vector<double>{0, 1}, std::vector<double>{0.5, 0.5}), std::log(2.0));
  expect_code(ErrorCode::LengthMismatch,
              [] { kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}); });
}

TEST(Information, MutualInformation) {
  EXPECT_NEAR(mutual_information(Distribution::uniform(2), identity_channel(2)), std::log(2.0), 1e-15);
  const auto flat = Channel::from_rows({{0.3, 0.7}, {0.3, 0.7}});
  EXPECT_NEAR(mutual_information(Distribution({0.2, 0.8}), flat), 0.0, 1e-15);
  EXPECT_NEAR(mutual_information(Distribution::uniform(2), bsc(0.11)), oracle::kBsc011, 1e-14);
  expect_code(ErrorCode::LengthMismatch, [] { mutual_information(Distribution::uniform(3), bsc(0.1)); });
  EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
}

TEST(Capacity, ClosedForms) {
  EXPECT_NEAR(capacity(identity_channel(2)).capacity, std::log(2.0), 1e-12);
  EXPECT_NEAR(capacity(identity_channel(5)).capacity, std::log(5.0), 1e-12);
  EXPECT_NEAR(capacity(bsc(0.05)).capacity, oracle::kBsc005, 1e-12);
  EXPECT_NEAR(capacity(bsc(0.11)).capacity, oracle::kBsc011, 1e-12);
  EXPECT_NEAR(capacity(bsc(0.25)).capacity, oracle::kBsc025, 1e-12);
  EXPECT_NEAR(capacity(bsc(0.49)).capacity, oracle::kBsc049, 1e-12);
  EXPECT_NEAR(capacity(binary_erasure(0.1)).capacity, oracle::kBec01, 1e-11);
}

TEST(Capacity, ZChannelAgainstIndependentMaximization) {
  EXPECT_NEAR(capacity(z_channel(0.1)).capacity, oracle::kZTrue01, 1e-10);
  EXPECT_NEAR(capacity(z_channel(0.5)).capacity, oracle::kZTrue05, 1e-10);
  EXPECT_NEAR(capacity(z_channel(0.9)).capacity, oracle::kZTrue09, 1e-10);
  EXPECT_NEAR(oracle::kZTrue05, std::log(1.25), 1e-15);
}

TEST(Capacity, GeneralChannels) {
  const auto w3 = Channel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}, {0.25, 0.25, 0.5}});
  const auto r = capacity(w3);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.capacity, oracle::kW3Capacity, 1e-11);
  EXPECT_LE(r.duality_gap, 1e-12);
  const auto w24 = Channel::from_rows({{0.5, 0.3, 0.2, 0.0}, {0.0, 0.1, 0.2, 0.7}});
  EXPECT_NEAR(capacity(w24).capacity, oracle::kW24Capacity, 1e-11);
}

TEST(Capacity, OutputDistIsInduced) {
  const auto ch = Channel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}});
  const auto r = capacity(ch);
  const auto py = output_marginal(r.input_dist.probs(), ch);
  for (std::size_t y = 0; y < py.size(); ++y) EXPECT_NEAR(py[y], r.output_dist[y], 1e-14);
  EXPECT_NEAR(mutual_information(r.input_dist, ch), r.capacity, 1e-13);
}

TEST(Capacity, MaxIterFlagsNonConvergence) {
  const auto ch = Channel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}, {0.25, 0.25, 0.5}});
  const auto r = capacity(ch, 1e-12, 2);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_GT(r.duality_gap, 1e-12);
  expect_code(ErrorCode::BadParameter, [&] { capacity(ch, 0.0); });
  expect_code(ErrorCode::BadParameter, [&] { capacity(ch, 1e-9, 0); });
}

TEST(Capacity, SingleInputHasZeroCapacity) {
  const auto r = capacity(Channel(1, 3, {0.2, 0.3, 0.5}));
  EXPECT_EQ(r.capacity, 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(DualValue, Examples) {
  const auto b = bsc(0.11);
  EXPECT_NEAR(dual_value(b, Distribution::uniform(2)), oracle::kBsc011, 1e-14);
  EXPECT_NEAR(dual_value(b, Distribution({0.9, 0.1})), oracle::kBsc011Skewed, 1e-13);
  const auto flat = Channel::from_rows({{0.3, 0.7}, {0.3, 0.7}});
  EXPECT_EQ(dual_value(flat, Distribution({0.3, 0.7})), 0.0);
  EXPECT_EQ(dual_value(b, Distribution({1.0, 0.0})), kInfiniteDivergence);
  expect_code(ErrorCode::LengthMismatch, [&] { dual_value(b, Distribution::uniform(3)); });
}

TEST(DualityProperty, WeakDualityOnRandomPairs) {
  Xoshiro256 gen(1001);
  for (int i = 0; i < 1000; ++i) {
    const auto ch = random_channel(gen);
    const auto q = random_simplex_point(gen, ch.output_size());
    ASSERT_GE(dual_value(ch, q), capacity(ch).capacity - 1e-9) << "pair " << i;
  }
}

TEST(DualityProperty, StrongDualityAndRange) {
  Xoshiro256 gen(1002);
  for (int i = 0; i < 100; ++i) {
    const auto ch = random_channel(gen);
    const auto r = capacity(ch);
    ASSERT_LE(dual_value(ch, r.output_dist) - r.capacity, 1e-6);
    ASSERT_GE(r.duality_gap, 0.0);
    ASSERT_LE(r.duality_gap, 1e-11);
    ASSERT_GE(r.capacity, 0.0);
    ASSERT_LE(r.capacity,
              std::log(static_cast<double>(std::min(ch.input_size(), ch.output_size()))) + 1e-12);
  }
}

TEST(DualityProperty, PermutationInvariance) {
  Xoshiro256 gen(1003);
  for (int i = 0; i < 100; ++i) {
    const auto ch = random_channel(gen, 5);
    std::vector<std::size_t> in(ch.input_size()), out(ch.output_size());
    std::iota(in.begin(), in.end(), std::size_t{0});
    std::iota(out.begin(), out.end(), std::size_t{0});
    std::shuffle(in.begin(), in.end(), gen);
    std::shuffle(out.begin(), out.end(), gen);
    ASSERT_NEAR(capacity(ch.permuted(in, out)).capacity, capacity(ch).capacity, 1e-9);
  }
}

TEST(FloorProjection, Construction) {
  const auto q = floor_projection(std::vector<double>{0.9, 0.09, 0.01}, 0.05);
  EXPECT_GE(q.min(), 0.05 - 1e-15);
  // Unclipped entries keep their ratio.
  EXPECT_NEAR(q[0] / q[1], 10.0, 1e-12);
  EXPECT_NEAR(q[2], 0.05, 1e-15);
  const auto same = floor_projection(std::vector<double>{0.5, 0.5}, 0.1);
  EXPECT_EQ(same.values(), (std::vector<double>{0.5, 0.5}));
  expect_code(ErrorCode::BadEta, [] { floor_projection(std::vector<double>{0.5, 0.5}, 0.5); });
  expect_code(ErrorCode::BadEta, [] { floor_projection(std::vector<double>{0.5, 0.5}, -0.1); });
}

TEST(FloorProjection, KlBoundOnRandomOutputs) {
  Xoshiro256 gen(1004);
  for (int i = 0; i < 100; ++i) {
    const std::size_t ny = 2 + gen() % 6;
    const auto p = random_simplex_point(gen, ny);
    const double eta = gen.uniform() / (2.0 * static_cast<double>(ny));
    const auto q = floor_projection(p, eta);
    ASSERT_GE(q.min(), eta * (1.0 - 1e-12));
    ASSERT_LE(kl_divergence(std::span<const double>(p), q.probs()), 2.0 * eta * static_cast<double>(ny));
  }
}

TEST(PseudoCapacity, Examples) {
  const auto b = bsc(0.11);
  EXPECT_NEAR(pseudo_capacity(b, 0.0), capacity(b).capacity, 1e-11);
  const double v = pseudo_capacity(b, 0.01);
  EXPECT_GE(v, oracle::kBsc011 - 1e-12);
  EXPECT_LE(v, oracle::kBsc011 + 2 * 0.01 * 2);
  EXPECT_NEAR(v, oracle::kPseudoBsc011Eta001, 1e-8);

  const auto e = binary_erasure(0.005);
  const double ve = pseudo_capacity(e, 0.01);
  EXPECT_GT(ve, capacity(e).capacity + 1e-4);
  EXPECT_NEAR(ve, oracle::kPseudoBec0005Eta001, 1e-8);
  EXPECT_NEAR(capacity(e).capacity, oracle::kCapBec0005, 1e-12);

  const auto w3 = Channel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}, {0.25, 0.25, 0.5}});
  EXPECT_NEAR(pseudo_capacity(w3, 0.2), oracle::kPseudoW3Eta02, 1e-8);
}

TEST(PseudoCapacity, CertificateAndErrors) {
  const auto e = binary_erasure(0.005);
  const auto r = pseudo_capacity_solve(e, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.lower_bound, r.value);
  EXPECT_LT(r.value - r.lower_bound, 1e-12);
  EXPECT_GE(r.output_dist.min(), 0.01 * (1 - 1e-12));
  EXPECT_NEAR(dual_value(e, r.output_dist), r.value, 1e-15);
  expect_code(ErrorCode::BadEta, [&] { pseudo_capacity(e, 1.0 / 3.0); });
  expect_code(ErrorCode::BadEta, [&] { pseudo_capacity(e, -1e-3); });
}

TEST(PseudoCapacity, SandwichOnRandomChannels) {
  Xoshiro256 gen(1005);
  for (int i = 0; i < 100; ++i) {
    const auto ch = random_channel(gen);
    const double c = capacity(ch).capacity;
    for (double eta : {1e-3, 1e-2}) {
      const double v = pseudo_capacity(ch, eta, 1e-10);
      ASSERT_GE(v - c, -1e-9) << "channel " << i << " eta " << eta;
      ASSERT_LE(v - c, 2.0 * eta * static_cast<double>(ch.output_size()) + 1e-6);
    }
  }
}

}  // namespace
}  // namespace dmcid
