// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dnp/prior_mask.hpp"
#include "dnp/random.hpp"
#include "dnp/synth.hpp"

namespace {

dnp::MaskMatrix iota_row(int n) {
  dnp::MaskMatrix m{Eigen::MatrixXd(1, n), dnp::MaskRole::kFluctuation};
  for (int i = 0; i < n; ++i) m.data(0, i) = i;
  return m;
}

Eigen::MatrixXd random_matrix(dnp::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.uniform();
  return m;
}

dnp::MaskConfig small_config(int iterations) {
  dnp::MaskConfig cfg;
  cfg.iterations = iterations;
  cfg.net.num_layers = 3;
  cfg.net.filters_per_layer = 6;
  cfg.lr = 2e-3;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST_CASE("relative_diff") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(2, 3, 0.7);
  CHECK(dnp::relative_diff(a, a, 1e-8).data.isZero(0.0));

  Eigen::MatrixXd cur(1, 2), prev(1, 2);
  cur << 2.0, 0.0;
  prev << 1.0, 1.0;
  const dnp::MaskMatrix h = dnp::relative_diff(cur, prev, 1e-8);
  CHECK(h.role == dnp::MaskRole::kFluctuation);
  CHECK(h.data(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(h.data(0, 1) == doctest::Approx(1e8));
  CHECK(std::isfinite(h.data(0, 1)));

  CHECK_THROWS_AS(dnp::relative_diff(cur, Eigen::MatrixXd::Zero(2, 1), 1e-8), dnp::ArgumentError);
}

TEST_CASE("nearest-rank percentile") {
  const dnp::MaskMatrix m = iota_row(10);
  CHECK(dnp::percentile(m, 10) == 0.0);
  CHECK(dnp::percentile(m, 90) == 8.0);
  CHECK(dnp::percentile(m, 100) == 9.0);
  CHECK(dnp::percentile(m, 0) == 0.0);
  CHECK(dnp::percentile(m, 50) == 4.0);
  CHECK(dnp::percentile(m, 51) == 5.0);

  // Flattened over the whole matrix regardless of shape or order.
  dnp::MaskMatrix square{Eigen::MatrixXd(2, 5), dnp::MaskRole::kFluctuation};
  square.data << 9, 3, 0, 7, 5, 1, 8, 2, 6, 4;
  CHECK(dnp::percentile(square, 90) == 8.0);
  CHECK(dnp::percentile(square, 10) == 0.0);

  CHECK_THROWS_AS(dnp::percentile(dnp::MaskMatrix{}, 50), dnp::ArgumentError);
  CHECK_THROWS_AS(dnp::percentile(m, 101), dnp::ArgumentError);
  CHECK_THROWS_AS(dnp::percentile(m, -1), dnp::ArgumentError);
}

TEST_CASE("clip_between") {
  const dnp::MaskMatrix m = iota_row(10);
  const dnp::MaskMatrix clipped = dnp::clip_between(m, 0.0, 8.0);
  for (int i = 0; i < 9; ++i) CHECK(clipped.data(0, i) == i);
  CHECK(clipped.data(0, 9) == 8.0);
  CHECK(dnp::clip_between(m, 3.5, 3.5).data.isConstant(3.5, 0.0));
  const dnp::MaskMatrix twice = dnp::clip_between(clipped, 0.0, 8.0);
  CHECK(twice.data == clipped.data);
  CHECK_THROWS_AS(dnp::clip_between(m, 2.0, 1.0), dnp::ArgumentError);
}

TEST_CASE("normalize_flip") {
  dnp::MaskMatrix c{Eigen::MatrixXd(2, 2), dnp::MaskRole::kAccumulator};
  c.data << 0, 1, 2, 4;
  const dnp::MaskMatrix m = dnp::normalize_flip(c);
  CHECK(m.role == dnp::MaskRole::kMask);
  CHECK(m.data(0, 0) == 1.0);
  CHECK(m.data(0, 1) == 0.75);
  CHECK(m.data(1, 0) == 0.5);
  CHECK(m.data(1, 1) == 0.0);

  CHECK(dnp::normalize_flip({Eigen::MatrixXd::Constant(3, 4, 2.5), dnp::MaskRole::kAccumulator}).data.isOnes(0.0));

  dnp::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const dnp::MaskMatrix acc{random_matrix(rng, 7, 9, 10.0), dnp::MaskRole::kAccumulator};
    const dnp::MaskMatrix mask = dnp::normalize_flip(acc);
    Eigen::Index r, col;
    acc.data.minCoeff(&r, &col);
    CHECK(mask.data(r, col) == 1.0);
    acc.data.maxCoeff(&r, &col);
    CHECK(mask.data(r, col) == 0.0);
  }
}

TEST_CASE("mask stays in [0, 1] for random fluctuation sequences") {
  dnp::Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.next_u64() % 12);
    const Eigen::Index cols = 1 + static_cast<Eigen::Index>(rng.next_u64() % 12);
    const int steps = 1 + static_cast<int>(rng.next_u64() % 4);
    const double scale = std::pow(10.0, rng.uniform(-6.0, 6.0));
    dnp::MaskMatrix acc{Eigen::MatrixXd::Zero(rows, cols), dnp::MaskRole::kAccumulator};
    Eigen::MatrixXd prev = random_matrix(rng, rows, cols, scale);
    for (int s = 0; s < steps; ++s) {
      Eigen::MatrixXd cur = random_matrix(rng, rows, cols, scale);
      if (rng.uniform() < 0.2) cur(0, 0) = 0.0;  // silent bin
      const dnp::MaskMatrix h = dnp::relative_diff(cur, prev, 1e-8);
      acc.data += dnp::clip_between(h, dnp::percentile(h, 10), dnp::percentile(h, 90)).data;
      prev = cur;
    }
    const dnp::MaskMatrix mask = dnp::normalize_flip(acc);
    REQUIRE(mask.data.allFinite());
    CHECK(mask.data.minCoeff() >= 0.0);
    CHECK(mask.data.maxCoeff() <= 1.0);
  }
}

TEST_CASE("mask config validation") {
  CHECK_NOTHROW(dnp::MaskConfig{}.validate());
  auto bad = dnp::MaskConfig{};
  bad.pct_low = 90;
  bad.pct_high = 10;
  CHECK_THROWS_AS(bad.validate(), dnp::ArgumentError);
  bad = dnp::MaskConfig{};
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), dnp::ArgumentError);
  bad = dnp::MaskConfig{};
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), dnp::ArgumentError);
  CHECK(dnp::MaskConfig{}.iterations == 5000);
  CHECK(dnp::MaskConfig{}.lr == 5e-4);
  CHECK(dnp::MaskConfig{}.net.num_layers == 6);
  CHECK(dnp::MaskConfig{}.net.filters_per_layer == 60);
  CHECK(dnp::MaskConfig{}.stft.frame_len == 512);
  CHECK(dnp::MaskConfig{}.stft.hop == 128);
}

TEST_CASE("estimate_mask with one iteration") {
  const auto y = dnp::synthesize(dnp::HarmonicStack{}, 1000.0 / 16000.0, 0);
  const auto result = dnp::estimate_mask(y, small_config(1));
  CHECK(result.padded_length == 1000);
  CHECK(result.mask.role == dnp::MaskRole::kMask);
  CHECK(result.mask.data.rows() == dnp::stft_frame_count(1000, {}));
  CHECK(result.mask.data.cols() == 257);
  CHECK(result.mask.data.minCoeff() >= 0.0);
  CHECK(result.mask.data.maxCoeff() <= 1.0);
  CHECK(result.trace.losses.size() == 1);
}

TEST_CASE("estimate_mask pads, is deterministic and matches a hand-rolled accumulation") {
  const auto y = dnp::synthesize(dnp::Chirp{200.0, 3000.0}, 1500.0 / 16000.0, 0);
  auto cfg = small_config(6);
  cfg.sample_every = 2;
  const auto a = dnp::estimate_mask(y, cfg);
  const auto b = dnp::estimate_mask(y, cfg);
  CHECK(a.mask.data == b.mask.data);
  CHECK(a.trace.losses == b.trace.losses);
  CHECK(a.padded_length == 1504);
  CHECK(a.mask.data.rows() == dnp::stft_frame_count(1504, {}));
  CHECK(a.trace.snapshots.size() == 3);
  CHECK(a.trace.snapshots.at(4).size() == y.size());

  // Same loop written out with the public building blocks.
  auto net = cfg.net;
  net.seed = dnp::weight_seed(cfg.seed);
  auto model = dnp::xavier_init<float>(net);
  const auto target = dnp::pad_to_multiple(y, 8);
  const auto z = dnp::make_input(target.size(), dnp::input_seed(cfg.seed));
  Eigen::MatrixXd prev = dnp::magnitude(dnp::stft(dnp::forward(model, z)));
  dnp::MaskMatrix acc{Eigen::MatrixXd::Zero(prev.rows(), prev.cols()), dnp::MaskRole::kAccumulator};
  for (int i = 0; i < cfg.iterations; ++i) {
    const auto step = dnp::train_step(model, z, target, cfg.lr);
    const Eigen::MatrixXd cur = dnp::magnitude(dnp::stft(step.output));
    const auto h = dnp::relative_diff(cur, prev, cfg.eps);
    acc.data += dnp::clip_between(h, dnp::percentile(h, 10), dnp::percentile(h, 90)).data;
    prev = cur;
  }
  CHECK(dnp::normalize_flip(acc).data == a.mask.data);
}

TEST_CASE("estimate_mask depends on the seed") {
  const auto y = dnp::synthesize(dnp::HarmonicStack{}, 1024.0 / 16000.0, 0);
  auto cfg = small_config(3);
  const auto a = dnp::estimate_mask(y, cfg);
  cfg.seed = 5;
  CHECK(dnp::estimate_mask(y, cfg).mask.data != a.mask.data);
}

TEST_CASE("estimate_mask rejects clips shorter than a frame") {
  const auto y = dnp::synthesize(dnp::Tone{}, 200.0 / 16000.0, 0);
  CHECK_THROWS_AS(dnp::estimate_mask(y, small_config(1)), dnp::ArgumentError);
}
