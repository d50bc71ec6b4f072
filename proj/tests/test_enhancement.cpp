// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "doctest.h"
#include "dnp/enhancement.hpp"
#include "dnp/expint.hpp"
#include "dnp/random.hpp"
#include "dnp/synth.hpp"
#include "support/oracles.hpp"

namespace {

dnp::MaskMatrix constant_mask(Eigen::Index rows, Eigen::Index cols, double value) {
  return {Eigen::MatrixXd::Constant(rows, cols, value), dnp::MaskRole::kMask};
}

dnp::MaskMatrix mask_for(const dnp::AudioClip& y, double value, const dnp::EnhanceConfig& cfg = {}) {
  const auto spec = dnp::stft(dnp::pad_to_multiple(y, cfg.pad_multiple), cfg.stft);
  return constant_mask(spec.num_frames(), spec.num_bins(), value);
}

double energy(const dnp::AudioClip& c) { return c.samples.squaredNorm(); }

}  // namespace

TEST_CASE("mask_to_prior_snr") {
  Eigen::MatrixXd m(1, 4);
  m << 0.5, 1.0, 0.0, 0.75;
  const Eigen::MatrixXd xi = dnp::mask_to_prior_snr({m, dnp::MaskRole::kMask});
  CHECK(xi(0, 0) == 1.0);
  CHECK(xi(0, 1) == dnp::kXiMax);
  CHECK(xi(0, 2) == dnp::kXiMin);
  CHECK(xi(0, 3) == doctest::Approx(3.0));
  CHECK(dnp::mask_to_prior_snr({m, dnp::MaskRole::kMask}, 50.0)(0, 1) == 50.0);
}

TEST_CASE("expint_e1 against adaptive quadrature") {
  CHECK(dnp::oracle::expint_e1_quadrature(0.5) == doctest::Approx(0.559774).epsilon(1e-6));
  for (double x : {1e-6, 1e-3, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0, 1.1, 2.0, 3.7, 5.0, 10.0}) {
    const double reference = dnp::oracle::expint_e1_quadrature(x);
    CAPTURE(x);
    CHECK(std::abs(dnp::expint_e1(x) - reference) <= 1e-10 * reference);
  }
  // The C++17 special-math Ei gives a third route: E1(x) = -Ei(-x).
  for (double x : {1e-6, 0.1, 0.5, 1.0, 2.0, 10.0, 25.0, 80.0}) {
    CAPTURE(x);
    CHECK(std::abs(dnp::expint_e1(x) + std::expint(-x)) <= 1e-12 * dnp::expint_e1(x));
  }
  CHECK(dnp::expint_e1(10.0) < 5e-6);
  CHECK(dnp::expint_e1(0.5) > dnp::expint_e1(1.0));
  CHECK(dnp::expint_e1(800.0) == 0.0);
  CHECK_THROWS_AS(dnp::expint_e1(0.0), dnp::ArgumentError);
  CHECK_THROWS_AS(dnp::expint_e1(-1.0), dnp::ArgumentError);
  CHECK_THROWS_AS(dnp::expint_e1(std::nan("")), dnp::ArgumentError);
}

TEST_CASE("lsa_gain values") {
  const double reference = 0.5 * std::exp(0.5 * dnp::oracle::expint_e1_quadrature(0.5));
  CHECK(reference == doctest::Approx(0.6615).epsilon(1e-4));
  const auto unit = dnp::lsa_gain(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1));
  CHECK(std::abs(unit.data(0, 0) - reference) < 1e-10);

  for (double gamma : {dnp::kGammaMin, 0.1, 1.0, 10.0, dnp::kGammaMax}) {
    const auto top = dnp::lsa_gain(Eigen::MatrixXd::Constant(1, 1, dnp::kXiMax), Eigen::MatrixXd::Constant(1, 1, gamma));
    CHECK(std::abs(top.data(0, 0) - 1.0) < 1e-3);
  }
  // At the xi floor the gain vanishes once the observation is not far below the noise level.
  for (double gamma : {1.0, 10.0, 1e3, dnp::kGammaMax}) {
    const auto floor = dnp::lsa_gain(Eigen::MatrixXd::Constant(1, 1, dnp::kXiMin), Eigen::MatrixXd::Constant(1, 1, gamma));
    CHECK(floor.data(0, 0) < 1e-2);
  }
  CHECK_THROWS_AS(dnp::lsa_gain(Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Ones(1, 2)), dnp::ArgumentError);
}

TEST_CASE("lsa_gain is bounded and agrees with the quadrature form on a grid") {
  Eigen::MatrixXd xi(10, 10), gamma(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      xi(i, j) = dnp::kXiMin * std::pow(dnp::kXiMax / dnp::kXiMin, i / 9.0);
      gamma(i, j) = dnp::kGammaMin * std::pow(dnp::kGammaMax / dnp::kGammaMin, j / 9.0);
    }
  const auto gain = dnp::lsa_gain(xi, gamma);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double wiener = xi(i, j) / (1.0 + xi(i, j));
      const double v = std::max(wiener * gamma(i, j), 1e-10);
      const double reference = std::min(wiener * std::exp(0.5 * dnp::oracle::expint_e1_quadrature(v)), 1.0);
      CHECK(std::abs(gain.data(i, j) - reference) <= 1e-8);
      CHECK(gain.data(i, j) >= 0.0);
      CHECK(gain.data(i, j) <= 1.0 + 1e-6);
    }
}

TEST_CASE("posterior_snr") {
  const auto noise = dnp::synthesize(dnp::WhiteNoise{}, 0.5, 9);
  const auto spec = dnp::stft(noise);
  const auto ones = constant_mask(spec.num_frames(), spec.num_bins(), 1.0);
  const auto zeros = constant_mask(spec.num_frames(), spec.num_bins(), 0.0);

  CHECK(dnp::posterior_snr(spec, ones).minCoeff() == dnp::kGammaMax);

  const Eigen::MatrixXd gamma = dnp::posterior_snr(spec, zeros);
  // Interior bins: mean posterior SNR is 1 by construction of the PSD estimate.
  const double mean_gamma = gamma.middleCols(2, 250).mean();
  CHECK(std::abs(10.0 * std::log10(mean_gamma)) < 3.0);
  CHECK(gamma.minCoeff() >= dnp::kGammaMin);
  CHECK(gamma.maxCoeff() <= dnp::kGammaMax);

  const auto louder = dnp::stft(dnp::AudioClip{2.0 * noise.samples, 16000});
  CHECK((dnp::posterior_snr(louder, zeros) - gamma).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(dnp::posterior_snr(spec, constant_mask(3, 3, 0.5)), dnp::ArgumentError);
}

TEST_CASE("highpass zeroes the bins below the cutoff") {
  const auto tone = dnp::synthesize(dnp::Tone{1000.0}, 0.5, 0);
  const auto spec = dnp::highpass(dnp::stft(tone));
  CHECK(spec.data.leftCols(2).isZero(0.0));
  CHECK(spec.data.col(2) == dnp::stft(tone).data.col(2));

  auto coarse = dnp::stft(tone, {256, 64});  // 62.5 Hz bins: one bin below 60 Hz
  coarse = dnp::highpass(coarse);
  CHECK(coarse.data.col(0).isZero(0.0));
  CHECK(!coarse.data.col(1).isZero(0.0));
  CHECK_THROWS_AS(dnp::highpass(dnp::stft(tone), 9000.0), dnp::ArgumentError);
}

TEST_CASE("highpass on signals") {
  SUBCASE("1000 Hz tone is untouched") {
    const auto tone = dnp::synthesize(dnp::Tone{1000.0}, 0.5, 0);
    const auto out = dnp::highpass_clip(tone);
    CHECK(energy(dnp::AudioClip{out.samples - tone.samples, 16000}) < 0.01 * energy(tone));
  }
  SUBCASE("DC offset is removed") {
    const dnp::AudioClip dc{Eigen::VectorXd::Constant(4096, 0.3), 16000};
    const auto out = dnp::highpass_clip(dc);
    // Edges see the zero padding as a step; away from them the output is silent.
    CHECK(out.samples.segment(512, 4096 - 1024).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("31.25 Hz tone loses the zeroed bins") {
    const auto low = dnp::synthesize(dnp::Tone{31.25}, 0.5, 0);
    const auto out = dnp::highpass_clip(low);
    // Hann leakage into bin 2 survives the bin-zeroing highpass.
    CHECK(energy(out) < 0.5 * energy(low));
  }
}

TEST_CASE("enhance identity path") {
  const auto y = dnp::mix_at_snr(dnp::synthesize(dnp::HarmonicStack{}, 0.5, 0),
                                 dnp::synthesize(dnp::WhiteNoise{}, 0.5, 1), 5.0);
  const auto out = dnp::enhance(y, mask_for(y, 1.0));
  const auto reference = dnp::highpass_clip(y);
  CHECK(out.size() == y.size());
  CHECK((out.samples - reference.samples).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("enhance with a zero mask removes almost everything") {
  const auto y = dnp::mix_at_snr(dnp::synthesize(dnp::HarmonicStack{}, 0.5, 0),
                                 dnp::synthesize(dnp::WhiteNoise{}, 0.5, 1), 5.0);
  const auto out = dnp::enhance(y, mask_for(y, 0.0));
  CHECK(energy(out) < 0.01 * energy(dnp::highpass_clip(y)));
}

TEST_CASE("enhance never adds energy and keeps the phase") {
  dnp::Rng rng(31);
  const auto y = dnp::mix_at_snr(dnp::synthesize(dnp::Chirp{}, 0.4, 0), dnp::synthesize(dnp::WhiteNoise{}, 0.4, 2), 5.0);
  const auto spec = dnp::stft(dnp::pad_to_multiple(y, 64));
  for (int trial = 0; trial < 5; ++trial) {
    dnp::MaskMatrix mask{Eigen::MatrixXd(spec.num_frames(), spec.num_bins()), dnp::MaskRole::kMask};
    for (Eigen::Index i = 0; i < mask.data.size(); ++i) mask.data.data()[i] = rng.uniform();
    const auto out = dnp::enhance(y, mask);
    CHECK(energy(out) <= energy(dnp::highpass_clip(y)) * (1.0 + 1e-6));

    const auto gain = dnp::lsa_gain(dnp::mask_to_prior_snr(mask), dnp::posterior_snr(spec, mask));
    CHECK(gain.data.minCoeff() >= 0.0);
    CHECK(gain.data.maxCoeff() <= 1.0 + 1e-6);
    const Eigen::MatrixXcd enhanced = spec.data.cwiseProduct(gain.data.cast<std::complex<double>>());
    for (Eigen::Index i = 0; i < enhanced.size(); ++i) {
      if (std::abs(enhanced.data()[i]) == 0.0) continue;
      CHECK(std::abs(std::arg(enhanced.data()[i]) - std::arg(spec.data.data()[i])) < 1e-12);
    }
  }
}

TEST_CASE("enhance rejects a mask of the wrong shape") {
  const auto y = dnp::synthesize(dnp::Tone{}, 0.25, 0);
  CHECK_THROWS_AS(dnp::enhance(y, constant_mask(3, 257, 1.0)), dnp::ArgumentError);
  dnp::EnhanceConfig unpadded;
  unpadded.pad_multiple = 1;
  const auto y_odd = dnp::synthesize(dnp::Tone{}, 4090.0 / 16000.0, 0);
  CHECK_THROWS_AS(dnp::enhance(y_odd, mask_for(y_odd, 1.0, unpadded)), dnp::ArgumentError);
  CHECK_NOTHROW(dnp::enhance(y_odd, mask_for(y_odd, 1.0, unpadded), unpadded));
}

TEST_CASE("wiener baseline") {
  SUBCASE("stationary noise collapses") {
    const auto noise = dnp::synthesize(dnp::WhiteNoise{}, 1.0, 4);
    CHECK(energy(dnp::wiener_baseline(noise)) < 0.1 * energy(noise));
  }
  SUBCASE("a tone after a noise preamble passes") {
    auto noise = dnp::synthesize(dnp::WhiteNoise{}, 1.0, 5);
    noise.samples *= 0.05;
    const auto tone = dnp::synthesize(dnp::Tone{1000.0}, 1.0, 0);
    dnp::AudioClip y = noise;
    y.samples.tail(8000) += tone.samples.tail(8000);
    const auto out = dnp::wiener_baseline(y, 6);
    const Eigen::MatrixXd in_mag = dnp::magnitude(dnp::stft(y));
    const Eigen::MatrixXd out_mag = dnp::magnitude(dnp::stft(out));
    const Eigen::Index late = in_mag.rows() - 10;
    CHECK(out_mag(late, 32) / in_mag(late, 32) > 0.8);
    // Noise-only bins stay suppressed.
    CHECK(out_mag.row(late).segment(150, 50).mean() < 0.3 * in_mag.row(late).segment(150, 50).mean());
  }
  SUBCASE("silence stays silent") {
    const dnp::AudioClip silence{Eigen::VectorXd::Zero(4000), 16000};
    CHECK(dnp::wiener_baseline(silence).samples.isZero(0.0));
  }
  SUBCASE("needs room for the noise preamble") {
    const dnp::AudioClip shortclip{Eigen::VectorXd::Ones(6 * 128 + 511), 16000};
    CHECK_THROWS_AS(dnp::wiener_baseline(shortclip, 6), dnp::ArgumentError);
    CHECK_THROWS_AS(dnp::wiener_baseline(shortclip, 0), dnp::ArgumentError);
  }
}
