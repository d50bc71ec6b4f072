// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/synth.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "dnp/random.hpp"

namespace dnp {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

AudioClip synthesize(const SynthKind& kind, double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw ArgumentError("synthesize: duration must be positive");
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * kPipelineRate));
  if (n < 1) throw ArgumentError("synthesize: duration is shorter than one sample");
  const double fs = kPipelineRate;

  Eigen::VectorXd x(n);
  std::visit(overloaded{
                 [&](const Tone& tone) {
                   for (Eigen::Index i = 0; i < n; ++i) x[i] = std::sin(kTwoPi * tone.frequency_hz * i / fs);
                 },
                 [&](const HarmonicStack& stack) {
                   if (stack.count < 1) throw ArgumentError("synthesize: harmonic count must be >= 1");
                   x.setZero();
                   for (int h = 1; h <= stack.count; ++h)
                     for (Eigen::Index i = 0; i < n; ++i) x[i] += std::sin(kTwoPi * stack.f0_hz * h * i / fs) / h;
                 },
                 [&](const Chirp& chirp) {
                   const double rate = (chirp.end_hz - chirp.start_hz) / duration_s;
                   for (Eigen::Index i = 0; i < n; ++i) {
                     const double t = i / fs;
                     x[i] = std::sin(kTwoPi * (chirp.start_hz * t + 0.5 * rate * t * t));
                   }
                 },
                 [&](const WhiteNoise&) {
                   Rng rng(seed);
                   for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
                 },
             },
             kind);

  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= 0.5 / peak;
  return AudioClip{std::move(x), kPipelineRate};
}

double mixing_gain(const AudioClip& clean, const AudioClip& noise, double snr_db) {
  clean.validate();
  noise.validate();
  if (clean.size() != noise.size()) throw ArgumentError("mix_at_snr: clean and noise lengths differ");
  if (clean.sample_rate != noise.sample_rate) throw ArgumentError("mix_at_snr: sample rates differ");
  const double p_noise = mean_power(noise);
  if (p_noise <= 0.0) throw ArgumentError("mix_at_snr: noise has zero power");
  return std::sqrt(mean_power(clean) / (p_noise * std::pow(10.0, snr_db / 10.0)));
}

AudioClip mix_at_snr(const AudioClip& clean, const AudioClip& noise, double snr_db) {
  const double alpha = mixing_gain(clean, noise, snr_db);
  AudioClip out{clean.samples + alpha * noise.samples, clean.sample_rate};
  if (out.samples.cwiseAbs().maxCoeff() > 1.0)
    std::cerr << "warning: mixture exceeds [-1, 1]; it will clip when written as PCM\n";
  return out;
}

}  // namespace dnp
