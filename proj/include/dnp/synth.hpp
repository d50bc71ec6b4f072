// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <variant>

#include "dnp/audio_clip.hpp"

namespace dnp {

struct Tone {
  double frequency_hz = 1000.0;
};

/// Fundamental plus harmonics h = 1..count at amplitude 1/h.
struct HarmonicStack {
  double f0_hz = 125.0;
  int count = 8;
};

/// Linear sweep from start to end frequency over the clip.
struct Chirp {
  double start_hz = 100.0;
  double end_hz = 4000.0;
};

struct WhiteNoise {};

using SynthKind = std::variant<Tone, HarmonicStack, Chirp, WhiteNoise>;

/// Deterministic test signal at 16 kHz, peak-normalized to 0.5. Only
/// WhiteNoise consumes the seed (uniform in [-1, 1) from dnp::Rng).
AudioClip synthesize(const SynthKind& kind, double duration_s, std::uint64_t seed);

/// clean + alpha * noise with alpha = sqrt(P_clean / (P_noise * 10^(snr/10))).
/// The result is not renormalized; a warning goes to stderr if any sample
/// leaves [-1, 1].
AudioClip mix_at_snr(const AudioClip& clean, const AudioClip& noise, double snr_db);

/// The noise gain used by mix_at_snr.
double mixing_gain(const AudioClip& clean, const AudioClip& noise, double snr_db);

}  // namespace dnp
