// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "dnp/audio_clip.hpp"

namespace dnp {

inline constexpr double kSnrCapDb = 120.0;
inline constexpr double kSegmentFloorDb = -10.0;
inline constexpr double kSegmentCeilDb = 35.0;

struct ScoreReport {
  double snr_db = 0.0;
  double ssnr_db = 0.0;
  double lsd_db = 0.0;

  /// "snr_db,ssnr_db,lsd_db"
  static std::string csv_header();
  std::string to_csv() const;
};

/// 10 log10(sum x^2 / sum (x - e)^2), capped at 120 dB.
double snr(const AudioClip& clean, const AudioClip& estimate);

/// Mean over frames of the per-frame SNR clamped to [-10, 35] dB. Frames
/// whose clean energy is at most 1e-8 are skipped.
double segmental_snr(const AudioClip& clean, const AudioClip& estimate, int frame = 512, int hop = 256);

/// RMS over STFT frames (512/128) of the per-frame RMS over bins of
/// 20 log10((|X| + 1e-8) / (|E| + 1e-8)).
double log_spectral_distance(const AudioClip& clean, const AudioClip& estimate);

ScoreReport score(const AudioClip& clean, const AudioClip& estimate);

}  // namespace dnp
