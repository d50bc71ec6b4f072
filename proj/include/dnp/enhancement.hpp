// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Core>

#include "dnp/audio_clip.hpp"
#include "dnp/prior_mask.hpp"
#include "dnp/spectral.hpp"

namespace dnp {

inline constexpr double kXiMin = 1e-4;
inline constexpr double kXiMax = 1e3;
inline constexpr double kGammaMin = 1e-4;
inline constexpr double kGammaMax = 1e4;

/// Spectral gain per time-frequency bin, entries in [0, 1].
struct GainField {
  Eigen::MatrixXd data;
};

struct EnhanceConfig {
  StftConfig stft;
  double xi_max = kXiMax;
  double highpass_hz = 60.0;
  /// The noisy clip is zero padded to this multiple before analysis so its
  /// STFT lines up with a mask estimated on the padded clip (2^num_layers).
  Eigen::Index pad_multiple = 64;
};

/// xi = M / (1 - M) clamped to [kXiMin, xi_max]; the inverse of the Wiener
/// gain M = xi / (1 + xi).
Eigen::MatrixXd mask_to_prior_snr(const MaskMatrix& mask, double xi_max = kXiMax);

/// MMSE log-spectral amplitude gain (xi / (1 + xi)) exp(E1(v) / 2) with
/// v = xi gamma / (1 + xi), v floored at 1e-10. The gain is capped at 1 so
/// enhancement never amplifies a bin.
GainField lsa_gain(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& gamma);

/// gamma = |Y|^2 / lambda clamped to [kGammaMin, kGammaMax], where the noise
/// PSD lambda of each bin is the mean over frames of (1 - M)^2 |Y|^2,
/// floored at 1e-12.
Eigen::MatrixXd posterior_snr(const Spectrogram& noisy, const MaskMatrix& mask);

/// Zeroes every bin below ceil(cutoff / bin width); at 16 kHz with a
/// 512-sample frame that is bins 0 and 1 (below 62.5 Hz).
Spectrogram highpass(const Spectrogram& spec, double cutoff_hz = 60.0);

/// LSA enhancement of y driven by a mask estimated from y with the same STFT
/// settings. Output has the length of y.
AudioClip enhance(const AudioClip& y, const MaskMatrix& mask, const EnhanceConfig& cfg = {});

/// Highpass alone, the reference for the identity path.
AudioClip highpass_clip(const AudioClip& y, const EnhanceConfig& cfg = {});

/// Decision-directed Wiener filter: noise PSD from the first noise_frames
/// frames, xi_t = 0.98 |X_{t-1}|^2 / lambda + 0.02 max(gamma_t - 1, 0),
/// gain xi / (1 + xi), then the same highpass and resynthesis as enhance.
AudioClip wiener_baseline(const AudioClip& y, int noise_frames = 6, const EnhanceConfig& cfg = {});

}  // namespace dnp
