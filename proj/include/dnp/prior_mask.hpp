// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "dnp/audio_clip.hpp"
#include "dnp/spectral.hpp"
#include "dnp/train_trace.hpp"
#include "dnp/wave_unet.hpp"

namespace dnp {

enum class MaskRole { kFluctuation, kAccumulator, kMask };

/// Time-frequency matrix (frames x bins) of per-iteration fluctuations, their
/// running sum, or the final [0, 1] mask.
struct MaskMatrix {
  Eigen::MatrixXd data;
  MaskRole role = MaskRole::kMask;
};

struct MaskConfig {
  int iterations = 5000;
  double lr = kDefaultLearningRate;
  double pct_low = 10.0;
  double pct_high = 90.0;
  double eps = 1e-8;
  WaveUnetConfig net;
  StftConfig stft;
  /// Job seed. Initial weights and the network input both derive from it;
  /// net.seed is ignored.
  std::uint64_t seed = 0;
  /// Keep f_i(z) in the returned trace every this many iterations (0: none).
  int sample_every = 0;

  void validate() const;
};

/// |cur - prev| / (cur + eps), element-wise.
MaskMatrix relative_diff(const Eigen::MatrixXd& cur, const Eigen::MatrixXd& prev, double eps);

/// Nearest-rank percentile over all entries: the k-th smallest value with
/// k = max(1, ceil(q / 100 * N)).
double percentile(const MaskMatrix& m, double q);

MaskMatrix clip_between(const MaskMatrix& m, double lo, double hi);

/// (max(C) - C) / (max(C) - min(C)); all ones when C is constant.
MaskMatrix normalize_flip(const MaskMatrix& c);

struct MaskEstimate {
  MaskMatrix mask;
  TrainTrace trace;
  /// Length y was zero padded to; the mask has stft_frame_count(padded_length) rows.
  Eigen::Index padded_length = 0;
};

/// Fits the network to y for cfg.iterations steps and accumulates, per
/// time-frequency bin, the percentile-clipped relative change of the output
/// magnitude spectrum between consecutive iterations. Bins the network
/// keeps revising map towards 0, stable bins towards 1.
MaskEstimate estimate_mask(const AudioClip& y, const MaskConfig& cfg);

}  // namespace dnp
