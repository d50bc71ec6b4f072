// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Core>

#include "dnp/error.hpp"

namespace dnp {

inline constexpr int kPipelineRate = 16000;

/// Mono audio: noisy input, clean reference, network input or network output.
struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = kPipelineRate;

  Eigen::Index size() const { return samples.size(); }

  /// Throws ArgumentError unless the clip is non-empty, finite and has a
  /// positive rate.
  void validate() const {
    if (samples.size() == 0) throw ArgumentError("audio clip is empty");
    if (sample_rate <= 0) throw ArgumentError("sample rate must be positive");
    if (!samples.allFinite()) throw ArgumentError("audio clip has non-finite samples");
  }
};

inline double mean_power(const AudioClip& clip) {
  return clip.samples.squaredNorm() / static_cast<double>(clip.samples.size());
}

/// Trailing zero padding up to the next multiple of `multiple`.
inline AudioClip pad_to_multiple(const AudioClip& clip, Eigen::Index multiple) {
  if (multiple < 1) throw ArgumentError("padding multiple must be >= 1");
  const Eigen::Index n = clip.size();
  const Eigen::Index padded = (n + multiple - 1) / multiple * multiple;
  AudioClip out{Eigen::VectorXd::Zero(padded), clip.sample_rate};
  out.samples.head(n) = clip.samples;
  return out;
}

inline AudioClip trim(const AudioClip& clip, Eigen::Index length) {
  if (length > clip.size()) throw ArgumentError("cannot trim a clip to a longer length");
  return AudioClip{clip.samples.head(length), clip.sample_rate};
}

}  // namespace dnp
