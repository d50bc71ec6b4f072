// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <filesystem>

#include <Eigen/Core>

#include "dnp/audio_clip.hpp"

namespace dnp {

/// Analysis settings. The defaults are a 32 ms window and an 8 ms hop at 16 kHz.
struct StftConfig {
  int frame_len = 512;
  int hop = 128;

  void validate() const;
};

/// One-sided STFT, one row per frame, one column per frequency bin.
struct Spectrogram {
  Eigen::MatrixXcd data;
  int frame_len = 512;
  int hop = 128;
  int sample_rate = kPipelineRate;
  Eigen::Index original_len = 0;

  Eigen::Index num_frames() const { return data.rows(); }
  Eigen::Index num_bins() const { return data.cols(); }
  double bin_width_hz() const { return static_cast<double>(sample_rate) / frame_len; }
};

/// Periodic Hann: w[k] = 0.5 (1 - cos(2 pi k / n)).
Eigen::VectorXd hann_window(int n);

/// Number of frames stft produces for a signal of `length` samples.
Eigen::Index stft_frame_count(Eigen::Index length, const StftConfig& cfg);

/// Centered frames: the signal is zero padded by frame_len/2 on both sides,
/// each frame is Hann weighted and transformed with a one-sided DFT.
Spectrogram stft(const AudioClip& clip, const StftConfig& cfg = {});

/// Weighted overlap-add with the analysis window, normalized by the summed
/// squared window, trimmed to original_len.
AudioClip istft(const Spectrogram& spec);

Eigen::MatrixXd magnitude(const Spectrogram& spec);

enum class MatrixFormat { kCsv, kPgm };

/// csv: one row per line at full precision. pgm: binary P5, maxval 255, one
/// column per matrix row and one image row per matrix column with column 0
/// at the bottom, values log-compressed over five decades.
void export_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path, MatrixFormat format);

/// Picks the format from the extension (.csv or .pgm).
void export_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path);

}  // namespace dnp
