// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <vector>

#include "dnp/audio_clip.hpp"
#include "dnp/wave_unet.hpp"

namespace dnp {

inline constexpr double kDefaultLearningRate = 5e-4;

/// Loss per iteration and, optionally, network outputs f_i(z) keyed by
/// iteration number (1-based), trimmed to the fitted clip's length.
struct TrainTrace {
  std::vector<double> losses;
  std::map<int, AudioClip> snapshots;
};

/// Seeds for the two random streams of a fitting job. One job seed fixes
/// both the initial weights and the network input z.
std::uint64_t weight_seed(std::uint64_t job_seed);
std::uint64_t input_seed(std::uint64_t job_seed);

struct TrainingCallbacks {
  /// f_0(z) on the padded length, before any update.
  std::function<void(const AudioClip&)> on_start;
  /// After iteration i (1-based): loss of f_{i-1} and output f_i(z), padded.
  std::function<void(int, double, const AudioClip&)> on_step;
};

/// Fits a freshly initialized network to y (zero padded to a multiple of
/// 2^num_layers) from random input, one Adam step per iteration. The weight
/// and input streams derive from config.seed. Numeric failures are rethrown
/// as NumericError carrying the iteration index.
void run_training(const AudioClip& y, const WaveUnetConfig& config, int iterations, double lr,
                  const TrainingCallbacks& callbacks);

/// Records the loss curve and stores f_i(z) whenever i is a multiple of
/// sample_every (no snapshots when sample_every is 0).
TrainTrace fit_trace(const AudioClip& y, const WaveUnetConfig& config, int iterations, int sample_every,
                     double lr = kDefaultLearningRate);

/// Snapshot with the smallest mean squared error to the clean reference.
AudioClip hindsight_best(const TrainTrace& trace, const AudioClip& clean);

/// Element-wise mean of all snapshots.
AudioClip averaged_output(const TrainTrace& trace);

/// Copy of the trace keeping only snapshots at multiples of `every`.
TrainTrace thin_snapshots(const TrainTrace& trace, int every);

/// "iteration,loss" with a header row, iterations counted from 1.
void write_loss_csv(const TrainTrace& trace, const std::filesystem::path& path);

}  // namespace dnp
