// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/train_trace.hpp"

#include <fstream>
#include <limits>
#include <string>

#include "dnp/random.hpp"

namespace dnp {

std::uint64_t weight_seed(std::uint64_t job_seed) { return derive_seed(job_seed, 0); }
std::uint64_t input_seed(std::uint64_t job_seed) { return derive_seed(job_seed, 1); }

void run_training(const AudioClip& y, const WaveUnetConfig& config, int iterations, double lr,
                  const TrainingCallbacks& callbacks) {
  y.validate();
  config.validate();
  if (iterations < 1) throw ArgumentError("training: iterations must be >= 1");
  if (!std::isfinite(lr) || lr < 0.0) throw ArgumentError("training: learning rate must be finite and >= 0");

  WaveUnetConfig net = config;
  net.seed = weight_seed(config.seed);
  const AudioClip target = pad_to_multiple(y, net.length_multiple());
  AudioClip z = make_input(target.size(), input_seed(config.seed));
  z.sample_rate = y.sample_rate;

  WaveUnetModel<float> model = xavier_init<float>(net);
  int iteration = 0;
  try {
    Trainer<float> trainer(model, std::move(z), target);
    if (callbacks.on_start) callbacks.on_start(trainer.current_output());
    for (iteration = 1; iteration <= iterations; ++iteration) {
      const StepResult r = trainer.step(lr);
      if (!std::isfinite(r.loss)) throw NumericError("non-finite loss");
      if (callbacks.on_step) callbacks.on_step(iteration, r.loss, r.output);
    }
  } catch (const NumericError& e) {
    throw NumericError("training failed at iteration " + std::to_string(iteration) + ": " + e.what(), iteration);
  }
}

TrainTrace fit_trace(const AudioClip& y, const WaveUnetConfig& config, int iterations, int sample_every, double lr) {
  if (sample_every < 0) throw ArgumentError("fit_trace: sample_every must be >= 0");
  TrainTrace trace;
  trace.losses.reserve(static_cast<std::size_t>(std::max(iterations, 0)));
  TrainingCallbacks callbacks;
  callbacks.on_step = [&](int i, double loss, const AudioClip& output) {
    trace.losses.push_back(loss);
    if (sample_every > 0 && i % sample_every == 0) trace.snapshots.emplace(i, trim(output, y.size()));
  };
  run_training(y, config, iterations, lr, callbacks);
  return trace;
}

AudioClip hindsight_best(const TrainTrace& trace, const AudioClip& clean) {
  if (trace.snapshots.empty()) throw ArgumentError("hindsight_best: trace has no snapshots");
  const AudioClip* best = nullptr;
  double best_error = std::numeric_limits<double>::infinity();
  for (const auto& [iteration, snapshot] : trace.snapshots) {
    if (snapshot.size() != clean.size()) throw ArgumentError("hindsight_best: snapshot length differs from reference");
    const double error = (snapshot.samples - clean.samples).squaredNorm();
    if (error < best_error) {
      best_error = error;
      best = &snapshot;
    }
  }
  return best ? *best : trace.snapshots.begin()->second;
}

AudioClip averaged_output(const TrainTrace& trace) {
  if (trace.snapshots.empty()) throw ArgumentError("averaged_output: trace has no snapshots");
  const AudioClip& first = trace.snapshots.begin()->second;
  AudioClip mean{Eigen::VectorXd::Zero(first.size()), first.sample_rate};
  for (const auto& [iteration, snapshot] : trace.snapshots) {
    if (snapshot.size() != first.size()) throw ArgumentError("averaged_output: snapshot lengths differ");
    mean.samples += snapshot.samples;
  }
  mean.samples /= static_cast<double>(trace.snapshots.size());
  return mean;
}

TrainTrace thin_snapshots(const TrainTrace& trace, int every) {
  if (every < 1) throw ArgumentError("thin_snapshots: stride must be >= 1");
  TrainTrace out;
  out.losses = trace.losses;
  for (const auto& [iteration, snapshot] : trace.snapshots)
    if (iteration % every == 0) out.snapshots.emplace(iteration, snapshot);
  return out;
}

void write_loss_csv(const TrainTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("write_loss_csv: cannot open '" + path.string() + "'");
  out.precision(17);
  out << "iteration,loss\n";
  for (std::size_t i = 0; i < trace.losses.size(); ++i) out << i + 1 << ',' << trace.losses[i] << '\n';
  if (!out) throw IoError("write_loss_csv: write to '" + path.string() + "' failed");
}

}  // namespace dnp
