// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/prior_mask.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dnp {

void MaskConfig::validate() const {
  if (iterations < 1) throw ArgumentError("mask: iterations must be >= 1");
  if (!(pct_low >= 0.0 && pct_low < pct_high && pct_high <= 100.0))
    throw ArgumentError("mask: percentiles must satisfy 0 <= low < high <= 100");
  if (!(eps > 0.0)) throw ArgumentError("mask: eps must be positive");
  if (!std::isfinite(lr) || lr < 0.0) throw ArgumentError("mask: learning rate must be finite and >= 0");
  if (sample_every < 0) throw ArgumentError("mask: sample_every must be >= 0");
  net.validate();
  stft.validate();
}

MaskMatrix relative_diff(const Eigen::MatrixXd& cur, const Eigen::MatrixXd& prev, double eps) {
  if (cur.rows() != prev.rows() || cur.cols() != prev.cols())
    throw ArgumentError("relative_diff: magnitude matrices differ in shape");
  return {((cur - prev).cwiseAbs().array() / (cur.array() + eps)).matrix(), MaskRole::kFluctuation};
}

double percentile(const MaskMatrix& m, double q) {
  if (m.data.size() == 0) throw ArgumentError("percentile: matrix is empty");
  if (!(q >= 0.0 && q <= 100.0)) throw ArgumentError("percentile: q must be in [0, 100]");
  const auto n = static_cast<std::size_t>(m.data.size());
  const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(n))));
  std::vector<double> values(m.data.data(), m.data.data() + n);
  const auto kth = values.begin() + static_cast<std::ptrdiff_t>(std::min(rank, n) - 1);
  std::nth_element(values.begin(), kth, values.end());
  return *kth;
}

MaskMatrix clip_between(const MaskMatrix& m, double lo, double hi) {
  if (lo > hi) throw ArgumentError("clip_between: lower bound exceeds upper bound");
  return {m.data.cwiseMax(lo).cwiseMin(hi), m.role};
}

MaskMatrix normalize_flip(const MaskMatrix& c) {
  if (c.data.size() == 0) throw ArgumentError("normalize_flip: matrix is empty");
  if (!c.data.allFinite()) throw ArgumentError("normalize_flip: matrix has non-finite entries");
  const double hi = c.data.maxCoeff();
  const double lo = c.data.minCoeff();
  if (!(hi > lo)) return {Eigen::MatrixXd::Ones(c.data.rows(), c.data.cols()), MaskRole::kMask};
  return {((hi - c.data.array()) / (hi - lo)).matrix(), MaskRole::kMask};
}

MaskEstimate estimate_mask(const AudioClip& y, const MaskConfig& cfg) {
  cfg.validate();
  y.validate();
  const Eigen::Index padded = pad_to_multiple(y, cfg.net.length_multiple()).size();
  if (padded < cfg.stft.frame_len) throw ArgumentError("estimate_mask: clip is shorter than one STFT frame");

  const Eigen::Index frames = stft_frame_count(padded, cfg.stft);
  const Eigen::Index bins = cfg.stft.frame_len / 2 + 1;
  MaskMatrix accumulator{Eigen::MatrixXd::Zero(frames, bins), MaskRole::kAccumulator};
  Eigen::MatrixXd previous;

  WaveUnetConfig net = cfg.net;
  net.seed = cfg.seed;

  MaskEstimate result;
  result.padded_length = padded;
  result.trace.losses.reserve(static_cast<std::size_t>(cfg.iterations));

  TrainingCallbacks callbacks;
  callbacks.on_start = [&](const AudioClip& output) { previous = magnitude(stft(output, cfg.stft)); };
  callbacks.on_step = [&](int i, double loss, const AudioClip& output) {
    result.trace.losses.push_back(loss);
    if (cfg.sample_every > 0 && i % cfg.sample_every == 0) result.trace.snapshots.emplace(i, trim(output, y.size()));

    Eigen::MatrixXd current = magnitude(stft(output, cfg.stft));
    const MaskMatrix h = relative_diff(current, previous, cfg.eps);
    const double lo = percentile(h, cfg.pct_low);
    const double hi = percentile(h, cfg.pct_high);
    accumulator.data += clip_between(h, lo, hi).data;
    previous = std::move(current);
  };
  run_training(y, net, cfg.iterations, cfg.lr, callbacks);

  if (!accumulator.data.allFinite()) throw NumericError("estimate_mask: accumulator is not finite", cfg.iterations);
  result.mask = normalize_flip(accumulator);
  return result;
}

}  // namespace dnp
