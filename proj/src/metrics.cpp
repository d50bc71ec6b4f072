// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnp/spectral.hpp"

namespace dnp {
namespace {

void check_pair(const AudioClip& clean, const AudioClip& estimate) {
  clean.validate();
  estimate.validate();
  if (clean.size() != estimate.size()) throw ArgumentError("metrics: clean and estimate lengths differ");
}

double ratio_db(double signal, double residual, double cap) {
  if (residual <= 0.0) return cap;
  return std::min(10.0 * std::log10(signal / residual), cap);
}

}  // namespace

std::string ScoreReport::csv_header() { return "snr_db,ssnr_db,lsd_db"; }

std::string ScoreReport::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << snr_db << ',' << ssnr_db << ',' << lsd_db;
  return out.str();
}

double snr(const AudioClip& clean, const AudioClip& estimate) {
  check_pair(clean, estimate);
  const double energy = clean.samples.squaredNorm();
  if (energy <= 0.0) throw ArgumentError("snr: clean signal has zero energy");
  return ratio_db(energy, (clean.samples - estimate.samples).squaredNorm(), kSnrCapDb);
}

double segmental_snr(const AudioClip& clean, const AudioClip& estimate, int frame, int hop) {
  check_pair(clean, estimate);
  if (frame < 1 || hop < 1) throw ArgumentError("segmental_snr: frame and hop must be positive");
  if (clean.size() < frame) throw ArgumentError("segmental_snr: clip is shorter than one frame");

  double sum = 0.0;
  int counted = 0;
  for (Eigen::Index start = 0; start + frame <= clean.size(); start += hop) {
    const auto x = clean.samples.segment(start, frame);
    const double energy = x.squaredNorm();
    if (energy <= 1e-8) continue;
    const double residual = (x - estimate.samples.segment(start, frame)).squaredNorm();
    sum += std::clamp(ratio_db(energy, residual, kSegmentCeilDb), kSegmentFloorDb, kSegmentCeilDb);
    ++counted;
  }
  if (counted == 0) throw ArgumentError("segmental_snr: clean signal is silent in every frame");
  return sum / counted;
}

double log_spectral_distance(const AudioClip& clean, const AudioClip& estimate) {
  check_pair(clean, estimate);
  constexpr double kEps = 1e-8;
  const Eigen::ArrayXXd x = magnitude(stft(clean)).array() + kEps;
  const Eigen::ArrayXXd e = magnitude(stft(estimate)).array() + kEps;
  const Eigen::ArrayXXd diff_db = 20.0 * (x / e).log10();
  const Eigen::ArrayXd per_frame = diff_db.square().rowwise().mean().sqrt();
  return std::sqrt(per_frame.square().mean());
}

ScoreReport score(const AudioClip& clean, const AudioClip& estimate) {
  return {snr(clean, estimate), segmental_snr(clean, estimate), log_spectral_distance(clean, estimate)};
}

}  // namespace dnp
