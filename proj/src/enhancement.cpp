// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/enhancement.hpp"

#include <algorithm>
#include <cmath>

#include "dnp/expint.hpp"

namespace dnp {
namespace {

constexpr double kMinNoisePower = 1e-12;
constexpr double kMinLsaArgument = 1e-10;

Spectrogram analyze_padded(const AudioClip& y, const EnhanceConfig& cfg) {
  y.validate();
  return stft(pad_to_multiple(y, cfg.pad_multiple), cfg.stft);
}

AudioClip resynthesize(const Spectrogram& spec, const AudioClip& y, const EnhanceConfig& cfg) {
  return trim(istft(highpass(spec, cfg.highpass_hz)), y.size());
}

}  // namespace

Eigen::MatrixXd mask_to_prior_snr(const MaskMatrix& mask, double xi_max) {
  if (!(xi_max >= kXiMin)) throw ArgumentError("mask_to_prior_snr: xi_max is below the xi floor");
  return mask.data.unaryExpr([xi_max](double m) {
    if (m >= 1.0) return xi_max;
    return std::clamp(m / (1.0 - m), kXiMin, xi_max);
  });
}

GainField lsa_gain(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& gamma) {
  if (xi.rows() != gamma.rows() || xi.cols() != gamma.cols())
    throw ArgumentError("lsa_gain: prior and posterior SNR shapes differ");
  GainField gain{Eigen::MatrixXd(xi.rows(), xi.cols())};
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double x = xi.data()[i];
    const double g = gamma.data()[i];
    const double wiener = x / (1.0 + x);
    const double v = std::max(wiener * g, kMinLsaArgument);
    gain.data.data()[i] = std::min(wiener * std::exp(0.5 * expint_e1(v)), 1.0);
  }
  return gain;
}

Eigen::MatrixXd posterior_snr(const Spectrogram& noisy, const MaskMatrix& mask) {
  if (mask.data.rows() != noisy.num_frames() || mask.data.cols() != noisy.num_bins())
    throw ArgumentError("posterior_snr: mask shape does not match the spectrogram");
  const Eigen::ArrayXXd power = noisy.data.cwiseAbs2().array();
  const Eigen::ArrayXXd leak = (1.0 - mask.data.array()).square();
  const Eigen::RowVectorXd noise_psd = (leak * power).colwise().mean().matrix().cwiseMax(kMinNoisePower);
  return (power.rowwise() / noise_psd.array()).cwiseMax(kGammaMin).cwiseMin(kGammaMax).matrix();
}

Spectrogram highpass(const Spectrogram& spec, double cutoff_hz) {
  if (!(cutoff_hz >= 0.0)) throw ArgumentError("highpass: cutoff must be >= 0");
  if (spec.sample_rate <= 0 || spec.frame_len < 2) throw ArgumentError("highpass: invalid STFT settings");
  const auto cutoff_bins = static_cast<Eigen::Index>(std::ceil(cutoff_hz / spec.bin_width_hz()));
  if (cutoff_bins >= spec.num_bins()) throw ArgumentError("highpass: cutoff removes every bin");
  Spectrogram out = spec;
  out.data.leftCols(cutoff_bins).setZero();
  return out;
}

AudioClip highpass_clip(const AudioClip& y, const EnhanceConfig& cfg) {
  return resynthesize(analyze_padded(y, cfg), y, cfg);
}

AudioClip enhance(const AudioClip& y, const MaskMatrix& mask, const EnhanceConfig& cfg) {
  Spectrogram spec = analyze_padded(y, cfg);
  if (mask.data.rows() != spec.num_frames() || mask.data.cols() != spec.num_bins())
    throw ArgumentError("enhance: mask is " + std::to_string(mask.data.rows()) + "x" +
                        std::to_string(mask.data.cols()) + " but the noisy STFT is " +
                        std::to_string(spec.num_frames()) + "x" + std::to_string(spec.num_bins()));
  const Eigen::MatrixXd xi = mask_to_prior_snr(mask, cfg.xi_max);
  const Eigen::MatrixXd gamma = posterior_snr(spec, mask);
  const GainField gain = lsa_gain(xi, gamma);
  spec.data = spec.data.cwiseProduct(gain.data.cast<std::complex<double>>());
  return resynthesize(spec, y, cfg);
}

AudioClip wiener_baseline(const AudioClip& y, int noise_frames, const EnhanceConfig& cfg) {
  constexpr double kSmoothing = 0.98;
  if (noise_frames < 1) throw ArgumentError("wiener_baseline: noise_frames must be >= 1");
  y.validate();
  if (y.size() < static_cast<Eigen::Index>(noise_frames) * cfg.stft.hop + cfg.stft.frame_len)
    throw ArgumentError("wiener_baseline: clip is shorter than the noise preamble");

  Spectrogram spec = analyze_padded(y, cfg);
  const Eigen::MatrixXd power = spec.data.cwiseAbs2();
  const Eigen::RowVectorXd noise_psd = power.topRows(noise_frames).colwise().mean().cwiseMax(kMinNoisePower);

  Eigen::RowVectorXd previous_clean = Eigen::RowVectorXd::Zero(spec.num_bins());
  for (Eigen::Index t = 0; t < spec.num_frames(); ++t) {
    const Eigen::ArrayXd gamma = (power.row(t).array() / noise_psd.array()).transpose();
    const Eigen::ArrayXd xi =
        (kSmoothing * (previous_clean.array() / noise_psd.array()).transpose() +
         (1.0 - kSmoothing) * (gamma - 1.0).cwiseMax(0.0))
            .cwiseMax(kXiMin);
    const Eigen::ArrayXd gain = xi / (1.0 + xi);
    spec.data.row(t) = spec.data.row(t).cwiseProduct(gain.matrix().transpose().cast<std::complex<double>>());
    previous_clean = spec.data.row(t).cwiseAbs2();
  }
  return resynthesize(spec, y, cfg);
}

}  // namespace dnp
