// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/spectral.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace dnp {

void StftConfig::validate() const {
  if (frame_len < 2 || frame_len % 2 != 0) throw ArgumentError("stft: frame length must be even and >= 2");
  if (hop < 1 || hop > frame_len) throw ArgumentError("stft: hop must be in [1, frame_len]");
}

Eigen::VectorXd hann_window(int n) {
  if (n < 2) throw ArgumentError("hann_window: length must be >= 2");
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / n));
  return w;
}

Eigen::Index stft_frame_count(Eigen::Index length, const StftConfig& cfg) {
  const Eigen::Index padded = length + cfg.frame_len;
  return (padded - cfg.frame_len) / cfg.hop + 1;
}

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  cfg.validate();
  clip.validate();
  const Eigen::Index n = clip.size();
  if (n < cfg.frame_len) throw ArgumentError("stft: clip is shorter than one frame");

  const int half = cfg.frame_len / 2;
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n + cfg.frame_len);
  padded.segment(half, n) = clip.samples;

  const Eigen::VectorXd window = hann_window(cfg.frame_len);
  const Eigen::Index frames = stft_frame_count(n, cfg);
  const int bins = half + 1;

  Spectrogram spec;
  spec.data.resize(frames, bins);
  spec.frame_len = cfg.frame_len;
  spec.hop = cfg.hop;
  spec.sample_rate = clip.sample_rate;
  spec.original_len = n;

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(cfg.frame_len);
  std::vector<std::complex<double>> bins_out;
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::Index start = f * cfg.hop;
    for (int k = 0; k < cfg.frame_len; ++k) frame[k] = padded[start + k] * window[k];
    fft.fwd(bins_out, frame);
    for (int b = 0; b < bins; ++b) spec.data(f, b) = bins_out[b];
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec) {
  StftConfig{spec.frame_len, spec.hop}.validate();
  const int half = spec.frame_len / 2;
  if (spec.num_bins() != half + 1) throw ArgumentError("istft: bin count does not match frame length");
  if (spec.original_len < 1) throw ArgumentError("istft: original length is not set");
  if (spec.num_frames() != stft_frame_count(spec.original_len, {spec.frame_len, spec.hop}))
    throw ArgumentError("istft: frame count does not match original length");

  const Eigen::VectorXd window = hann_window(spec.frame_len);
  const Eigen::Index padded_len = spec.original_len + spec.frame_len;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(padded_len);
  Eigen::VectorXd norm = Eigen::VectorXd::Zero(padded_len);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> bins(half + 1);
  std::vector<double> frame;
  for (Eigen::Index f = 0; f < spec.num_frames(); ++f) {
    for (int b = 0; b <= half; ++b) bins[b] = spec.data(f, b);
    fft.inv(frame, bins, spec.frame_len);
    const Eigen::Index start = f * spec.hop;
    for (int k = 0; k < spec.frame_len; ++k) {
      acc[start + k] += frame[k] * window[k];
      norm[start + k] += window[k] * window[k];
    }
  }

  AudioClip out{Eigen::VectorXd(spec.original_len), spec.sample_rate};
  for (Eigen::Index i = 0; i < spec.original_len; ++i) {
    const double w = norm[half + i];
    if (w < 1e-12) throw NumericError("istft: window overlap vanishes at sample " + std::to_string(i));
    out.samples[i] = acc[half + i] / w;
  }
  return out;
}

Eigen::MatrixXd magnitude(const Spectrogram& spec) { return spec.data.cwiseAbs(); }

void export_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path, MatrixFormat format) {
  if (!m.allFinite()) throw ArgumentError("export_matrix: matrix has non-finite entries");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("export_matrix: cannot open '" + path.string() + "'");

  if (format == MatrixFormat::kCsv) {
    out.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out << ',';
        out << m(r, c);
      }
      out << '\n';
    }
  } else {
    constexpr double kDecades = 5.0;
    const double peak = m.size() ? m.maxCoeff() : 0.0;
    const double full_scale = std::log10(1.0 + std::pow(10.0, kDecades));
    const Eigen::Index width = m.rows();
    const Eigen::Index height = m.cols();
    out << "P5\n" << width << ' ' << height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(width));
    for (Eigen::Index y = 0; y < height; ++y) {
      const Eigen::Index bin = height - 1 - y;
      for (Eigen::Index x = 0; x < width; ++x) {
        const double v = peak > 0.0 ? std::max(m(x, bin), 0.0) / peak : 0.0;
        const double level = std::log10(1.0 + v * std::pow(10.0, kDecades)) / full_scale;
        row[static_cast<std::size_t>(x)] = static_cast<unsigned char>(std::lround(255.0 * level));
      }
      out.write(reinterpret_cast<const char*>(row.data()), width);
    }
  }
  if (!out) throw IoError("export_matrix: write to '" + path.string() + "' failed");
}

void export_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return export_matrix(m, path, MatrixFormat::kCsv);
  if (ext == ".pgm") return export_matrix(m, path, MatrixFormat::kPgm);
  throw ArgumentError("export_matrix: unknown extension '" + ext + "' (use .csv or .pgm)");
}

}  // namespace dnp
