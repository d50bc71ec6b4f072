// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dnp/audio_clip.hpp"

namespace dnp {

/// Architecture of the 1D encoder-decoder.
///
/// Encoder level k: same-padded conv (down_kernel) + leaky ReLU, then keep
/// every second sample. A bottleneck conv runs at the coarsest rate. Decoder
/// level k: linear-interpolation upsampling by 2, concatenation with the
/// encoder level k activations, same-padded conv (up_kernel) + leaky ReLU.
/// A 1-tap conv with no nonlinearity maps the filters to one output channel.
struct WaveUnetConfig {
  int num_layers = 6;
  int filters_per_layer = 60;
  int down_kernel = 15;
  int up_kernel = 5;
  double leaky_slope = 0.2;
  std::uint64_t seed = 0;

  void validate() const;

  /// Input lengths must be divisible by this (2^num_layers).
  Eigen::Index length_multiple() const { return Eigen::Index{1} << num_layers; }

  /// Number of conv layers: encoders, bottleneck, decoders, projection.
  int num_convs() const { return 2 * num_layers + 2; }
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Parameter {
  std::string name;
  Matrix<Scalar> value;
};

/// Per-parameter gradients, in declaration order and shaped like the values.
template <typename Scalar>
using Gradients = std::vector<Matrix<Scalar>>;

/// Adam moments are kept in double regardless of the parameter scalar.
struct AdamState {
  std::vector<Eigen::MatrixXd> first;
  std::vector<Eigen::MatrixXd> second;
  long step = 0;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Parameters are stored conv by conv as (weight, bias). A weight is
/// out_channels x (kernel * in_channels) with tap k occupying columns
/// [k * in_channels, (k + 1) * in_channels); a bias is out_channels x 1.
/// Conv order: enc0..enc{L-1}, bottleneck, dec{L-1}..dec0, out.
template <typename Scalar>
struct WaveUnetModel {
  WaveUnetConfig config;
  std::vector<Parameter<Scalar>> params;
  AdamState adam;

  const Matrix<Scalar>& weight(int conv) const { return params[2 * conv].value; }
  const Matrix<Scalar>& bias(int conv) const { return params[2 * conv + 1].value; }
  Eigen::Index num_scalars() const;
};

/// Xavier-uniform kernels in [-a, a], a = sqrt(6 / (fan_in + fan_out)) with
/// fan_in = in_channels * kernel and fan_out = out_channels * kernel, drawn
/// from Rng(config.seed) in declaration order (column-major within a
/// tensor). Biases and Adam moments start at zero.
template <typename Scalar>
WaveUnetModel<Scalar> xavier_init(const WaveUnetConfig& config);

/// i.i.d. standard normal network input.
AudioClip make_input(Eigen::Index length, std::uint64_t seed);

/// Activations saved by a forward pass for the backward pass.
template <typename Scalar>
struct ForwardTape {
  std::vector<Matrix<Scalar>> enc_in, enc_pre, enc_act;
  Matrix<Scalar> mid_in, mid_pre, mid_act;
  std::vector<Matrix<Scalar>> dec_in, dec_pre, dec_act;  // indexed by level
  Matrix<Scalar> output;                                 // 1 x length
};

template <typename Scalar>
void forward(const WaveUnetModel<Scalar>& model, const AudioClip& z, ForwardTape<Scalar>& tape);

/// Network output f(z). Throws ArgumentError if the length is not a multiple
/// of 2^num_layers and NumericError (carrying the conv index) on non-finite
/// activations.
template <typename Scalar>
AudioClip forward(const WaveUnetModel<Scalar>& model, const AudioClip& z);

template <typename Scalar>
struct LossAndGrads {
  double loss = 0.0;
  Gradients<Scalar> grads;
};

/// Mean squared error between f(z) and y and its gradient with respect to
/// every parameter.
template <typename Scalar>
LossAndGrads<Scalar> loss_and_grads(const WaveUnetModel<Scalar>& model, const AudioClip& z, const AudioClip& y);

/// Backward pass over an existing tape.
template <typename Scalar>
LossAndGrads<Scalar> backward(const WaveUnetModel<Scalar>& model, const ForwardTape<Scalar>& tape,
                              const AudioClip& y);

/// Bias-corrected Adam update; throws NumericError on a non-finite update.
template <typename Scalar>
void adam_step(WaveUnetModel<Scalar>& model, const Gradients<Scalar>& grads, double lr,
               const AdamOptions& options = {});

struct StepResult {
  double loss = 0.0;  // loss of the network before the update
  AudioClip output;   // output of the network after the update
};

/// One optimization iteration: gradients at the current parameters, one
/// Adam step, then a fresh forward pass with the updated parameters.
template <typename Scalar>
StepResult train_step(WaveUnetModel<Scalar>& model, const AudioClip& z, const AudioClip& y, double lr);

/// Repeated train_step on a fixed (z, y) pair. The forward pass of the
/// updated network doubles as the next iteration's gradient pass, so each
/// step costs one forward and one backward. Results are bitwise identical to
/// calling train_step in a loop.
template <typename Scalar>
class Trainer {
 public:
  Trainer(WaveUnetModel<Scalar>& model, AudioClip z, AudioClip y);

  StepResult step(double lr);

  /// Output of the network at its current parameters.
  AudioClip current_output() const;

 private:
  WaveUnetModel<Scalar>& model_;
  AudioClip z_;
  AudioClip y_;
  ForwardTape<Scalar> tape_;
};

extern template struct WaveUnetModel<float>;
extern template struct WaveUnetModel<double>;
extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace dnp
