// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/wave_unet.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dnp/random.hpp"

namespace dnp {

void WaveUnetConfig::validate() const {
  if (num_layers < 1 || num_layers > 20) throw ArgumentError("wave_unet: num_layers must be in [1, 20]");
  if (filters_per_layer < 1) throw ArgumentError("wave_unet: filters_per_layer must be >= 1");
  if (down_kernel < 1 || down_kernel % 2 == 0) throw ArgumentError("wave_unet: down_kernel must be odd");
  if (up_kernel < 1 || up_kernel % 2 == 0) throw ArgumentError("wave_unet: up_kernel must be odd");
  if (!std::isfinite(leaky_slope)) throw ArgumentError("wave_unet: leaky_slope must be finite");
}

namespace {

template <typename Scalar>
using Strided = Eigen::Map<Matrix<Scalar>, 0, Eigen::OuterStride<>>;
template <typename Scalar>
using ConstStrided = Eigen::Map<const Matrix<Scalar>, 0, Eigen::OuterStride<>>;

struct ConvShape {
  int in_channels;
  int out_channels;
  int kernel;
};

ConvShape conv_shape(const WaveUnetConfig& cfg, int conv) {
  const int L = cfg.num_layers;
  const int F = cfg.filters_per_layer;
  if (conv == 0) return {1, F, cfg.down_kernel};
  if (conv < L) return {F, F, cfg.down_kernel};
  if (conv == L) return {F, F, cfg.down_kernel};
  if (conv < 2 * L + 1) return {2 * F, F, cfg.up_kernel};
  return {F, 1, 1};
}

std::string conv_name(const WaveUnetConfig& cfg, int conv) {
  const int L = cfg.num_layers;
  if (conv < L) return "enc" + std::to_string(conv);
  if (conv == L) return "bottleneck";
  if (conv < 2 * L + 1) return "dec" + std::to_string(2 * L - conv);
  return "out";
}

int dec_conv(const WaveUnetConfig& cfg, int level) { return 2 * cfg.num_layers - level; }

// out = bias + sum_k W_k * shift(in, k - pad), zero outside the signal.
template <typename Scalar>
void conv_forward(const Matrix<Scalar>& w, const Matrix<Scalar>& b, int kernel, const Matrix<Scalar>& in,
                  Matrix<Scalar>& out) {
  const Eigen::Index cin = in.rows();
  const Eigen::Index n = in.cols();
  const int pad = kernel / 2;
  out = b.col(0).replicate(1, n);
  for (int k = 0; k < kernel; ++k) {
    const Eigen::Index shift = k - pad;
    const Eigen::Index t0 = std::max<Eigen::Index>(0, -shift);
    const Eigen::Index t1 = std::min<Eigen::Index>(n, n - shift);
    if (t1 <= t0) continue;
    out.middleCols(t0, t1 - t0).noalias() += w.middleCols(k * cin, cin) * in.middleCols(t0 + shift, t1 - t0);
  }
}

template <typename Scalar>
void conv_backward(const Matrix<Scalar>& w, int kernel, const Matrix<Scalar>& in, const Matrix<Scalar>& d_out,
                   Matrix<Scalar>& d_w, Matrix<Scalar>& d_b, Matrix<Scalar>* d_in) {
  const Eigen::Index cin = in.rows();
  const Eigen::Index n = in.cols();
  const int pad = kernel / 2;
  d_w.setZero(w.rows(), w.cols());
  d_b = d_out.rowwise().sum();
  if (d_in) d_in->setZero(cin, n);
  for (int k = 0; k < kernel; ++k) {
    const Eigen::Index shift = k - pad;
    const Eigen::Index t0 = std::max<Eigen::Index>(0, -shift);
    const Eigen::Index t1 = std::min<Eigen::Index>(n, n - shift);
    if (t1 <= t0) continue;
    const auto g = d_out.middleCols(t0, t1 - t0);
    d_w.middleCols(k * cin, cin).noalias() += g * in.middleCols(t0 + shift, t1 - t0).transpose();
    if (d_in) d_in->middleCols(t0 + shift, t1 - t0).noalias() += w.middleCols(k * cin, cin).transpose() * g;
  }
}

template <typename Scalar>
void leaky(const Matrix<Scalar>& pre, Scalar slope, Matrix<Scalar>& act) {
  act = (pre.array() > Scalar(0)).select(pre.array(), slope * pre.array()).matrix();
}

template <typename Scalar>
Matrix<Scalar> leaky_backward(const Matrix<Scalar>& pre, Scalar slope, const Matrix<Scalar>& d_act) {
  return (pre.array() > Scalar(0)).select(d_act.array(), slope * d_act.array()).matrix();
}

// Even columns of x.
template <typename Scalar>
Matrix<Scalar> decimate(const Matrix<Scalar>& x) {
  return ConstStrided<Scalar>(x.data(), x.rows(), x.cols() / 2, Eigen::OuterStride<>(2 * x.rows()));
}

template <typename Scalar>
void decimate_backward(const Matrix<Scalar>& d_out, Matrix<Scalar>& d_in) {
  Strided<Scalar>(d_in.data(), d_in.rows(), d_out.cols(), Eigen::OuterStride<>(2 * d_in.rows())) += d_out;
}

// out[2i] = x[i], out[2i+1] = (x[i] + x[i+1]) / 2, last odd column repeats x[m-1].
template <typename Scalar>
void upsample(const Matrix<Scalar>& x, Matrix<Scalar>& out) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index m = x.cols();
  out.resize(rows, 2 * m);
  Strided<Scalar> even(out.data(), rows, m, Eigen::OuterStride<>(2 * rows));
  Strided<Scalar> odd(out.data() + rows, rows, m, Eigen::OuterStride<>(2 * rows));
  even = x;
  if (m > 1) odd.leftCols(m - 1) = Scalar(0.5) * (x.leftCols(m - 1) + x.rightCols(m - 1));
  odd.col(m - 1) = x.col(m - 1);
}

template <typename Scalar>
Matrix<Scalar> upsample_backward(const Matrix<Scalar>& d_out) {
  const Eigen::Index rows = d_out.rows();
  const Eigen::Index m = d_out.cols() / 2;
  ConstStrided<Scalar> even(d_out.data(), rows, m, Eigen::OuterStride<>(2 * rows));
  ConstStrided<Scalar> odd(d_out.data() + rows, rows, m, Eigen::OuterStride<>(2 * rows));
  Matrix<Scalar> d_in = even;
  if (m > 1) {
    d_in.leftCols(m - 1) += Scalar(0.5) * odd.leftCols(m - 1);
    d_in.rightCols(m - 1) += Scalar(0.5) * odd.leftCols(m - 1);
  }
  d_in.col(m - 1) += odd.col(m - 1);
  return d_in;
}

template <typename Scalar>
void check_finite(const Matrix<Scalar>& x, const WaveUnetConfig& cfg, int conv) {
  if (!x.allFinite())
    throw NumericError("wave_unet: non-finite activation in layer " + std::to_string(conv) + " (" +
                           conv_name(cfg, conv) + ")",
                       conv);
}

}  // namespace

template <typename Scalar>
Eigen::Index WaveUnetModel<Scalar>::num_scalars() const {
  Eigen::Index total = 0;
  for (const auto& p : params) total += p.value.size();
  return total;
}

template <typename Scalar>
WaveUnetModel<Scalar> xavier_init(const WaveUnetConfig& config) {
  config.validate();
  WaveUnetModel<Scalar> model;
  model.config = config;
  Rng rng(config.seed);
  for (int c = 0; c < config.num_convs(); ++c) {
    const ConvShape s = conv_shape(config, c);
    const double fan_in = static_cast<double>(s.in_channels) * s.kernel;
    const double fan_out = static_cast<double>(s.out_channels) * s.kernel;
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix<Scalar> w(s.out_channels, static_cast<Eigen::Index>(s.kernel) * s.in_channels);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(rng.uniform(-a, a));
    const std::string name = conv_name(config, c);
    model.params.push_back({name + ".weight", std::move(w)});
    model.params.push_back({name + ".bias", Matrix<Scalar>::Zero(s.out_channels, 1)});
  }
  for (const auto& p : model.params) {
    model.adam.first.push_back(Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols()));
    model.adam.second.push_back(Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols()));
  }
  return model;
}

AudioClip make_input(Eigen::Index length, std::uint64_t seed) {
  if (length < 1) throw ArgumentError("make_input: length must be positive");
  Rng rng(seed);
  AudioClip z{Eigen::VectorXd(length), kPipelineRate};
  for (Eigen::Index i = 0; i < length; ++i) z.samples[i] = rng.normal();
  return z;
}

template <typename Scalar>
void forward(const WaveUnetModel<Scalar>& model, const AudioClip& z, ForwardTape<Scalar>& tape) {
  const WaveUnetConfig& cfg = model.config;
  const int L = cfg.num_layers;
  const auto slope = static_cast<Scalar>(cfg.leaky_slope);
  if (z.size() == 0 || z.size() % cfg.length_multiple() != 0)
    throw ArgumentError("wave_unet: input length " + std::to_string(z.size()) + " is not a multiple of " +
                        std::to_string(cfg.length_multiple()));
  if (static_cast<int>(model.params.size()) != 2 * cfg.num_convs())
    throw ArgumentError("wave_unet: parameter list does not match the configuration");

  tape.enc_in.resize(L);
  tape.enc_pre.resize(L);
  tape.enc_act.resize(L);
  tape.dec_in.resize(L);
  tape.dec_pre.resize(L);
  tape.dec_act.resize(L);

  tape.enc_in[0] = z.samples.transpose().cast<Scalar>();
  for (int k = 0; k < L; ++k) {
    if (k > 0) tape.enc_in[k] = decimate(tape.enc_act[k - 1]);
    conv_forward(model.weight(k), model.bias(k), cfg.down_kernel, tape.enc_in[k], tape.enc_pre[k]);
    leaky(tape.enc_pre[k], slope, tape.enc_act[k]);
    check_finite(tape.enc_act[k], cfg, k);
  }

  tape.mid_in = decimate(tape.enc_act[L - 1]);
  conv_forward(model.weight(L), model.bias(L), cfg.down_kernel, tape.mid_in, tape.mid_pre);
  leaky(tape.mid_pre, slope, tape.mid_act);
  check_finite(tape.mid_act, cfg, L);

  const Matrix<Scalar>* below = &tape.mid_act;
  Matrix<Scalar> up;
  for (int k = L - 1; k >= 0; --k) {
    upsample(*below, up);
    const Matrix<Scalar>& skip = tape.enc_act[k];
    Matrix<Scalar>& cat = tape.dec_in[k];
    cat.resize(up.rows() + skip.rows(), up.cols());
    cat.topRows(up.rows()) = up;
    cat.bottomRows(skip.rows()) = skip;
    const int c = dec_conv(cfg, k);
    conv_forward(model.weight(c), model.bias(c), cfg.up_kernel, cat, tape.dec_pre[k]);
    leaky(tape.dec_pre[k], slope, tape.dec_act[k]);
    check_finite(tape.dec_act[k], cfg, c);
    below = &tape.dec_act[k];
  }

  const int out = cfg.num_convs() - 1;
  conv_forward(model.weight(out), model.bias(out), 1, tape.dec_act[0], tape.output);
  check_finite(tape.output, cfg, out);
}

template <typename Scalar>
AudioClip forward(const WaveUnetModel<Scalar>& model, const AudioClip& z) {
  ForwardTape<Scalar> tape;
  forward(model, z, tape);
  return AudioClip{tape.output.row(0).transpose().template cast<double>(), z.sample_rate};
}

template <typename Scalar>
LossAndGrads<Scalar> backward(const WaveUnetModel<Scalar>& model, const ForwardTape<Scalar>& tape,
                              const AudioClip& y) {
  const WaveUnetConfig& cfg = model.config;
  const int L = cfg.num_layers;
  const auto slope = static_cast<Scalar>(cfg.leaky_slope);
  const Eigen::Index n = tape.output.cols();
  if (y.size() != n) throw ArgumentError("wave_unet: target length differs from input length");

  LossAndGrads<Scalar> result;
  result.grads.resize(model.params.size());
  auto d_weight = [&](int conv) -> Matrix<Scalar>& { return result.grads[2 * conv]; };
  auto d_bias = [&](int conv) -> Matrix<Scalar>& { return result.grads[2 * conv + 1]; };

  const Eigen::VectorXd residual = tape.output.row(0).transpose().template cast<double>() - y.samples;
  result.loss = residual.squaredNorm() / static_cast<double>(n);
  Matrix<Scalar> d_out = ((2.0 / static_cast<double>(n)) * residual).transpose().template cast<Scalar>();

  const int out = cfg.num_convs() - 1;
  Matrix<Scalar> d_act;
  conv_backward(model.weight(out), 1, tape.dec_act[0], d_out, d_weight(out), d_bias(out), &d_act);

  std::vector<Matrix<Scalar>> d_skip(L);
  Matrix<Scalar> d_cat;
  for (int k = 0; k < L; ++k) {
    const int c = dec_conv(cfg, k);
    const Matrix<Scalar> d_pre = leaky_backward(tape.dec_pre[k], slope, d_act);
    conv_backward(model.weight(c), cfg.up_kernel, tape.dec_in[k], d_pre, d_weight(c), d_bias(c), &d_cat);
    const Eigen::Index up_rows = d_cat.rows() - tape.enc_act[k].rows();
    d_skip[k] = d_cat.bottomRows(tape.enc_act[k].rows());
    d_act = upsample_backward<Scalar>(d_cat.topRows(up_rows));
  }

  Matrix<Scalar> d_in;
  {
    const Matrix<Scalar> d_pre = leaky_backward(tape.mid_pre, slope, d_act);
    conv_backward(model.weight(L), cfg.down_kernel, tape.mid_in, d_pre, d_weight(L), d_bias(L), &d_in);
  }
  for (int k = L - 1; k >= 0; --k) {
    Matrix<Scalar> d_enc = std::move(d_skip[k]);
    decimate_backward(d_in, d_enc);
    const Matrix<Scalar> d_pre = leaky_backward(tape.enc_pre[k], slope, d_enc);
    conv_backward(model.weight(k), cfg.down_kernel, tape.enc_in[k], d_pre, d_weight(k), d_bias(k),
                  k > 0 ? &d_in : nullptr);
  }
  return result;
}

template <typename Scalar>
LossAndGrads<Scalar> loss_and_grads(const WaveUnetModel<Scalar>& model, const AudioClip& z, const AudioClip& y) {
  if (y.size() != z.size()) throw ArgumentError("wave_unet: target length differs from input length");
  ForwardTape<Scalar> tape;
  forward(model, z, tape);
  return backward(model, tape, y);
}

template <typename Scalar>
void adam_step(WaveUnetModel<Scalar>& model, const Gradients<Scalar>& grads, double lr, const AdamOptions& options) {
  if (grads.size() != model.params.size()) throw ArgumentError("adam: gradient count does not match parameters");
  for (std::size_t p = 0; p < grads.size(); ++p)
    if (grads[p].rows() != model.params[p].value.rows() || grads[p].cols() != model.params[p].value.cols())
      throw ArgumentError("adam: gradient for '" + model.params[p].name + "' has the wrong shape");

  AdamState& s = model.adam;
  const long step = s.step + 1;
  const double correction1 = 1.0 - std::pow(options.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(options.beta2, static_cast<double>(step));

  std::vector<Eigen::MatrixXd> first(s.first.size()), second(s.second.size()), updated(grads.size());
  for (std::size_t p = 0; p < grads.size(); ++p) {
    const Eigen::MatrixXd g = grads[p].template cast<double>();
    first[p] = options.beta1 * s.first[p] + (1.0 - options.beta1) * g;
    second[p] = options.beta2 * s.second[p] + (1.0 - options.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd m_hat = first[p].array() / correction1;
    const Eigen::ArrayXXd v_hat = second[p].array() / correction2;
    updated[p] = model.params[p].value.template cast<double>().array() - lr * m_hat / (v_hat.sqrt() + options.eps);
    if (!updated[p].allFinite())
      throw NumericError("adam: non-finite update for '" + model.params[p].name + "'");
  }
  // Commit only after every tensor passed the finiteness check.
  for (std::size_t p = 0; p < grads.size(); ++p) model.params[p].value = updated[p].template cast<Scalar>();
  s.first = std::move(first);
  s.second = std::move(second);
  s.step = step;
}

template <typename Scalar>
StepResult train_step(WaveUnetModel<Scalar>& model, const AudioClip& z, const AudioClip& y, double lr) {
  const LossAndGrads<Scalar> lg = loss_and_grads(model, z, y);
  adam_step(model, lg.grads, lr);
  return {lg.loss, forward(model, z)};
}

template <typename Scalar>
Trainer<Scalar>::Trainer(WaveUnetModel<Scalar>& model, AudioClip z, AudioClip y)
    : model_(model), z_(std::move(z)), y_(std::move(y)) {
  if (y_.size() != z_.size()) throw ArgumentError("wave_unet: target length differs from input length");
  forward(model_, z_, tape_);
}

template <typename Scalar>
StepResult Trainer<Scalar>::step(double lr) {
  const LossAndGrads<Scalar> lg = backward(model_, tape_, y_);
  adam_step(model_, lg.grads, lr);
  forward(model_, z_, tape_);
  return {lg.loss, current_output()};
}

template <typename Scalar>
AudioClip Trainer<Scalar>::current_output() const {
  return AudioClip{tape_.output.row(0).transpose().template cast<double>(), z_.sample_rate};
}

#define DNP_INSTANTIATE(Scalar)                                                                                   \
  template struct WaveUnetModel<Scalar>;                                                                          \
  template class Trainer<Scalar>;                                                                                 \
  template WaveUnetModel<Scalar> xavier_init<Scalar>(const WaveUnetConfig&);                                      \
  template void forward<Scalar>(const WaveUnetModel<Scalar>&, const AudioClip&, ForwardTape<Scalar>&);            \
  template AudioClip forward<Scalar>(const WaveUnetModel<Scalar>&, const AudioClip&);                             \
  template LossAndGrads<Scalar> loss_and_grads<Scalar>(const WaveUnetModel<Scalar>&, const AudioClip&,            \
                                                       const AudioClip&);                                         \
  template LossAndGrads<Scalar> backward<Scalar>(const WaveUnetModel<Scalar>&, const ForwardTape<Scalar>&,        \
                                                 const AudioClip&);                                               \
  template void adam_step<Scalar>(WaveUnetModel<Scalar>&, const Gradients<Scalar>&, double, const AdamOptions&); \
  template StepResult train_step<Scalar>(WaveUnetModel<Scalar>&, const AudioClip&, const AudioClip&, double);

DNP_INSTANTIATE(float)
DNP_INSTANTIATE(double)

#undef DNP_INSTANTIATE

}  // namespace dnp
