// Copyright 2026 The selab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "selab/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace selab {
namespace {

constexpr double kOutputInitScale = 1e-3;
constexpr double kFeatureEps = 1e-8;

// Everything the backward pass needs from a forward pass.
struct ForwardCache {
  Eigen::MatrixXd input;                    // (C*F) x K
  std::vector<Eigen::MatrixXd> activations; // post-activation per hidden layer
  Eigen::MatrixXd tanh_u, tanh_v;           // F x K
};

Eigen::MatrixXd stack_context(const MaskNet& net, const Eigen::MatrixXd& log_mag) {
  const int bins = net.config.input_bins;
  const int frames = static_cast<int>(log_mag.cols());
  const int half = net.config.context_frames / 2;
  const Eigen::MatrixXd z =
      ((log_mag.colwise() - net.feature_mean).array().colwise() *
       net.feature_scale.array()).matrix();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(bins) * net.config.context_frames, frames);
  for (int j = 0; j < net.config.context_frames; ++j) {
    for (int k = 0; k < frames; ++k) {
      const int src = std::clamp(k + j - half, 0, frames - 1);
      x.block(static_cast<Eigen::Index>(j) * bins, k, bins, 1) = z.col(src);
    }
  }
  return x;
}

void apply_activation(Activation a, Eigen::MatrixXd& m) {
  switch (a) {
    case Activation::kRelu:
      m = m.cwiseMax(0.0);
      return;
    case Activation::kTanh:
      m = m.array().tanh().matrix();
      return;
  }
}

// Multiplies grad in place by the activation derivative, expressed through
// the activation output.
void apply_activation_grad(Activation a, const Eigen::MatrixXd& out,
                           Eigen::MatrixXd& grad) {
  switch (a) {
    case Activation::kRelu:
      grad = (out.array() > 0.0).select(grad, 0.0);
      return;
    case Activation::kTanh:
      grad = grad.cwiseProduct((1.0 - out.array().square()).matrix());
      return;
  }
}

void check_finite(const Eigen::MatrixXd& m, const std::string& where) {
  if (!m.allFinite()) throw std::runtime_error("non-finite values in " + where);
}

ForwardCache run_forward(const MaskNet& net, const Eigen::MatrixXd& log_mag) {
  if (log_mag.rows() != net.config.input_bins) {
    throw std::invalid_argument("forward: features have " +
                                std::to_string(log_mag.rows()) + " bins, net expects " +
                                std::to_string(net.config.input_bins));
  }
  ForwardCache cache;
  cache.input = stack_context(net, log_mag);
  const Eigen::MatrixXd* h = &cache.input;
  const std::size_t hidden = net.layers.size() - 1;
  cache.activations.reserve(hidden);
  for (std::size_t l = 0; l < hidden; ++l) {
    Eigen::MatrixXd z = net.layers[l].weight * *h;
    z.colwise() += net.layers[l].bias;
    apply_activation(net.config.activation, z);
    check_finite(z, "hidden layer " + std::to_string(l));
    cache.activations.push_back(std::move(z));
    h = &cache.activations.back();
  }
  Eigen::MatrixXd out = net.layers.back().weight * *h;
  out.colwise() += net.layers.back().bias;
  check_finite(out, "output layer");
  const int bins = net.config.input_bins;
  cache.tanh_u = out.topRows(bins).array().tanh().matrix();
  cache.tanh_v = out.bottomRows(bins).array().tanh().matrix();
  return cache;
}

Mask mask_from(const MaskNet& net, const ForwardCache& cache) {
  const double b = net.config.mask_bound;
  Mask m;
  m.values.resize(cache.tanh_u.rows(), cache.tanh_u.cols());
  m.values.real() = b * cache.tanh_u;
  m.values.imag() = b * cache.tanh_v;
  return m;
}

template <typename Fn>
void for_each_param(std::vector<Layer>& layers, Fn&& fn) {
  for (auto& layer : layers) {
    fn(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    fn(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
}

std::vector<Layer> zeros_like(const std::vector<Layer>& layers) {
  std::vector<Layer> out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                   Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

void MaskNetConfig::validate() const {
  if (context_frames < 1 || context_frames % 2 == 0) {
    throw std::invalid_argument("MaskNetConfig: context_frames must be odd and >= 1");
  }
  for (int h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("MaskNetConfig: hidden sizes must be >= 1");
  }
  if (!(mask_bound > 0.0) || !std::isfinite(mask_bound)) {
    throw std::invalid_argument("MaskNetConfig: mask_bound must be positive");
  }
  if (input_bins < 1) throw std::invalid_argument("MaskNetConfig: input_bins must be >= 1");
}

std::size_t MaskNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

Gradients Gradients::ZerosLike(const MaskNet& net) { return {zeros_like(net.layers)}; }

void Gradients::add(const Gradients& other) {
  if (other.layers.size() != layers.size()) throw std::invalid_argument("Gradients::add: shape mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight += other.layers[l].weight;
    layers[l].bias += other.layers[l].bias;
  }
}

void Gradients::scale(double factor) {
  for (auto& l : layers) {
    l.weight *= factor;
    l.bias *= factor;
  }
}

bool identical(const MaskNet& a, const MaskNet& b) {
  if (!(a.config == b.config) || a.layers.size() != b.layers.size()) return false;
  if (a.feature_mean != b.feature_mean || a.feature_scale != b.feature_scale) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias) {
      return false;
    }
  }
  return true;
}

double& parameter_at(MaskNet& net, std::size_t index) {
  double* found = nullptr;
  std::size_t remaining = index;
  for_each_param(net.layers, [&](double* data, std::size_t n) {
    if (found) return;
    if (remaining < n) {
      found = data + remaining;
    } else {
      remaining -= n;
    }
  });
  if (!found) throw std::out_of_range("parameter_at: index out of range");
  return *found;
}

double gradient_at(const Gradients& g, std::size_t index) {
  for (const auto& l : g.layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (index < nw) return l.weight.data()[index];
    index -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (index < nb) return l.bias[static_cast<Eigen::Index>(index)];
    index -= nb;
  }
  throw std::out_of_range("gradient_at: index out of range");
}

MaskNet init(const MaskNetConfig& config, std::uint64_t seed) {
  config.validate();
  MaskNet net;
  net.config = config;
  net.feature_mean = Eigen::VectorXd::Zero(config.input_bins);
  net.feature_scale = Eigen::VectorXd::Ones(config.input_bins);

  std::vector<int> sizes = {config.context_frames * config.input_bins};
  sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  sizes.push_back(2 * config.input_bins);

  Rng rng(seed);
  const std::size_t num_layers = sizes.size() - 1;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    double a = std::sqrt(6.0 / (fan_in + fan_out));
    if (l + 1 == num_layers) a *= kOutputInitScale;
    Layer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.uniform(-a, a);
    }
    net.layers.push_back(std::move(layer));
  }
  const double target = std::min(1.0 / config.mask_bound, 1.0 - 1e-6);
  net.layers.back().bias.head(config.input_bins).setConstant(std::atanh(target));
  return net;
}

void fit_feature_normalization(MaskNet& net,
                               const std::vector<Eigen::MatrixXd>& features) {
  const int bins = net.config.input_bins;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(bins);
  double count = 0.0;
  for (const auto& f : features) {
    if (f.rows() != bins) throw std::invalid_argument("fit_feature_normalization: bin mismatch");
    sum += f.rowwise().sum();
    sum_sq += f.array().square().matrix().rowwise().sum();
    count += static_cast<double>(f.cols());
  }
  if (count == 0.0) throw std::invalid_argument("fit_feature_normalization: no frames");
  net.feature_mean = sum / count;
  const Eigen::VectorXd var =
      (sum_sq / count - net.feature_mean.cwiseProduct(net.feature_mean)).cwiseMax(0.0);
  net.feature_scale = (var.array() + kFeatureEps).rsqrt().matrix();
}

Mask forward(const MaskNet& net, const Eigen::MatrixXd& log_mag) {
  return mask_from(net, run_forward(net, log_mag));
}

Waveform enhance(const MaskNet& net, const Waveform& w, const StftParams& p) {
  const Spectrogram S = stft(w, p);
  return istft(apply_mask(S, forward(net, log_magnitude(S))));
}

double loss(const Waveform& est, const Waveform& target) {
  if (est.size() != target.size()) {
    throw std::invalid_argument("loss: length mismatch (" + std::to_string(est.size()) +
                                " vs " + std::to_string(target.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(est.size());
}

LossAndGradients backward(const MaskNet& net, const Waveform& w,
                          const Waveform& target, const StftParams& p) {
  if (w.size() != target.size()) {
    throw std::invalid_argument("backward: input and target lengths differ");
  }
  const Spectrogram S = stft(w, p);
  const ForwardCache cache = run_forward(net, log_magnitude(S));
  const Waveform est = istft(apply_mask(S, mask_from(net, cache)));

  LossAndGradients out;
  out.loss = loss(est, target);

  // dL/d(est) = (2/T)(est - target), pulled back through istft.
  const double t = static_cast<double>(w.size());
  std::vector<double> residual(w.size());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    residual[i] = 2.0 / t * (est[i] - target[i]);
  }
  const Spectrogram G = istft_adjoint(Waveform(std::move(residual), w.sample_rate()), p, w.size());

  // Mask gradient: mult_f * conj(S) * G, split into real and imaginary parts,
  // then through bound * tanh.
  const int bins = net.config.input_bins;
  const double bound = net.config.mask_bound;
  const Eigen::Index frames = S.bins.cols();
  Eigen::MatrixXd d_out(2 * bins, frames);
  for (Eigen::Index k = 0; k < frames; ++k) {
    for (int f = 0; f < bins; ++f) {
      const std::complex<double> pg = std::conj(S.bins(f, k)) * G.bins(f, k);
      const double m = bin_multiplicity(f, bins) * bound;
      const double tu = cache.tanh_u(f, k), tv = cache.tanh_v(f, k);
      d_out(f, k) = m * pg.real() * (1.0 - tu * tu);
      d_out(bins + f, k) = m * pg.imag() * (1.0 - tv * tv);
    }
  }

  out.grads.layers.resize(net.layers.size());
  Eigen::MatrixXd delta = std::move(d_out);
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const Eigen::MatrixXd& below = l == 0 ? cache.input : cache.activations[l - 1];
    Layer& g = out.grads.layers[l];
    g.weight.noalias() = delta * below.transpose();
    g.bias = delta.rowwise().sum();
    if (!g.weight.allFinite() || !g.bias.allFinite()) {
      throw std::runtime_error("non-finite gradient in layer " + std::to_string(l));
    }
    if (l == 0) break;
    Eigen::MatrixXd up = net.layers[l].weight.transpose() * delta;
    apply_activation_grad(net.config.activation, cache.activations[l - 1], up);
    delta = std::move(up);
  }
  return out;
}

AdamState AdamState::For(const MaskNet& net, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  s.first_moment = zeros_like(net.layers);
  s.second_moment = zeros_like(net.layers);
  return s;
}

void adam_step(MaskNet& net, const Gradients& grads, AdamState& state) {
  const std::size_t n = net.layers.size();
  if (grads.layers.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw std::invalid_argument("adam_step: layer count mismatch");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (grads.layers[l].weight.rows() != net.layers[l].weight.rows() ||
        grads.layers[l].weight.cols() != net.layers[l].weight.cols() ||
        grads.layers[l].bias.size() != net.layers[l].bias.size() ||
        state.first_moment[l].weight.size() != net.layers[l].weight.size() ||
        state.second_moment[l].bias.size() != net.layers[l].bias.size()) {
      throw std::invalid_argument("adam_step: shape mismatch in layer " + std::to_string(l));
    }
  }
  ++state.step;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.learning_rate, eps = state.epsilon;
  auto update = [&](double* param, const double* grad, double* m, double* v,
                    Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  };
  for (std::size_t l = 0; l < n; ++l) {
    update(net.layers[l].weight.data(), grads.layers[l].weight.data(),
           state.first_moment[l].weight.data(), state.second_moment[l].weight.data(),
           net.layers[l].weight.size());
    update(net.layers[l].bias.data(), grads.layers[l].bias.data(),
           state.first_moment[l].bias.data(), state.second_moment[l].bias.data(),
           net.layers[l].bias.size());
  }
}

}  // namespace selab
