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

// Complex T-F mask estimator and its exact gradients.
//
// The network is a frame-context feed-forward net. For frame k it reads the
// normalized log-magnitude frames k-(C-1)/2 .. k+(C-1)/2 (edges replicated),
// runs them through affine + activation layers and a final affine layer with
// 2F outputs (u, v). The mask is bound * (tanh(u) + i tanh(v)).
//
// Enhancement is s_hat = istft(mask(log|stft(w)|) * stft(w)) and the loss is
// the time-domain MSE (1/T)||s_hat - target||^2. backward() differentiates the
// loss through istft (via its adjoint), the complex mask product, the tanh
// bound and every affine layer. The features feeding the network are treated
// as constants.

#ifndef SELAB_MODEL_H_
#define SELAB_MODEL_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "selab/signal.h"
#include "selab/stft.h"

namespace selab {

enum class Activation { kRelu, kTanh };
std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

struct MaskNetConfig {
  int context_frames = 5;
  std::vector<int> hidden_sizes = {256, 256};
  double mask_bound = 2.0;
  int input_bins = 257;
  Activation activation = Activation::kRelu;

  void validate() const;
  bool operator==(const MaskNetConfig&) const = default;
};

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MaskNet {
  MaskNetConfig config;
  std::vector<Layer> layers;
  // Per-bin feature standardization applied before the context stack:
  // z = (log|S| - feature_mean) .* feature_scale. Not trained.
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;

  std::size_t parameter_count() const;
};

/// Same layout as MaskNet::layers.
struct Gradients {
  std::vector<Layer> layers;

  static Gradients ZerosLike(const MaskNet& net);
  void add(const Gradients& other);
  void scale(double factor);
};

bool identical(const MaskNet& a, const MaskNet& b);

/// Flat view over trainable parameters, ordered layer by layer, weight
/// (column-major) before bias.
double& parameter_at(MaskNet& net, std::size_t index);
double gradient_at(const Gradients& g, std::size_t index);

/// Glorot-uniform hidden layers, zero biases. The output layer's weights are
/// Glorot-uniform scaled by 0.01 and its real-part bias is atanh(1/bound), so
/// the untrained mask sits close to 1 + 0i.
MaskNet init(const MaskNetConfig& config, std::uint64_t seed);

/// Sets feature_mean/feature_scale from a set of log-magnitude matrices.
void fit_feature_normalization(MaskNet& net,
                               const std::vector<Eigen::MatrixXd>& features);

Mask forward(const MaskNet& net, const Eigen::MatrixXd& log_mag);

Waveform enhance(const MaskNet& net, const Waveform& w, const StftParams& p);

/// (1/T) sum (est - target)^2.
double loss(const Waveform& est, const Waveform& target);

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

/// Loss of enhance(net, w) against target and its gradient w.r.t. every
/// parameter. Throws std::runtime_error naming the layer if an activation or
/// gradient becomes non-finite.
LossAndGradients backward(const MaskNet& net, const Waveform& w,
                          const Waveform& target, const StftParams& p);

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Layer> first_moment;
  std::vector<Layer> second_moment;

  static AdamState For(const MaskNet& net, double learning_rate = 1e-4);
};

/// One bias-corrected Adam update; increments state.step.
void adam_step(MaskNet& net, const Gradients& grads, AdamState& state);

/// Versioned binary dump of config, parameters, normalization and optimizer
/// state. Doubles are stored verbatim, so a round trip is bit-exact.
void save_checkpoint(const std::filesystem::path& path, const MaskNet& net,
                     const AdamState& adam);
struct Checkpoint {
  MaskNet net;
  AdamState adam;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace selab

#endif  // SELAB_MODEL_H_
