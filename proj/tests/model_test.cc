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

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "numeric_checks.h"
#include "test_util.h"

namespace selab {
namespace {

MaskNetConfig small_config() {
  MaskNetConfig c;
  c.context_frames = 3;
  c.hidden_sizes = {16, 12};
  c.input_bins = 33;  // 64-sample window
  return c;
}

const StftParams kSmallStft{64, 16};

void zero_parameters(MaskNet& net) {
  for (auto& l : net.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

// All weights zero; output bias set so the mask is exactly bound*tanh(atanh(1/bound)).
MaskNet identity_net(const MaskNetConfig& c) {
  MaskNet net = init(c, 0);
  zero_parameters(net);
  net.layers.back().bias.head(c.input_bins).setConstant(std::atanh(1.0 / c.mask_bound));
  return net;
}

TEST(MaskNetConfigTest, Validation) {
  EXPECT_NO_THROW(MaskNetConfig{}.validate());
  MaskNetConfig c;
  c.hidden_sizes = {256, 0};
  EXPECT_THROW(init(c, 1), std::invalid_argument);
  c = {};
  c.context_frames = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.mask_bound = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(InitTest, ShapesChainFromContextStackToTwoF) {
  const MaskNetConfig c = small_config();
  const MaskNet net = init(c, 3);
  ASSERT_EQ(net.layers.size(), 3u);
  EXPECT_EQ(net.layers[0].weight.cols(), c.context_frames * c.input_bins);
  EXPECT_EQ(net.layers[0].weight.rows(), 16);
  EXPECT_EQ(net.layers[1].weight.cols(), 16);
  EXPECT_EQ(net.layers[2].weight.rows(), 2 * c.input_bins);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    EXPECT_EQ(net.layers[l].bias.size(), net.layers[l].weight.rows());
    EXPECT_TRUE(net.layers[l].weight.allFinite());
  }
  EXPECT_EQ(net.parameter_count(), 99u * 16 + 16 + 16 * 12 + 12 + 12 * 66 + 66);
}

TEST(InitTest, GlorotBoundsAndZeroHiddenBiases) {
  const MaskNet net = init(small_config(), 4);
  const double a0 = std::sqrt(6.0 / (99 + 16));
  EXPECT_LE(net.layers[0].weight.cwiseAbs().maxCoeff(), a0);
  EXPECT_GT(net.layers[0].weight.cwiseAbs().maxCoeff(), 0.8 * a0);
  EXPECT_TRUE(net.layers[0].bias.isZero(0.0));
  EXPECT_TRUE(net.layers[1].bias.isZero(0.0));
}

TEST(InitTest, SameSeedSameParameters) {
  EXPECT_TRUE(identical(init(small_config(), 5), init(small_config(), 5)));
  EXPECT_FALSE(identical(init(small_config(), 5), init(small_config(), 6)));
}

TEST(InitTest, InitialMaskIsNearIdentity) {
  for (const MaskNetConfig& c : {small_config(), MaskNetConfig{}}) {
    const MaskNet net = init(c, 7);
    const StftParams p{2 * (c.input_bins - 1), (c.input_bins - 1) / 2};
    const Waveform w = synth({SynthKind::kSpeechLike, 1.0, 8});
    const Mask m = forward(net, log_magnitude(stft(w, p)));
    const double worst = (m.values.array() - std::complex<double>(1.0, 0.0)).abs().maxCoeff();
    EXPECT_LT(worst, 0.3);
  }
}

TEST(ForwardTest, ZeroParametersGiveZeroMask) {
  MaskNet net = init(small_config(), 9);
  zero_parameters(net);
  const Mask m = forward(net, log_magnitude(stft(testing::random_wave(500, 1), kSmallStft)));
  EXPECT_TRUE(m.values.isZero(0.0));
}

TEST(ForwardTest, MaskRespectsTanhBound) {
  MaskNet net = init(small_config(), 10);
  for (auto& l : net.layers) l.weight *= 200.0;
  const Mask m = forward(net, log_magnitude(stft(testing::random_wave(800, 2, 5.0), kSmallStft)));
  const double b = net.config.mask_bound;
  EXPECT_LE(m.values.real().cwiseAbs().maxCoeff(), b);
  EXPECT_LE(m.values.imag().cwiseAbs().maxCoeff(), b);
  EXPECT_LE(m.values.cwiseAbs().maxCoeff(), b * std::sqrt(2.0));
  EXPECT_GT(m.values.real().cwiseAbs().maxCoeff(), 0.9 * b);
}

TEST(ForwardTest, IdenticalColumnsGiveIdenticalMaskColumns) {
  MaskNet net = init(small_config(), 11);
  net.layers.back().weight *= 50.0;
  Eigen::MatrixXd feats(33, 6);
  Rng rng(3);
  Eigen::VectorXd col(33);
  for (auto& v : col) v = rng.normal();
  for (int k = 0; k < 6; ++k) feats.col(k) = col;
  const Mask m = forward(net, feats);
  // Blocked matrix products may round the trailing columns differently.
  for (int k = 1; k < 6; ++k) {
    EXPECT_LT((m.values.col(k) - m.values.col(0)).cwiseAbs().maxCoeff(), 1e-12) << k;
  }
}

TEST(ForwardTest, ShapeMismatchThrows) {
  const MaskNet net = init(small_config(), 12);
  EXPECT_THROW(forward(net, Eigen::MatrixXd::Zero(32, 4)), std::invalid_argument);
}

TEST(EnhanceTest, IdentityMaskReproducesInput) {
  const MaskNet net = identity_net(small_config());
  const Waveform w = testing::random_wave(3000, 4);
  EXPECT_LT(testing::relative_error(enhance(net, w, kSmallStft), w), 1e-6);
}

TEST(EnhanceTest, ZeroMaskSilencesAndIsDeterministic) {
  MaskNet net = init(small_config(), 13);
  const Waveform w = testing::random_wave(3000, 5);
  EXPECT_EQ(enhance(net, w, kSmallStft), enhance(net, w, kSmallStft));
  zero_parameters(net);
  EXPECT_EQ(mean_power(enhance(net, w, kSmallStft)), 0.0);
}

TEST(LossTest, Examples) {
  const Waveform a = testing::random_wave(50, 6);
  EXPECT_EQ(loss(a, a), 0.0);
  EXPECT_EQ(loss(Waveform({1.0, 1.0}), Waveform({0.0, 0.0})), 1.0);
  EXPECT_EQ(loss(Waveform({2.0, 0.0, 0.0, 0.0}), Waveform::Zeros(4)), 1.0);
  EXPECT_THROW(loss(Waveform::Zeros(3), Waveform::Zeros(4)), std::invalid_argument);
}

TEST(LossTest, NonNegativeAndZeroOnlyAtEquality) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Waveform a = testing::random_wave(64, s), b = testing::random_wave(64, s + 100);
    EXPECT_GT(loss(a, b), 0.0);
  }
}

TEST(BackwardTest, LossMatchesForwardPath) {
  const MaskNet net = init(small_config(), 14);
  const Waveform w = testing::random_wave(700, 7), t = testing::random_wave(700, 8);
  EXPECT_EQ(backward(net, w, t, kSmallStft).loss, loss(enhance(net, w, kSmallStft), t));
}

TEST(BackwardTest, ExactTargetGivesZeroLossAndGradients) {
  const MaskNet net = init(small_config(), 15);
  const Waveform w = testing::random_wave(700, 9);
  const LossAndGradients lg = backward(net, w, enhance(net, w, kSmallStft), kSmallStft);
  EXPECT_EQ(lg.loss, 0.0);
  for (std::size_t i = 0; i < net.parameter_count(); ++i) ASSERT_EQ(gradient_at(lg.grads, i), 0.0);
}

TEST(BackwardTest, DoublingResidualDoublesGradients) {
  const MaskNet net = init(small_config(), 16);
  const Waveform w = testing::random_wave(700, 10);
  const Waveform est = enhance(net, w, kSmallStft);
  const Waveform r = testing::random_wave(700, 11, 0.1);
  const auto g1 = backward(net, w, subtract(est, r), kSmallStft).grads;
  const auto g2 = backward(net, w, subtract(est, scale(r, 2.0)), kSmallStft).grads;
  for (std::size_t i = 0; i < net.parameter_count(); ++i) {
    ASSERT_NEAR(gradient_at(g2, i), 2.0 * gradient_at(g1, i),
                1e-9 * std::abs(gradient_at(g1, i)) + 1e-15);
  }
}

TEST(BackwardTest, FiniteDifferencesReluNet) {
  const auto check = testing::check_gradients(testing::tiny_net(Activation::kRelu, 17), 40, 1);
  EXPECT_GE(check.parameters_checked, 30u);
  EXPECT_LT(check.worst_relative_error, 1e-4);
}

TEST(BackwardTest, FiniteDifferencesTanhNet) {
  const auto check = testing::check_gradients(testing::tiny_net(Activation::kTanh, 18), 40, 2);
  EXPECT_LT(check.worst_relative_error, 1e-4);
}

TEST(BackwardTest, FiniteDifferencesWithContextAndFeatureScaling) {
  MaskNetConfig c;
  c.context_frames = 3;
  c.hidden_sizes = {6, 5};
  c.input_bins = 9;
  MaskNet net = init(c, 19);
  net.layers.back().weight *= 30.0;
  net.feature_mean.setConstant(-1.0);
  net.feature_scale.setConstant(0.7);
  EXPECT_LT(testing::check_gradients(net, 40, 3).worst_relative_error, 1e-4);
}

MaskNet scalar_net() {
  MaskNet net;
  net.layers.push_back(Layer{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(0)});
  return net;
}

Gradients scalar_grad(double g) {
  Gradients grads;
  grads.layers.push_back(Layer{Eigen::MatrixXd::Constant(1, 1, g), Eigen::VectorXd::Zero(0)});
  return grads;
}

TEST(AdamTest, FirstStepOnScalar) {
  MaskNet net = scalar_net();
  AdamState state = AdamState::For(net, 1e-4);
  adam_step(net, scalar_grad(1.0), state);
  // m_hat = v_hat = 1, so the step is lr / (1 + eps).
  EXPECT_DOUBLE_EQ(net.layers[0].weight(0, 0), -1e-4 / (1.0 + 1e-8));
  EXPECT_NEAR(net.layers[0].weight(0, 0), -9.9999999e-5, 1e-13);
  EXPECT_EQ(state.step, 1);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  MaskNet net = init(small_config(), 20);
  const MaskNet before = net;
  AdamState state = AdamState::For(net, 1e-3);
  adam_step(net, Gradients::ZerosLike(net), state);
  EXPECT_TRUE(identical(net, before));
  EXPECT_EQ(state.step, 1);
}

TEST(AdamTest, ConstantGradientStepTendsToLearningRate) {
  MaskNet net = scalar_net();
  AdamState state = AdamState::For(net, 1e-3);
  double prev = 0.0, step = 0.0;
  for (int t = 0; t < 5000; ++t) {
    adam_step(net, scalar_grad(-0.37), state);
    step = net.layers[0].weight(0, 0) - prev;
    prev = net.layers[0].weight(0, 0);
  }
  EXPECT_GT(step, 0.0);
  EXPECT_NEAR(step, 1e-3, 1e-9);
}

TEST(AdamTest, ShapeMismatchThrows) {
  MaskNet net = init(small_config(), 21);
  AdamState state = AdamState::For(net);
  Gradients g = Gradients::ZerosLike(net);
  g.layers[1].weight.resize(3, 3);
  EXPECT_THROW(adam_step(net, g, state), std::invalid_argument);
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  const auto dir = testing::scratch_dir("ckpt");
  MaskNet net = init(small_config(), 22);
  net.feature_mean.setRandom();
  net.feature_scale.setRandom();
  AdamState adam = AdamState::For(net, 3e-4);
  const Waveform w = testing::random_wave(700, 12);
  adam_step(net, backward(net, w, testing::random_wave(700, 13), kSmallStft).grads, adam);
  save_checkpoint(dir / "a.ckpt", net, adam);
  const Checkpoint ck = load_checkpoint(dir / "a.ckpt");
  EXPECT_TRUE(identical(ck.net, net));
  EXPECT_EQ(ck.net.config, net.config);
  EXPECT_EQ(ck.adam.step, adam.step);
  EXPECT_EQ(ck.adam.learning_rate, adam.learning_rate);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    EXPECT_EQ(ck.adam.first_moment[l].weight, adam.first_moment[l].weight);
    EXPECT_EQ(ck.adam.second_moment[l].bias, adam.second_moment[l].bias);
  }
  EXPECT_EQ(enhance(ck.net, w, kSmallStft), enhance(net, w, kSmallStft));
}

TEST(CheckpointTest, RejectsGarbage) {
  const auto dir = testing::scratch_dir("ckpt_bad");
  std::ofstream(dir / "bad.ckpt") << "hello";
  EXPECT_THROW(load_checkpoint(dir / "bad.ckpt"), std::runtime_error);
}

TEST(ActivationTest, NamesRoundTrip) {
  for (Activation a : {Activation::kRelu, Activation::kTanh}) {
    EXPECT_EQ(activation_from_string(to_string(a)), a);
  }
}

}  // namespace
}  // namespace selab
