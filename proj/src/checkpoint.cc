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

// Checkpoint layout (little-endian):
//   "SELABCKP" | u32 version
//   config: i32 context, i32 bins, i32 activation, f64 bound,
//           u32 n_hidden, i32 hidden[n_hidden]
//   vec feature_mean | vec feature_scale
//   u32 n_layers, then per layer: mat weight, vec bias
//   adam: f64 lr, b1, b2, eps | i64 step | layers m | layers v
// where vec = u64 size + f64[size], mat = u64 rows + u64 cols + f64[] (col-major).

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "selab/model.h"

namespace selab {
namespace {

constexpr char kMagic[8] = {'S', 'E', 'L', 'A', 'B', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : os_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!os_) throw std::runtime_error("cannot write checkpoint " + path.string());
  }
  template <typename T>
  void pod(T v) { os_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
  void raw(const double* d, std::size_t n) {
    os_.write(reinterpret_cast<const char*>(d), static_cast<std::streamsize>(n * sizeof(double)));
  }
  void vec(const Eigen::VectorXd& v) {
    pod<std::uint64_t>(v.size());
    raw(v.data(), v.size());
  }
  void mat(const Eigen::MatrixXd& m) {
    pod<std::uint64_t>(m.rows());
    pod<std::uint64_t>(m.cols());
    raw(m.data(), m.size());
  }
  void layers(const std::vector<Layer>& ls) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(ls.size()));
    for (const auto& l : ls) {
      mat(l.weight);
      vec(l.bias);
    }
  }
  void finish() {
    os_.flush();
    if (!os_) throw std::runtime_error("write failed for " + path_.string());
  }

 private:
  std::ofstream os_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : is_(path, std::ios::binary), path_(path) {
    if (!is_) throw std::runtime_error("cannot open checkpoint " + path.string());
  }
  template <typename T>
  T pod() {
    T v;
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) fail("truncated file");
    return v;
  }
  void raw(double* d, std::size_t n) {
    is_.read(reinterpret_cast<char*>(d), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is_) fail("truncated file");
  }
  Eigen::VectorXd vec() {
    const auto n = pod<std::uint64_t>();
    if (n > kMaxElements) fail("implausible vector size");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    raw(v.data(), n);
    return v;
  }
  Eigen::MatrixXd mat() {
    const auto r = pod<std::uint64_t>();
    const auto c = pod<std::uint64_t>();
    if (r > kMaxElements || c > kMaxElements || r * c > kMaxElements) fail("implausible matrix size");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    raw(m.data(), r * c);
    return m;
  }
  std::vector<Layer> layers() {
    const auto n = pod<std::uint32_t>();
    if (n > 1024) fail("implausible layer count");
    std::vector<Layer> out;
    for (std::uint32_t i = 0; i < n; ++i) {
      Eigen::MatrixXd w = mat();
      Eigen::VectorXd b = vec();
      out.push_back({std::move(w), std::move(b)});
    }
    return out;
  }
  [[noreturn]] void fail(const std::string& why) {
    throw std::runtime_error("bad checkpoint " + path_.string() + ": " + why);
  }

 private:
  static constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;
  std::ifstream is_;
  std::filesystem::path path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MaskNet& net,
                     const AdamState& adam) {
  Writer w(path);
  for (char c : kMagic) w.pod(c);
  w.pod(kVersion);
  const MaskNetConfig& c = net.config;
  w.pod<std::int32_t>(c.context_frames);
  w.pod<std::int32_t>(c.input_bins);
  w.pod<std::int32_t>(static_cast<std::int32_t>(c.activation));
  w.pod<double>(c.mask_bound);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(c.hidden_sizes.size()));
  for (int h : c.hidden_sizes) w.pod<std::int32_t>(h);
  w.vec(net.feature_mean);
  w.vec(net.feature_scale);
  w.layers(net.layers);
  w.pod(adam.learning_rate);
  w.pod(adam.beta1);
  w.pod(adam.beta2);
  w.pod(adam.epsilon);
  w.pod<std::int64_t>(adam.step);
  w.layers(adam.first_moment);
  w.layers(adam.second_moment);
  w.finish();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  for (char c : kMagic) {
    if (r.pod<char>() != c) r.fail("wrong magic");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));

  Checkpoint ck;
  MaskNetConfig& c = ck.net.config;
  c.context_frames = r.pod<std::int32_t>();
  c.input_bins = r.pod<std::int32_t>();
  const auto act = r.pod<std::int32_t>();
  if (act != static_cast<std::int32_t>(Activation::kRelu) &&
      act != static_cast<std::int32_t>(Activation::kTanh)) {
    r.fail("unknown activation code");
  }
  c.activation = static_cast<Activation>(act);
  c.mask_bound = r.pod<double>();
  const auto n_hidden = r.pod<std::uint32_t>();
  if (n_hidden > 1024) r.fail("implausible hidden layer count");
  c.hidden_sizes.resize(n_hidden);
  for (auto& h : c.hidden_sizes) h = r.pod<std::int32_t>();
  c.validate();
  ck.net.feature_mean = r.vec();
  ck.net.feature_scale = r.vec();
  ck.net.layers = r.layers();
  if (ck.net.layers.size() != n_hidden + 1) r.fail("layer count does not match config");
  ck.adam.learning_rate = r.pod<double>();
  ck.adam.beta1 = r.pod<double>();
  ck.adam.beta2 = r.pod<double>();
  ck.adam.epsilon = r.pod<double>();
  ck.adam.step = r.pod<std::int64_t>();
  ck.adam.first_moment = r.layers();
  ck.adam.second_moment = r.layers();
  return ck;
}

}  // namespace selab
