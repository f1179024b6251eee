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

#include "fft.h"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace selab::internal {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealPlan {
 public:
  explicit RealPlan(int n) : n_(n) {
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    if (real_ == nullptr || spec_ == nullptr) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
    // c2r clobbers spec_; inverse() refills it on every call.
    inverse_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
    if (forward_ == nullptr || inverse_ == nullptr) {
      throw std::runtime_error("FFTW planning failed");
    }
  }
  ~RealPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealPlan(const RealPlan&) = delete;
  RealPlan& operator=(const RealPlan&) = delete;

  void forward(std::span<const double> in,
               std::span<std::complex<double>> out) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(forward_);
    for (int k = 0; k <= n_ / 2; ++k) out[k] = {spec_[k][0], spec_[k][1]};
  }

  void inverse(std::span<const std::complex<double>> in,
               std::span<double> out) {
    for (int k = 0; k <= n_ / 2; ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    spec_[0][1] = 0.0;
    if (n_ % 2 == 0) spec_[n_ / 2][1] = 0.0;
    fftw_execute(inverse_);
    std::copy(real_, real_ + n_, out.begin());
  }

 private:
  int n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

RealPlan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealPlan>(static_cast<int>(n));
  return *slot;
}

}  // namespace

void rfft(std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.empty() || out.size() != in.size() / 2 + 1) {
    throw std::invalid_argument("rfft: output must hold N/2+1 bins");
  }
  plan_for(in.size()).forward(in, out);
}

void irfft(std::span<const std::complex<double>> in, std::span<double> out) {
  if (out.empty() || in.size() != out.size() / 2 + 1) {
    throw std::invalid_argument("irfft: input must hold N/2+1 bins");
  }
  plan_for(out.size()).inverse(in, out);
}

}  // namespace selab::internal
