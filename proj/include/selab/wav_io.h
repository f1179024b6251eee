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

#ifndef SELAB_WAV_IO_H_
#define SELAB_WAV_IO_H_

#include <filesystem>
#include <stdexcept>
#include <string>

#include "selab/signal.h"

namespace selab {

enum class WavEncoding { kPcm16, kFloat32 };

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a mono RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float.
/// PCM16 samples map to v / 32768.
Waveform read_wav(const std::filesystem::path& path);

/// Writes a mono RIFF/WAVE file. PCM16 output is clamped to [-1, 1) and
/// rounded; float32 output is stored unclamped.
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace selab

#endif  // SELAB_WAV_IO_H_
