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

#include "selab/wav_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace selab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::vector<char>& buf, std::size_t off) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  const std::string where = " in " + path.string();
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw WavError("malformed header: not a RIFF/WAVE file" + where);
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const char* data = nullptr;
  std::size_t data_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const auto size = load<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > buf.size()) {
      throw WavError("malformed header: chunk '" + id + "' overruns file" + where);
    }
    if (id == "fmt ") {
      if (size < 16) throw WavError("malformed header: short fmt chunk" + where);
      format = load<std::uint16_t>(buf, body);
      channels = load<std::uint16_t>(buf, body + 2);
      rate = load<std::uint32_t>(buf, body + 4);
      bits = load<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = load<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data = buf.data() + body;
      data_bytes = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data == nullptr) {
    throw WavError("malformed header: missing fmt or data chunk" + where);
  }
  if (channels != 1) {
    throw WavError("unsupported channel count " + std::to_string(channels) +
                   " (mono required)" + where);
  }
  if (rate == 0) throw WavError("malformed header: zero sample rate" + where);

  std::vector<double> samples;
  if (format == kFormatPcm && bits == 16) {
    samples.resize(data_bytes / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      std::int16_t v;
      std::memcpy(&v, data + 2 * i, 2);
      samples[i] = v / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    samples.resize(data_bytes / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      float v;
      std::memcpy(&v, data + 4 * i, 4);
      samples[i] = v;
    }
  } else {
    throw WavError("unsupported encoding (format " + std::to_string(format) +
                   ", " + std::to_string(bits) +
                   " bits); expected 16-bit PCM or 32-bit float" + where);
  }
  if (samples.empty()) throw WavError("empty data chunk" + where);
  return Waveform(std::move(samples), static_cast<int>(rate));
}

void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const auto data_bytes = static_cast<std::uint32_t>(w.size() * block);

  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  put<std::uint32_t>(out, 36 + data_bytes);
  out.append("WAVEfmt ");
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate()) * block);
  put<std::uint16_t>(out, block);
  put<std::uint16_t>(out, bits);
  out.append("data");
  put<std::uint32_t>(out, data_bytes);
  for (double v : w.samples()) {
    if (pcm) {
      const double q = std::round(std::clamp(v, -1.0, 32767.0 / 32768.0) * 32768.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(q));
    } else {
      put<float>(out, static_cast<float>(v));
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw WavError("cannot open " + path.string() + " for writing");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw WavError("write failed for " + path.string());
}

}  // namespace selab
