// Copyright 2026 the sawt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sawt/audio/wave.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "sawt/util/error.h"

namespace sawt::audio {

namespace {

std::uint32_t ReadU32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;  // little-endian hosts only, matching the rest of the toolkit
}

std::uint16_t ReadU16(const char* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

std::vector<double> Resample(const std::vector<double>& in, int from_rate,
                             int to_rate) {
  if (in.empty() || from_rate == to_rate) return in;
  const double ratio = static_cast<double>(from_rate) / to_rate;
  const auto out_len =
      static_cast<std::size_t>(std::floor((in.size() - 1) / ratio)) + 1;
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = i * ratio;
    const auto i0 = static_cast<std::size_t>(pos);
    const std::size_t i1 = std::min(i0 + 1, in.size() - 1);
    const double frac = pos - i0;
    out[i] = in[i0] * (1.0 - frac) + in[i1] * frac;
  }
  return out;
}

}  // namespace

Waveform LoadWave(const std::string& path, bool resample) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw DataError("UnsupportedFormat", path + " is not a RIFF/WAVE file");
  }

  int channels = 0, rate = 0, bits = 0;
  std::size_t data_off = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t chunk_len = ReadU32(buf.data() + pos + 4);
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0 && chunk_len >= 16) {
      const std::uint16_t format = ReadU16(buf.data() + pos + 8);
      if (format != 1) {
        throw DataError("UnsupportedFormat",
                        path + ": only PCM (format 1) is supported");
      }
      channels = ReadU16(buf.data() + pos + 10);
      rate = static_cast<int>(ReadU32(buf.data() + pos + 12));
      bits = ReadU16(buf.data() + pos + 22);
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = std::min<std::size_t>(chunk_len, buf.size() - data_off);
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }
  if (channels <= 0 || rate <= 0 || data_off == 0) {
    throw DataError("UnsupportedFormat", path + ": missing fmt or data chunk");
  }
  if (bits != 16) {
    throw DataError("UnsupportedFormat",
                    path + ": only 16-bit PCM is supported, got " +
                        std::to_string(bits) + "-bit");
  }

  const std::size_t n_frames = data_len / (2 * channels);
  std::vector<double> mono(n_frames);
  const char* p = buf.data() + data_off;
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      std::int16_t s;
      std::memcpy(&s, p + (i * channels + c) * 2, 2);
      acc += static_cast<double>(s) / 32768.0;
    }
    mono[i] = acc / channels;
  }

  if (rate != kSampleRate) {
    if (!resample) {
      throw DataError("RateMismatch",
                      path + ": rate " + std::to_string(rate) +
                          " != " + std::to_string(kSampleRate) +
                          " (pass resample to convert)");
    }
    mono = Resample(mono, rate, kSampleRate);
  }
  return Waveform{std::move(mono), kSampleRate};
}

void SaveWave(const std::string& path, const Waveform& wave) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("FileNotFound", "cannot write " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(wave.samples.size());
  const std::uint32_t data_bytes = n * 2;
  const std::uint32_t riff_len = 36 + data_bytes;

  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
  auto put_u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };

  out.write("RIFF", 4);
  put_u32(riff_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(kSampleRate);
  put_u32(kSampleRate * 2);  // byte rate
  put_u16(2);                // block align
  put_u16(16);               // bits
  out.write("data", 4);
  put_u32(data_bytes);
  for (const double s : wave.samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    put_u16(static_cast<std::uint16_t>(q));
  }
}

}  // namespace sawt::audio
