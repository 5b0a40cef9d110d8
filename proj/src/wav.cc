// src/wav.cc

// Copyright 2026  The stab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "stab/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "stab/base.h"

namespace stab {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t Le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t{p[3]} << 24);
}
std::uint16_t Le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

struct Parsed {
  WavInfo info;
  std::size_t data_offset = 0;
};

std::vector<unsigned char> Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open audio file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Parsed Parse(const std::filesystem::path& path,
             const std::vector<unsigned char>& bytes, bool need_all_data) {
  const std::string where = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(where + ": not a RIFF/WAVE file");
  }
  Parsed out;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = Le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size())
        throw Error(where + ": truncated fmt chunk");
      const std::uint16_t format = Le16(bytes.data() + body);
      out.info.channels = Le16(bytes.data() + body + 2);
      out.info.sample_rate_hz = static_cast<int>(Le32(bytes.data() + body + 4));
      out.info.bits_per_sample = Le16(bytes.data() + body + 14);
      if (format != kFormatPcm && format != kFormatExtensible)
        throw Error(where + ": PCM format required");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(where + ": data chunk before fmt chunk");
      if (out.info.channels != 1) throw Error(where + ": mono required");
      if (out.info.bits_per_sample != 16)
        throw Error(where + ": 16-bit PCM required");
      if (need_all_data && body + size > bytes.size())
        throw Error(where + ": truncated data chunk");
      out.info.num_frames = size / 2;
      out.data_offset = body;
      return out;
    }
    pos = body + size + (size & 1);
  }
  throw Error(where + (have_fmt ? ": missing data chunk" : ": missing fmt chunk"));
}

}  // namespace

WavInfo ProbeWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open audio file " + path.string());
  // Headers are small; 4 KiB covers fmt plus typical LIST chunks.
  std::vector<unsigned char> head(4096);
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  head.resize(static_cast<std::size_t>(in.gcount()));
  in.clear();
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::size_t>(in.tellg());
  Parsed p = Parse(path, head, false);
  if (p.data_offset + p.info.num_frames * 2 > file_size)
    throw Error(path.string() + ": truncated data chunk");
  return p.info;
}

std::vector<float> ReadWav(const std::filesystem::path& path,
                           int expected_rate_hz) {
  const auto bytes = Slurp(path);
  const Parsed p = Parse(path, bytes, true);
  if (p.info.sample_rate_hz != expected_rate_hz) {
    throw Error(path.string() + ": sample rate " +
                std::to_string(p.info.sample_rate_hz) + " Hz, expected " +
                std::to_string(expected_rate_hz) + " Hz");
  }
  if (p.info.num_frames == 0) throw Error(path.string() + ": empty audio");
  std::vector<float> out(p.info.num_frames);
  const unsigned char* data = bytes.data() + p.data_offset;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto v = static_cast<std::int16_t>(Le16(data + 2 * i));
    out[i] = static_cast<float>(v) / 32768.0f;
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, std::span<const float> samples,
              int sample_rate_hz) {
  std::vector<unsigned char> bytes(44 + samples.size() * 2);
  auto put32 = [&](std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes[at + i] = static_cast<unsigned char>(v >> (8 * i));
  };
  auto put16 = [&](std::size_t at, std::uint16_t v) {
    bytes[at] = static_cast<unsigned char>(v);
    bytes[at + 1] = static_cast<unsigned char>(v >> 8);
  };
  const auto data_size = static_cast<std::uint32_t>(samples.size() * 2);
  std::memcpy(&bytes[0], "RIFF", 4);
  put32(4, 36 + data_size);
  std::memcpy(&bytes[8], "WAVE", 4);
  std::memcpy(&bytes[12], "fmt ", 4);
  put32(16, 16);
  put16(20, kFormatPcm);
  put16(22, 1);
  put32(24, static_cast<std::uint32_t>(sample_rate_hz));
  put32(28, static_cast<std::uint32_t>(sample_rate_hz) * 2);
  put16(32, 2);
  put16(34, 16);
  std::memcpy(&bytes[36], "data", 4);
  put32(40, data_size);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const float x = std::clamp(samples[i], -1.0f, 1.0f);
    const long q = std::clamp(std::lround(x * 32768.0f), -32768L, 32767L);
    put16(44 + 2 * i, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write audio file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace stab
