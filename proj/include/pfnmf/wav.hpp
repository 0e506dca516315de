// pfnmf/wav.hpp

// Copyright 2026  The pfnmf authors

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

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pfnmf/common.hpp"

namespace pfnmf {

/// Mono audio in [-1, 1] with its native sample rate. No resampling is ever
/// performed; whatever rate the file declares is carried through.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// Decodes one sample frame starting at p, averaging the channels.
// Integer PCM is divided by the type's max magnitude; floats pass through.
inline double decode_frame(const unsigned char* p, int channels, int bits,
                           bool is_float) {
  double acc = 0.0;
  const int bytes = bits / 8;
  for (int c = 0; c < channels; ++c) {
    const unsigned char* s = p + c * bytes;
    double value = 0.0;
    if (is_float) {
      float f;
      std::memcpy(&f, s, 4);
      value = static_cast<double>(f);
    } else if (bits == 8) {
      value = (static_cast<int>(s[0]) - 128) / 128.0;
    } else if (bits == 16) {
      std::int16_t v;
      std::memcpy(&v, s, 2);
      value = v / 32768.0;
    } else if (bits == 24) {
      std::int32_t v = s[0] | (s[1] << 8) | (s[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign-extend
      value = v / 8388608.0;
    } else {  // 32-bit integer
      std::int32_t v;
      std::memcpy(&v, s, 4);
      value = v / 2147483648.0;
    }
    acc += value;
  }
  return acc / channels;
}

}  // namespace detail

/// Reads a RIFF/WAVE file and mixes it down to mono by the arithmetic mean
/// of the channels per sample. Accepts 8/16/24/32-bit integer PCM and
/// 32-bit IEEE float, plus the WAVE_FORMAT_EXTENSIBLE wrappers of both.
inline AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("file not found or unreadable: " + path);

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  auto malformed = [&](const std::string& why) {
    return data_error("malformed WAV file " + path + ": " + why);
  };

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw malformed("missing RIFF/WAVE header");

  int channels = 0, bits = 0, sample_rate = 0;
  bool is_float = false, have_fmt = false;
  std::size_t data_offset = 0, data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = detail::read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) throw malformed("truncated chunk");

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw malformed("fmt chunk too short");
      std::uint16_t tag = detail::read_u16(bytes.data() + body);
      channels = detail::read_u16(bytes.data() + body + 2);
      sample_rate = static_cast<int>(detail::read_u32(bytes.data() + body + 4));
      bits = detail::read_u16(bytes.data() + body + 14);
      if (tag == 0xFFFE) {  // extensible: real format code leads the GUID
        if (chunk_size < 40) throw malformed("extensible fmt chunk too short");
        tag = detail::read_u16(bytes.data() + body + 24);
      }
      if (tag == 3)
        is_float = true;
      else if (tag != 1)
        throw malformed("unsupported format tag " + std::to_string(tag));
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw malformed("no fmt chunk");
  if (data_offset == 0) throw malformed("no data chunk");
  if (channels < 1) throw malformed("zero channels");
  if (sample_rate < 1) throw malformed("zero sample rate");
  if (is_float && bits != 32) throw malformed("float WAV must be 32-bit");
  if (!is_float && bits != 8 && bits != 16 && bits != 24 && bits != 32)
    throw malformed("unsupported bit depth " + std::to_string(bits));

  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) throw data_error("zero-length audio: " + path);

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.resize(frames);
  const unsigned char* p = bytes.data() + data_offset;
  for (std::size_t i = 0; i < frames; ++i)
    out.samples[i] = detail::decode_frame(p + i * frame_bytes, channels, bits, is_float);
  return out;
}

}  // namespace pfnmf
