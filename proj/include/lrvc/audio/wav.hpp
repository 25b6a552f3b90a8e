// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// RIFF/WAVE reader and writer for 16-bit PCM mono.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lrvc/audio/segment.hpp"
#include "lrvc/core/binary_io.hpp"

namespace lrvc {

inline AudioSegment read_wav(std::istream& is) {
  char tag[4];
  is.read(tag, 4);
  if (is.gcount() == 0) throw FormatError("wav: empty file");
  if (is.gcount() != 4 || std::memcmp(tag, "RIFF", 4) != 0) throw FormatError("wav: missing RIFF header");
  io::read_u32(is, "wav RIFF size");
  io::read_exact(is, tag, 4, "wav form type");
  if (std::memcmp(tag, "WAVE", 4) != 0) throw FormatError("wav: form type is not WAVE");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (true) {
    is.read(tag, 4);
    if (is.gcount() != 4) throw FormatError(have_fmt ? "wav: missing data chunk" : "wav: missing fmt chunk");
    const std::uint32_t chunk = io::read_u32(is, "wav chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk < 16) throw FormatError("wav: fmt chunk too short");
      const std::uint16_t format = io::read_u16(is, "wav audio format");
      channels = io::read_u16(is, "wav channel count");
      rate = io::read_u32(is, "wav sample rate");
      io::read_u32(is, "wav byte rate");
      io::read_u16(is, "wav block align");
      bits = io::read_u16(is, "wav bits per sample");
      is.ignore(chunk - 16 + (chunk & 1));
      if (format != 1) throw FormatError("wav: unsupported audio format " + std::to_string(format) + " (PCM only)");
      if (channels != 1) throw FormatError("wav: unsupported channel count " + std::to_string(channels) + " (mono only)");
      if (bits != 16) throw FormatError("wav: unsupported bit depth " + std::to_string(bits) + " (16-bit only)");
      if (rate == 0) throw FormatError("wav: sample rate is zero");
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (chunk % 2) throw FormatError("wav: data size " + std::to_string(chunk) + " not a multiple of the sample size");
      AudioSegment out;
      out.sample_rate = static_cast<int>(rate);
      out.samples.resize(chunk / 2);
      for (float& v : out.samples) {
        const auto raw = static_cast<std::int16_t>(io::read_u16(is, "wav sample data"));
        v = std::max(-1.0f, static_cast<float>(raw) / 32767.0f);
      }
      if (out.samples.empty()) throw FormatError("wav: data chunk holds no samples");
      return out;
    } else {
      is.ignore(chunk + (chunk & 1));
    }
  }
}

inline void write_wav(std::ostream& os, const AudioSegment& s) {
  const auto data_bytes = static_cast<std::uint32_t>(s.samples.size() * 2);
  os.write("RIFF", 4);
  io::write_u32(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  io::write_u32(os, 16);
  io::write_u16(os, 1);
  io::write_u16(os, 1);
  io::write_u32(os, static_cast<std::uint32_t>(s.sample_rate));
  io::write_u32(os, static_cast<std::uint32_t>(s.sample_rate) * 2);
  io::write_u16(os, 2);
  io::write_u16(os, 16);
  os.write("data", 4);
  io::write_u32(os, data_bytes);
  for (float v : s.samples) {
    const float c = std::clamp(v, -1.0f, 1.0f);
    io::write_u16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0f))));
  }
}

inline AudioSegment load_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return read_wav(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void save_wav(const AudioSegment& s, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  write_wav(os, s);
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace lrvc
