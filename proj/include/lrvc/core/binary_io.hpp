// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Little-endian primitives shared by the WAV, RVF1 and RVCK readers/writers.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "lrvc/core/errors.hpp"

namespace lrvc::io {

inline void write_u16(std::ostream& os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f32(std::ostream& os, float v) { write_u32(os, std::bit_cast<std::uint32_t>(v)); }

inline void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void read_exact(std::istream& is, void* dst, std::size_t n, const char* what) {
  is.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw FormatError(std::string("truncated input while reading ") + what);
}

inline std::uint16_t read_u16(std::istream& is, const char* what) {
  unsigned char b[2];
  read_exact(is, b, 2, what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t read_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  read_exact(is, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline std::uint64_t read_u64(std::istream& is, const char* what) {
  unsigned char b[8];
  read_exact(is, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline float read_f32(std::istream& is, const char* what) { return std::bit_cast<float>(read_u32(is, what)); }

inline std::string read_string(std::istream& is, const char* what, std::size_t max_len = 1u << 24) {
  const std::uint32_t n = read_u32(is, what);
  if (n > max_len) throw FormatError(std::string("implausible string length while reading ") + what);
  std::string s(n, '\0');
  read_exact(is, s.data(), n, what);
  return s;
}

/// Bulk float payload; byte-swaps only on big-endian hosts.
inline void write_f32_array(std::ostream& os, const float* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(float)));
  } else {
    for (std::size_t i = 0; i < n; ++i) write_f32(os, data[i]);
  }
}

inline void read_f32_array(std::istream& is, float* data, std::size_t n, const char* what) {
  if constexpr (std::endian::native == std::endian::little) {
    read_exact(is, data, n * sizeof(float), what);
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = read_f32(is, what);
  }
}

}  // namespace lrvc::io
