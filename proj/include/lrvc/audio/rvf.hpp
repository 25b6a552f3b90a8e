// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// RVF1 feature container:
//   bytes 0..3   magic "RVF1"
//   u32          rank (always 2)
//   u32 x rank   dims, frames first
//   f32 x prod   row-major payload
// All integers and floats little-endian.

#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "lrvc/compute/tensor.hpp"
#include "lrvc/core/binary_io.hpp"

namespace lrvc {

inline void write_rvf(std::ostream& os, const Tensor<float>& t) {
  if (t.rank() != 2) throw ShapeError("rvf: only [frames x dims] matrices are stored, got " + shape_str(t.shape()));
  os.write("RVF1", 4);
  io::write_u32(os, 2);
  io::write_u32(os, static_cast<std::uint32_t>(t.dim(0)));
  io::write_u32(os, static_cast<std::uint32_t>(t.dim(1)));
  io::write_f32_array(os, t.data(), t.size());
}

/// Reads an RVF1 matrix. When `expected_dims` is set the trailing dimension
/// must match it.
inline Tensor<float> read_rvf(std::istream& is, std::optional<std::size_t> expected_dims = std::nullopt) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, "RVF1", 4) != 0) throw FormatError("rvf: bad magic (expected RVF1)");
  const std::uint32_t rank = io::read_u32(is, "rvf rank");
  if (rank != 2) throw FormatError("rvf: rank " + std::to_string(rank) + " unsupported (expected 2)");
  const std::size_t frames = io::read_u32(is, "rvf frames");
  const std::size_t dims = io::read_u32(is, "rvf dims");
  if (expected_dims && dims != *expected_dims)
    throw FormatError("rvf: feature dimension " + std::to_string(dims) + " does not match expected " +
                      std::to_string(*expected_dims));
  if (frames == 0 || dims == 0) throw FormatError("rvf: empty matrix");
  Tensor<float> t({frames, dims});
  io::read_f32_array(is, t.data(), t.size(), "rvf payload");
  return t;
}

inline void save_rvf(const Tensor<float>& t, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  write_rvf(os, t);
  if (!os) throw IoError("write failed: " + path.string());
}

inline Tensor<float> load_rvf(const std::filesystem::path& path, std::optional<std::size_t> expected_dims = std::nullopt) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return read_rvf(is, expected_dims);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace lrvc
