// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0
//
// RVCK checkpoint container, little-endian:
//   "RVCK" | u32 version | u64 config hash | u64 step | string metadata (JSON)
//   u32 count | count x (string name | u32 rank | u32 dims... | f32 payload)
//   u32 has_optimizer | [u64 adam steps | per parameter: f32 m | f32 v]
// Strings are u32 length + bytes.

#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrvc/compute/adam.hpp"
#include "lrvc/core/binary_io.hpp"
#include "lrvc/model/model.hpp"

namespace lrvc {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor<float> value;
};

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::uint64_t step = 0;
  ModelConfig model;
  /// Free-form JSON; always carries "model" and usually "content_encoder".
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<NamedTensor> params;
  bool has_optimizer = false;
  std::uint64_t adam_steps = 0;
  std::vector<Tensor<float>> first, second;
};

/// Snapshot of model parameters (and optimizer state when given).
inline Checkpoint capture_checkpoint(Model<float>& model, const Adam<float>* adam, std::uint64_t step,
                                     nlohmann::json metadata = nlohmann::json::object()) {
  Checkpoint c;
  c.model = model.config();
  c.config_hash = config_hash(c.model);
  c.step = step;
  c.metadata = std::move(metadata);
  c.metadata["model"] = model_config_json(c.model);
  for (auto* p : model.parameters()) c.params.push_back({p->name, p->value});
  if (adam) {
    c.has_optimizer = true;
    c.adam_steps = adam->steps();
    c.first = adam->first_moments();
    c.second = adam->second_moments();
  }
  return c;
}

namespace detail {

inline void write_tensor(std::ostream& os, const Tensor<float>& t) {
  io::write_u32(os, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) io::write_u32(os, static_cast<std::uint32_t>(d));
  io::write_f32_array(os, t.data(), t.size());
}

inline Tensor<float> read_tensor(std::istream& is, const char* what) {
  const std::uint32_t rank = io::read_u32(is, what);
  if (rank == 0 || rank > 4) throw FormatError(std::string("checkpoint: bad rank ") + std::to_string(rank) + " in " + what);
  Shape shape;
  for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(io::read_u32(is, what));
  if (shape_numel(shape) > (1u << 28)) throw FormatError(std::string("checkpoint: implausible size in ") + what);
  Tensor<float> t(shape);
  io::read_f32_array(is, t.data(), t.size(), what);
  return t;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& c) {
  os.write("RVCK", 4);
  io::write_u32(os, kCheckpointVersion);
  io::write_u64(os, c.config_hash);
  io::write_u64(os, c.step);
  io::write_string(os, c.metadata.dump());
  io::write_u32(os, static_cast<std::uint32_t>(c.params.size()));
  for (const auto& p : c.params) {
    io::write_string(os, p.name);
    detail::write_tensor(os, p.value);
  }
  io::write_u32(os, c.has_optimizer ? 1 : 0);
  if (c.has_optimizer) {
    io::write_u64(os, c.adam_steps);
    for (std::size_t i = 0; i < c.params.size(); ++i) {
      io::write_f32_array(os, c.first.at(i).data(), c.first.at(i).size());
      io::write_f32_array(os, c.second.at(i).data(), c.second.at(i).size());
    }
  }
}

inline Checkpoint read_checkpoint(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, "RVCK", 4) != 0) throw FormatError("checkpoint: bad magic (expected RVCK)");
  const std::uint32_t version = io::read_u32(is, "checkpoint version");
  if (version != kCheckpointVersion)
    throw IncompatibleError("checkpoint: format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
  Checkpoint c;
  c.config_hash = io::read_u64(is, "checkpoint config hash");
  c.step = io::read_u64(is, "checkpoint step");
  try {
    c.metadata = nlohmann::json::parse(io::read_string(is, "checkpoint metadata"));
    apply_model_config_json(c.metadata.at("model"), c.model);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad metadata: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("checkpoint: bad model config: ") + e.what());
  }
  if (config_hash(c.model) != c.config_hash) throw FormatError("checkpoint: stored config does not match its hash");
  const std::uint32_t count = io::read_u32(is, "checkpoint parameter count");
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = io::read_string(is, "checkpoint parameter name", 4096);
    Tensor<float> value = detail::read_tensor(is, "checkpoint parameter");
    c.params.push_back({std::move(name), std::move(value)});
  }
  c.has_optimizer = io::read_u32(is, "checkpoint optimizer flag") != 0;
  if (c.has_optimizer) {
    c.adam_steps = io::read_u64(is, "checkpoint optimizer steps");
    for (const auto& p : c.params) {
      c.first.emplace_back(p.value.shape());
      c.second.emplace_back(p.value.shape());
      io::read_f32_array(is, c.first.back().data(), p.value.size(), "checkpoint optimizer moments");
      io::read_f32_array(is, c.second.back().data(), p.value.size(), "checkpoint optimizer moments");
    }
  }
  return c;
}

inline void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  // Write to a sibling file and rename so a crash never leaves half a checkpoint.
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write checkpoint '" + tmp.string() + "'");
    write_checkpoint(os, c);
    if (!os) throw IoError("write failed for checkpoint '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint to '" + path.string() + "': " + ec.message());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint '" + path.string() + "'");
  try {
    return read_checkpoint(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const IncompatibleError& e) {
    throw IncompatibleError(path.string() + ": " + e.what());
  }
}

/// Raises IncompatibleError when the checkpoint was written for another
/// architecture, unless `force` is set.
inline void require_compatible(const Checkpoint& c, const ModelConfig& expected, bool force) {
  if (c.model.num_speakers != expected.num_speakers)
    throw IncompatibleError("checkpoint has K=" + std::to_string(c.model.num_speakers) + " speakers, model expects K=" +
                            std::to_string(expected.num_speakers));
  if (!force && c.config_hash != config_hash(expected))
    throw IncompatibleError("checkpoint config hash " + std::to_string(c.config_hash) + " differs from " +
                            std::to_string(config_hash(expected)) + " (architecture changed; pass force to override)");
}

/// Copies parameters into `model`. Names and shapes must match exactly.
inline void restore_model(const Checkpoint& c, Model<float>& model) {
  auto params = model.parameters();
  if (params.size() != c.params.size())
    throw IncompatibleError("checkpoint holds " + std::to_string(c.params.size()) + " tensors, model has " +
                            std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& src = c.params[i];
    if (src.name != params[i]->name)
      throw IncompatibleError("checkpoint tensor '" + src.name + "' where model expects '" + params[i]->name + "'");
    if (src.value.shape() != params[i]->value.shape())
      throw IncompatibleError("checkpoint tensor '" + src.name + "' has shape " + shape_str(src.value.shape()) +
                              ", model expects " + shape_str(params[i]->value.shape()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = c.params[i].value;
}

inline void restore_optimizer(const Checkpoint& c, Adam<float>& adam) {
  if (!c.has_optimizer) throw IncompatibleError("checkpoint carries no optimizer state; cannot resume training");
  if (adam.first_moments().size() != c.first.size())
    throw IncompatibleError("checkpoint optimizer state does not match the parameter list");
  adam.first_moments() = c.first;
  adam.second_moments() = c.second;
  adam.set_steps(c.adam_steps);
}

}  // namespace lrvc
