#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hyperocc/center.hpp"
#include "hyperocc/model.hpp"

namespace hyperocc {

/// Everything needed to score: projector, center and radius.
/// Adam moments are not persisted; a reloaded model trains from fresh moments.
struct ModelBundle {
  ProjectorModel model;
  Center center;
  double radius = 1e-5;
};

// HOCC v1, little-endian:
//   "HOCC" | version u32 | in_dim u32 | out_dim u32 |
//   center kind u8 | center seed u64 | center norm f64 | center f32[out_dim] |
//   radius f64 | weight f32[out_dim*in_dim] | bias f32[out_dim]
std::vector<std::uint8_t> encode_model(const ModelBundle& bundle);
ModelBundle decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace hyperocc
