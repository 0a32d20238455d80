#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hyperocc/model.hpp"

namespace hyperocc {

enum class Resolution : std::uint8_t { Feature, Image };

/// Nonnegative per-location anomaly scores, row-major height x width.
struct ScoreMap {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> values;
  Resolution resolution = Resolution::Feature;

  float at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
  float max() const;
};

struct Decision {
  double score = 0.0;
  bool is_anomaly = false;
  double radius = 0.0;
};

/// Hinge score map max(||z_l - c||^2 - R^2, 0) at every location of a [C, H*W] grid.
ScoreMap score_map(const ProjectorModel& model, std::span<const float> grid, std::uint32_t height,
                   std::uint32_t width, std::span<const float> center, double radius);

/// Image-level score. Single vectors: d = ||z - c||. Grids: max of score_map.
double score_sample(const ProjectorModel& model, std::span<const float> sample,
                    std::span<const float> center, double radius = 0.0,
                    std::size_t locations = 1);

/// Anomalous iff d > R (strict).
Decision decide(double d, double radius);

inline constexpr double kDefaultSmoothingSigma = 4.0;

/// Bilinear resize (half-pixel centers, clamped edges) followed by a Gaussian blur
/// with standard deviation `sigma` pixels; sigma = 0 skips the blur.
ScoreMap upsample_smooth(const ScoreMap& map, std::uint32_t out_h, std::uint32_t out_w, double sigma);

/// "SMAP" | h u32 | w u32 | reserved u32 | f32[h*w], little-endian.
std::vector<std::uint8_t> encode_smap(const ScoreMap& map);
ScoreMap decode_smap(std::span<const std::uint8_t> bytes);
void write_smap(const ScoreMap& map, const std::filesystem::path& path);

/// 8-bit binary PGM (P5), min-max normalized. A constant map renders as all zeros.
std::vector<std::uint8_t> encode_pgm(const ScoreMap& map);
void write_pgm(const ScoreMap& map, const std::filesystem::path& path);

}  // namespace hyperocc
