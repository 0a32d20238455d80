#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hyperocc/feature_store.hpp"

namespace hyperocc {

enum class CenterKind : std::uint8_t { StandardNormal = 0, Uniform01 = 1, AllOnes = 2, FeatureMean = 3 };

std::string_view to_string(CenterKind kind);
std::optional<CenterKind> parse_center_kind(std::string_view name);

/// Hypersphere center. Never zero; `vector` has L2 norm `norm`.
struct Center {
  std::vector<float> vector;
  CenterKind kind = CenterKind::StandardNormal;
  std::uint64_t seed = 0;
  double norm = 1.0;

  std::size_t dim() const { return vector.size(); }
};

inline constexpr std::uint64_t kDefaultSeed = 1024;

/// Unit-norm center drawn from `kind` (StandardNormal, Uniform01 or AllOnes).
Center make_center(std::size_t dim, CenterKind kind, std::uint64_t seed);

/// Unit-norm mean of every feature vector (all samples, all grid locations).
Center feature_mean_center(const FeatureSet& features);

/// Same direction, L2 norm rescaled to `target_norm`.
Center set_norm(const Center& center, double target_norm);

double l2_norm(const std::vector<float>& v);

}  // namespace hyperocc
