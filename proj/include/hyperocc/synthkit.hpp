#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperocc/feature_store.hpp"

namespace hyperocc {

/// Two-cluster synthetic feature task: normals around 10 * u_n, anomalies
/// around 10 * u_a, with <u_n, u_a> = cos_target exactly.
struct SynthSpec {
  std::size_t dim = 64;
  std::size_t n_train_normal = 512;
  std::size_t n_test_normal = 128;
  std::size_t n_test_anomaly = 128;
  double cos_target = 0.2;
  double within_noise = 0.5;  // isotropic per-component std
  std::uint64_t seed = 1024;
};

inline constexpr double kClusterRadius = 10.0;

struct SynthTask {
  FeatureSet train;  // normals only, label 0
  FeatureSet test;   // n_test_normal normals then n_test_anomaly anomalies
  std::vector<double> normal_direction;
  std::vector<double> anomaly_direction;
};

SynthTask gen_clusters(const SynthSpec& spec);

/// Named presets: "LOWSIM" (cos 0.2) and "HIGHSIM" (cos 0.6).
std::vector<std::pair<std::string, SynthSpec>> reference_tasks();
std::optional<SynthSpec> find_preset(std::string_view name);

}  // namespace hyperocc
