#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperocc/error.hpp"

namespace hyperocc {

enum class Label : std::uint8_t { Normal = 0, Anomaly = 1, Unknown = 255 };

inline bool is_valid_label(std::uint8_t v) { return v == 0 || v == 1 || v == 255; }

/// Per-sample binary ground-truth masks at image resolution.
struct MaskSet {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> bits;  // n * height * width, each 0 or 1

  std::span<const std::uint8_t> mask(std::size_t i) const {
    const std::size_t px = std::size_t{height} * width;
    return {bits.data() + i * px, px};
  }
  bool operator==(const MaskSet&) const = default;
};

/// Dense float32 features laid out [n, C, H, W] row-major.
struct FeatureSet {
  std::uint64_t n_samples = 0;
  std::uint32_t channels = 0;
  std::uint32_t height = 1;
  std::uint32_t width = 1;
  std::vector<float> data;
  std::vector<std::uint8_t> labels;  // one per sample
  std::optional<MaskSet> masks;
  std::string meta = "{}";

  std::size_t locations() const { return std::size_t{height} * width; }
  std::size_t sample_size() const { return std::size_t{channels} * locations(); }
  bool is_grid() const { return locations() > 1; }

  std::span<const float> sample(std::size_t i) const {
    return {data.data() + i * sample_size(), sample_size()};
  }
  Label label(std::size_t i) const { return static_cast<Label>(labels[i]); }

  /// Selects samples by index, keeping masks aligned.
  FeatureSet subset(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureSet&) const = default;
};

struct ValidationIssue {
  ErrorCode kind;
  std::string code;  // e.g. "BadLabel(sample=1)"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Reports every invariant violation; never throws.
ValidationReport validate(const FeatureSet& set);

/// Throws Error with the first violation's code when validate() fails.
void require_valid(const FeatureSet& set);

std::vector<std::uint8_t> encode_focc(const FeatureSet& set);
FeatureSet decode_focc(std::span<const std::uint8_t> bytes);

void write_focc(const FeatureSet& set, const std::filesystem::path& path);
FeatureSet read_focc(const std::filesystem::path& path);

/// Size in bytes of the fixed FOCC header (magic through meta_len).
inline constexpr std::size_t kFoccHeaderSize = 33;

/// (normal, anomaly) partition; unknown-labeled samples are dropped.
std::pair<FeatureSet, FeatureSet> split_by_label(const FeatureSet& set);

}  // namespace hyperocc
