#include "hyperocc/feature_store.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "byte_io.hpp"

namespace hyperocc {

namespace {

constexpr char kMagic[4] = {'F', 'O', 'C', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kFlagLabels = 0x1;
constexpr std::uint8_t kFlagMasks = 0x2;

void add(ValidationReport& r, ErrorCode kind, std::string code, std::string message) {
  r.issues.push_back({kind, std::move(code), std::move(message)});
}

}  // namespace

FeatureSet FeatureSet::subset(std::span<const std::size_t> indices) const {
  FeatureSet out;
  out.n_samples = indices.size();
  out.channels = channels;
  out.height = height;
  out.width = width;
  out.meta = meta;
  out.data.reserve(indices.size() * sample_size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto s = sample(i);
    out.data.insert(out.data.end(), s.begin(), s.end());
    out.labels.push_back(labels[i]);
  }
  if (masks) {
    MaskSet m{masks->height, masks->width, {}};
    for (std::size_t i : indices) {
      auto bits = masks->mask(i);
      m.bits.insert(m.bits.end(), bits.begin(), bits.end());
    }
    out.masks = std::move(m);
  }
  return out;
}

ValidationReport validate(const FeatureSet& set) {
  ValidationReport r;
  if (set.n_samples == 0) add(r, ErrorCode::EmptySet, "EmptySet", "set has no samples");
  if (set.channels == 0 || set.height == 0 || set.width == 0) {
    add(r, ErrorCode::InvariantViolation, "ZeroDimension", "channels, height and width must be >= 1");
  }
  const std::uint64_t expected = set.n_samples * set.sample_size();
  if (set.data.size() != expected) {
    add(r, ErrorCode::InvariantViolation, "DataLength",
        "data has " + std::to_string(set.data.size()) + " values, expected " +
            std::to_string(expected));
  }
  for (std::size_t i = 0; i < set.data.size(); ++i) {
    if (!std::isfinite(set.data[i])) {
      add(r, ErrorCode::NonFiniteData, "NonFiniteData(index=" + std::to_string(i) + ")",
          "feature value is NaN or infinite");
      break;
    }
  }
  if (set.labels.size() != set.n_samples) {
    add(r, ErrorCode::InvariantViolation, "LabelCount",
        "have " + std::to_string(set.labels.size()) + " labels for " +
            std::to_string(set.n_samples) + " samples");
  }
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    if (!is_valid_label(set.labels[i])) {
      add(r, ErrorCode::BadLabel, "BadLabel(sample=" + std::to_string(i) + ")",
          "label " + std::to_string(set.labels[i]) + " not in {0, 1, 255}");
    }
  }
  if (set.masks) {
    const auto& m = *set.masks;
    const std::uint64_t want = set.n_samples * std::uint64_t{m.height} * m.width;
    if (m.height == 0 || m.width == 0 || m.bits.size() != want) {
      add(r, ErrorCode::BadMask, "MaskCount", "mask section does not hold one mask per sample");
    }
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
      if (m.bits[i] > 1) {
        add(r, ErrorCode::BadMask, "BadMask(index=" + std::to_string(i) + ")", "mask is not binary");
        break;
      }
    }
  }
  return r;
}

void require_valid(const FeatureSet& set) {
  auto report = validate(set);
  if (!report.ok()) {
    const auto& first = report.issues.front();
    throw Error(first.kind, first.code + ": " + first.message);
  }
}

std::vector<std::uint8_t> encode_focc(const FeatureSet& set) {
  // Empty sets are representable on disk; everything else must hold.
  for (const auto& issue : validate(set).issues) {
    if (issue.kind != ErrorCode::EmptySet) throw Error(issue.kind, issue.code + ": " + issue.message);
  }
  detail::ByteWriter w;
  w.put_raw(std::string_view(kMagic, 4));
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(set.n_samples);
  w.put<std::uint32_t>(set.channels);
  w.put<std::uint32_t>(set.height);
  w.put<std::uint32_t>(set.width);
  std::uint8_t flags = kFlagLabels;
  if (set.masks) flags |= kFlagMasks;
  w.put<std::uint8_t>(flags);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(set.meta.size()));
  w.put_raw(set.meta);
  w.put_array<float>(set.data);
  w.put_array<std::uint8_t>(set.labels);
  if (set.masks) {
    w.put<std::uint32_t>(set.masks->height);
    w.put<std::uint32_t>(set.masks->width);
    w.put_array<std::uint8_t>(set.masks->bits);
  }
  return std::move(w.bytes());
}

FeatureSet decode_focc(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.need(4);
  const std::string magic = r.get_string(4);
  if (magic != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::BadMagic, "expected \"FOCC\", found \"" + magic + "\"");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "FOCC version " + std::to_string(version));
  }
  FeatureSet set;
  set.n_samples = r.get<std::uint64_t>();
  set.channels = r.get<std::uint32_t>();
  set.height = r.get<std::uint32_t>();
  set.width = r.get<std::uint32_t>();
  const auto flags = r.get<std::uint8_t>();
  const auto meta_len = r.get<std::uint32_t>();
  set.meta = r.get_string(meta_len);

  const std::uint64_t count = set.n_samples * set.sample_size();
  // Check the length before allocating so a corrupt header cannot request terabytes.
  if (set.sample_size() != 0 && count / set.sample_size() != set.n_samples) {
    throw Error(ErrorCode::Truncated, "sample count overflows");
  }
  r.need(count * sizeof(float));
  set.data.resize(count);
  r.get_array<float>(set.data);

  if (flags & kFlagLabels) {
    set.labels.resize(set.n_samples);
    r.get_array<std::uint8_t>(set.labels);
    for (std::size_t i = 0; i < set.labels.size(); ++i) {
      if (!is_valid_label(set.labels[i])) {
        throw Error(ErrorCode::BadLabel, "sample " + std::to_string(i) + " has label " +
                                             std::to_string(set.labels[i]));
      }
    }
  } else {
    set.labels.assign(set.n_samples, static_cast<std::uint8_t>(Label::Unknown));
  }

  if (flags & kFlagMasks) {
    MaskSet m;
    m.height = r.get<std::uint32_t>();
    m.width = r.get<std::uint32_t>();
    const std::uint64_t px = set.n_samples * std::uint64_t{m.height} * m.width;
    r.need(px);
    m.bits.resize(px);
    r.get_array<std::uint8_t>(m.bits);
    for (auto b : m.bits) {
      if (b > 1) throw Error(ErrorCode::BadMask, "mask byte outside {0, 1}");
    }
    set.masks = std::move(m);
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::InvariantViolation,
                std::to_string(r.remaining()) + " trailing bytes after FOCC payload");
  }
  return set;
}

void write_focc(const FeatureSet& set, const std::filesystem::path& path) {
  detail::write_file(path, encode_focc(set));
}

FeatureSet read_focc(const std::filesystem::path& path) {
  return decode_focc(detail::read_file(path));
}

std::pair<FeatureSet, FeatureSet> split_by_label(const FeatureSet& set) {
  std::vector<std::size_t> normal, anomaly;
  for (std::size_t i = 0; i < set.n_samples; ++i) {
    if (set.label(i) == Label::Normal) normal.push_back(i);
    else if (set.label(i) == Label::Anomaly) anomaly.push_back(i);
  }
  return {set.subset(normal), set.subset(anomaly)};
}

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace detail

}  // namespace hyperocc
