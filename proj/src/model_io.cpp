#include "hyperocc/model_io.hpp"

#include <string>

#include "byte_io.hpp"
#include "hyperocc/error.hpp"

namespace hyperocc {

namespace {
constexpr std::string_view kMagic = "HOCC";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_model(const ModelBundle& b) {
  const auto& m = b.model;
  if (m.weight.size() != m.in_dim * m.out_dim || m.bias.size() != m.out_dim ||
      b.center.vector.size() != m.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "model bundle has inconsistent shapes");
  }
  detail::ByteWriter w;
  w.put_raw(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.in_dim));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.out_dim));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(b.center.kind));
  w.put<std::uint64_t>(b.center.seed);
  w.put<double>(b.center.norm);
  w.put_array<float>(b.center.vector);
  w.put<double>(b.radius);
  w.put_array<float>(m.weight);
  w.put_array<float>(m.bias);
  return std::move(w.bytes());
}

ModelBundle decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const std::string magic = r.get_string(4);
  if (magic != kMagic) throw Error(ErrorCode::BadMagic, "expected \"HOCC\", found \"" + magic + "\"");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "HOCC version " + std::to_string(version));
  }
  ModelBundle b;
  const auto in_dim = r.get<std::uint32_t>();
  const auto out_dim = r.get<std::uint32_t>();
  if (in_dim == 0 || out_dim == 0) throw Error(ErrorCode::InvariantViolation, "zero projector dimension");
  const auto kind = r.get<std::uint8_t>();
  if (kind > static_cast<std::uint8_t>(CenterKind::FeatureMean)) {
    throw Error(ErrorCode::InvariantViolation, "unknown center kind " + std::to_string(kind));
  }
  b.center.kind = static_cast<CenterKind>(kind);
  b.center.seed = r.get<std::uint64_t>();
  b.center.norm = r.get<double>();
  b.center.vector.resize(out_dim);
  r.get_array<float>(b.center.vector);
  b.radius = r.get<double>();
  b.model = init_projector(in_dim, out_dim, 0);
  r.get_array<float>(b.model.weight);
  r.get_array<float>(b.model.bias);
  if (r.remaining() != 0) throw Error(ErrorCode::InvariantViolation, "trailing bytes after HOCC payload");
  return b;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path, encode_model(bundle));
}

ModelBundle load_model(const std::filesystem::path& path) {
  return decode_model(detail::read_file(path));
}

}  // namespace hyperocc
