#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "../oracles.hpp"
#include "hyperocc/error.hpp"
#include "hyperocc/feature_store.hpp"

using namespace hyperocc;

namespace {

FeatureSet small_set() {
  FeatureSet s;
  s.n_samples = 2;
  s.channels = 3;
  s.data = {1, 2, 3, 4, 5, 6};
  s.labels = {0, 1};
  return s;
}

ErrorCode decode_error(std::vector<std::uint8_t> bytes) {
  try {
    decode_focc(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode succeeded");
  return ErrorCode::Config;
}

std::filesystem::path data_dir() { return HYPEROCC_TEST_DATA_DIR; }

}  // namespace

TEST_CASE("small set round-trips; payload after the header is meta + data + labels") {
  const FeatureSet s = small_set();
  const auto bytes = encode_focc(s);
  // 2 meta bytes + 6 floats + 2 labels.
  CHECK(bytes.size() - kFoccHeaderSize == 2 + 6 * 4 + 2);
  CHECK(bytes.size() == 61);
  CHECK(decode_focc(bytes) == s);

  const auto dir = oracle::temp_dir("fs_roundtrip");
  write_focc(s, dir / "s.focc");
  CHECK(read_focc(dir / "s.focc") == s);
}

TEST_CASE("file size follows the layout for a large grid sample") {
  FeatureSet s;
  s.n_samples = 1;
  s.channels = 1792;
  s.height = s.width = 56;
  s.data.assign(std::size_t{1792} * 56 * 56, 0.25f);
  s.labels = {0};
  CHECK(encode_focc(s).size() == kFoccHeaderSize + 2 + std::size_t{1792} * 56 * 56 * 4 + 1);
}

TEST_CASE("writing refuses invariant violations") {
  FeatureSet s = small_set();
  s.data[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(encode_focc(s), Error);
  try {
    encode_focc(s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteData);
  }
  const auto dir = oracle::temp_dir("fs_refuse");
  CHECK_THROWS(write_focc(s, dir / "bad.focc"));
  CHECK_FALSE(std::filesystem::exists(dir / "bad.focc"));
}

TEST_CASE("decoder distinguishes corruption kinds") {
  auto bytes = encode_focc(small_set());

  auto magic = bytes;
  magic[0] = 'X';
  CHECK(decode_error(magic) == ErrorCode::BadMagic);

  auto version = bytes;
  version[4] = 2;
  CHECK(decode_error(version) == ErrorCode::UnsupportedVersion);

  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, kFoccHeaderSize + 5, bytes.size() - 1}) {
    CAPTURE(cut);
    CHECK(decode_error({bytes.begin(), bytes.begin() + cut}) == ErrorCode::Truncated);
  }

  auto label = bytes;
  label.back() = 7;
  CHECK(decode_error(label) == ErrorCode::BadLabel);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(decode_error(trailing) == ErrorCode::InvariantViolation);

  CHECK(decode_error({}) == ErrorCode::Truncated);
}

TEST_CASE("bad mask byte is rejected") {
  FeatureSet s = small_set();
  s.masks = MaskSet{1, 2, {0, 1, 1, 0}};
  auto bytes = encode_focc(s);
  bytes.back() = 2;
  CHECK(decode_error(bytes) == ErrorCode::BadMask);
}

TEST_CASE("missing label section decodes as unknown") {
  auto bytes = encode_focc(small_set());
  bytes[28] = 0;  // flags byte: no labels
  bytes.resize(bytes.size() - 2);
  const FeatureSet s = decode_focc(bytes);
  CHECK(s.labels == std::vector<std::uint8_t>{255, 255});
}

TEST_CASE("golden files written by an independent encoder parse identically") {
  const FeatureSet v = read_focc(data_dir() / "golden_vector.focc");
  CHECK(v == small_set());

  const FeatureSet g = read_focc(data_dir() / "golden_grid.focc");
  CHECK(g.n_samples == 1);
  CHECK(g.channels == 2);
  CHECK(g.height == 1);
  CHECK(g.width == 2);
  CHECK(g.data == std::vector<float>{0.5f, -1.25f, 3.0f, 1e-7f});
  CHECK(g.labels == std::vector<std::uint8_t>{1});
  CHECK(g.meta == "{\"src\":\"golden\"}");
  REQUIRE(g.masks);
  CHECK(g.masks->height == 2);
  CHECK(g.masks->bits == std::vector<std::uint8_t>{0, 1, 1, 0});

  // Re-encoding reproduces the golden bytes exactly.
  CHECK(encode_focc(g) == oracle::file_bytes(data_dir() / "golden_grid.focc"));
}

TEST_CASE("validate reports issues without throwing") {
  CHECK(validate(small_set()).ok());

  FeatureSet bad = small_set();
  bad.labels = {0, 7};
  const auto r = validate(bad);
  CHECK_FALSE(r.ok());
  REQUIRE(r.issues.size() == 1);
  CHECK(r.issues[0].code == "BadLabel(sample=1)");
  CHECK(r.issues[0].kind == ErrorCode::BadLabel);

  FeatureSet empty;
  empty.channels = 3;
  const auto e = validate(empty);
  REQUIRE(e.issues.size() == 1);
  CHECK(e.issues[0].kind == ErrorCode::EmptySet);

  FeatureSet wrong_len = small_set();
  wrong_len.data.pop_back();
  CHECK(validate(wrong_len).issues[0].kind == ErrorCode::InvariantViolation);
}

TEST_CASE("split by label") {
  FeatureSet s;
  s.n_samples = 3;
  s.channels = 1;
  s.data = {10, 11, 12};
  s.labels = {0, 1, 0};
  auto [n, a] = split_by_label(s);
  CHECK(n.data == std::vector<float>{10, 12});
  CHECK(a.data == std::vector<float>{11});

  s.labels = {0, 0, 0};
  CHECK(split_by_label(s).second.n_samples == 0);

  FeatureSet u;
  u.n_samples = 2;
  u.channels = 1;
  u.data = {1, 2};
  u.labels = {255, 0};
  auto [un, ua] = split_by_label(u);
  CHECK(un.data == std::vector<float>{2});
  CHECK(ua.n_samples == 0);
}

TEST_CASE("random sets round-trip bitwise, with and without masks") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 40; ++i) {
    const FeatureSet s = oracle::random_set(gen, i % 2 == 0);
    REQUIRE(validate(s).ok());
    const FeatureSet back = decode_focc(encode_focc(s));
    CHECK(back == s);
    CHECK(std::memcmp(back.data.data(), s.data.data(), s.data.size() * sizeof(float)) == 0);
  }
}

TEST_CASE("subset keeps masks aligned") {
  std::mt19937_64 gen(5);
  FeatureSet s = oracle::random_set(gen, true);
  while (s.n_samples < 3) s = oracle::random_set(gen, true);
  const std::size_t idx[] = {2, 0};
  const FeatureSet sub = s.subset(idx);
  CHECK(sub.n_samples == 2);
  CHECK(std::equal(sub.sample(0).begin(), sub.sample(0).end(), s.sample(2).begin()));
  CHECK(std::equal(sub.masks->mask(1).begin(), sub.masks->mask(1).end(), s.masks->mask(0).begin()));
}
