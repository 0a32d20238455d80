#include "hyperocc/center.hpp"

#include <cmath>
#include <string>

#include "hyperocc/error.hpp"
#include "hyperocc/rng.hpp"

namespace hyperocc {

namespace {

std::vector<float> normalized(const std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::ZeroCenter, "center vector has zero norm");
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  return out;
}

}  // namespace

std::string_view to_string(CenterKind kind) {
  switch (kind) {
    case CenterKind::StandardNormal: return "normal";
    case CenterKind::Uniform01: return "uniform";
    case CenterKind::AllOnes: return "ones";
    case CenterKind::FeatureMean: return "feature-mean";
  }
  return "unknown";
}

std::optional<CenterKind> parse_center_kind(std::string_view name) {
  for (auto k : {CenterKind::StandardNormal, CenterKind::Uniform01, CenterKind::AllOnes,
                 CenterKind::FeatureMean}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

double l2_norm(const std::vector<float>& v) {
  double sq = 0.0;
  for (float x : v) sq += double{x} * x;
  return std::sqrt(sq);
}

Center make_center(std::size_t dim, CenterKind kind, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::Config, "center dimension must be >= 1");
  std::vector<double> raw(dim);
  Rng rng(seed, Stream::Center);
  switch (kind) {
    case CenterKind::StandardNormal:
      for (auto& x : raw) x = rng.normal();
      break;
    case CenterKind::Uniform01:
      for (auto& x : raw) x = rng.uniform01_open_low();
      break;
    case CenterKind::AllOnes:
      for (auto& x : raw) x = 1.0;
      break;
    case CenterKind::FeatureMean:
      throw Error(ErrorCode::Config, "feature-mean centers are built with feature_mean_center()");
  }
  return Center{normalized(raw), kind, seed, 1.0};
}

Center feature_mean_center(const FeatureSet& features) {
  if (features.n_samples == 0) throw Error(ErrorCode::EmptySet, "feature-mean center needs samples");
  const std::size_t c = features.channels;
  const std::size_t loc = features.locations();
  std::vector<double> sum(c, 0.0);
  for (std::size_t i = 0; i < features.n_samples; ++i) {
    auto s = features.sample(i);
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t l = 0; l < loc; ++l) sum[ch] += s[ch * loc + l];
    }
  }
  const double count = static_cast<double>(features.n_samples * loc);
  for (auto& x : sum) x /= count;
  return Center{normalized(sum), CenterKind::FeatureMean, 0, 1.0};
}

Center set_norm(const Center& center, double target_norm) {
  if (!(target_norm > 0.0) || !std::isfinite(target_norm)) {
    throw Error(ErrorCode::ZeroCenter, "center norm must be positive and finite, got " +
                                           std::to_string(target_norm));
  }
  const double current = l2_norm(center.vector);
  if (!(current > 0.0)) throw Error(ErrorCode::ZeroCenter, "center vector has zero norm");
  Center out = center;
  if (target_norm != center.norm) {
    const double scale = target_norm / current;
    for (auto& x : out.vector) x = static_cast<float>(x * scale);
  }
  out.norm = target_norm;
  return out;
}

}  // namespace hyperocc
