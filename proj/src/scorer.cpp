#include "hyperocc/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "byte_io.hpp"
#include "hyperocc/error.hpp"
#include "hyperocc/kernels.hpp"

namespace hyperocc {

namespace {

// 1-D Gaussian taps truncated at 4 sigma, normalized to sum 1.
std::vector<double> gaussian_taps(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[i + radius] = w;
    sum += w;
  }
  for (auto& w : taps) w /= sum;
  return taps;
}

// Separable blur with replicated borders.
void blur(std::vector<double>& img, std::size_t h, std::size_t w, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const long r = static_cast<long>(taps.size() / 2);
  std::vector<double> tmp(img.size());
  auto clamp = [](long v, long hi) { return std::clamp(v, 0L, hi); };
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long k = -r; k <= r; ++k) {
        acc += taps[k + r] * img[y * w + clamp(static_cast<long>(x) + k, static_cast<long>(w) - 1)];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long k = -r; k <= r; ++k) {
        acc += taps[k + r] * tmp[clamp(static_cast<long>(y) + k, static_cast<long>(h) - 1) * w + x];
      }
      img[y * w + x] = acc;
    }
  }
}

// Source coordinate of output pixel `i` under half-pixel alignment, clamped to the grid.
void source_index(std::size_t i, std::size_t in, std::size_t out, std::size_t& i0, std::size_t& i1,
                  double& frac) {
  double s = (static_cast<double>(i) + 0.5) * static_cast<double>(in) / static_cast<double>(out) - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(in - 1));
  i0 = static_cast<std::size_t>(std::floor(s));
  i1 = std::min(i0 + 1, in - 1);
  frac = s - static_cast<double>(i0);
}

}  // namespace

float ScoreMap::max() const {
  return values.empty() ? 0.0f : *std::max_element(values.begin(), values.end());
}

ScoreMap score_map(const ProjectorModel& model, std::span<const float> grid, std::uint32_t height,
                   std::uint32_t width, std::span<const float> center, double radius) {
  const std::size_t loc = std::size_t{height} * width;
  if (loc == 0 || center.size() != model.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "score map needs a non-empty grid and matching center");
  }
  const auto z = forward_grid(model, grid, loc);
  ScoreMap map{height, width, std::vector<float>(loc), Resolution::Feature};
  std::vector<float> zl(model.out_dim);
  for (std::size_t l = 0; l < loc; ++l) {
    for (std::size_t o = 0; o < model.out_dim; ++o) zl[o] = z[o * loc + l];
    map.values[l] = static_cast<float>(loss(zl, center, radius).value);
  }
  return map;
}

double score_sample(const ProjectorModel& model, std::span<const float> sample,
                    std::span<const float> center, double radius, std::size_t locations) {
  if (center.size() != model.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "center dimension differs from projector output");
  }
  if (locations <= 1) {
    const auto z = forward(model, sample);
    return std::sqrt(static_cast<double>(
        kernels::active().squared_distance(z.data(), center.data(), z.size())));
  }
  return score_map(model, sample, static_cast<std::uint32_t>(locations), 1, center, radius).max();
}

Decision decide(double d, double radius) { return {d, d > radius, radius}; }

ScoreMap upsample_smooth(const ScoreMap& map, std::uint32_t out_h, std::uint32_t out_w, double sigma) {
  if (out_h == 0 || out_w == 0) throw Error(ErrorCode::Config, "output dimensions must be >= 1");
  if (map.height == 0 || map.width == 0) throw Error(ErrorCode::Config, "input map is empty");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::Config, "sigma must be >= 0");

  std::vector<double> img(std::size_t{out_h} * out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    std::size_t y0, y1;
    double fy;
    source_index(y, map.height, out_h, y0, y1, fy);
    for (std::size_t x = 0; x < out_w; ++x) {
      std::size_t x0, x1;
      double fx;
      source_index(x, map.width, out_w, x0, x1, fx);
      const double top = (1.0 - fx) * map.at(y0, x0) + fx * map.at(y0, x1);
      const double bottom = (1.0 - fx) * map.at(y1, x0) + fx * map.at(y1, x1);
      img[y * out_w + x] = (1.0 - fy) * top + fy * bottom;
    }
  }
  if (sigma > 0.0) blur(img, out_h, out_w, sigma);

  ScoreMap out{out_h, out_w, std::vector<float>(img.size()), Resolution::Image};
  for (std::size_t i = 0; i < img.size(); ++i) out.values[i] = static_cast<float>(std::max(0.0, img[i]));
  return out;
}

std::vector<std::uint8_t> encode_smap(const ScoreMap& map) {
  detail::ByteWriter w;
  w.put_raw("SMAP");
  w.put<std::uint32_t>(map.height);
  w.put<std::uint32_t>(map.width);
  w.put<std::uint32_t>(0);
  w.put_array<float>(map.values);
  return std::move(w.bytes());
}

ScoreMap decode_smap(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const std::string magic = r.get_string(4);
  if (magic != "SMAP") throw Error(ErrorCode::BadMagic, "expected \"SMAP\", found \"" + magic + "\"");
  ScoreMap map;
  map.height = r.get<std::uint32_t>();
  map.width = r.get<std::uint32_t>();
  r.get<std::uint32_t>();
  map.values.resize(std::size_t{map.height} * map.width);
  r.get_array<float>(map.values);
  return map;
}

void write_smap(const ScoreMap& map, const std::filesystem::path& path) {
  detail::write_file(path, encode_smap(map));
}

std::vector<std::uint8_t> encode_pgm(const ScoreMap& map) {
  const std::string header =
      "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  const double lo = map.values.empty() ? 0.0 : *lo_it;
  const double range = map.values.empty() ? 0.0 : *hi_it - lo;
  for (float v : map.values) {
    const double unit = range > 0.0 ? (v - lo) / range : 0.0;
    out.push_back(static_cast<std::uint8_t>(std::lround(unit * 255.0)));
  }
  return out;
}

void write_pgm(const ScoreMap& map, const std::filesystem::path& path) {
  detail::write_file(path, encode_pgm(map));
}

}  // namespace hyperocc
