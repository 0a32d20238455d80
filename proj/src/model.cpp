#include "hyperocc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyperocc/error.hpp"
#include "hyperocc/kernels.hpp"
#include "hyperocc/rng.hpp"

namespace hyperocc {

namespace {

void check_dims(const ProjectorModel& model, std::size_t sample_size, std::size_t locations,
                std::size_t center_size) {
  if (locations == 0 || sample_size != model.in_dim * locations) {
    throw Error(ErrorCode::DimensionMismatch,
                "sample has " + std::to_string(sample_size) + " values, projector expects " +
                    std::to_string(model.in_dim) + " x " + std::to_string(locations));
  }
  if (center_size != model.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "center has dimension " + std::to_string(center_size) +
                                                  ", projector outputs " +
                                                  std::to_string(model.out_dim));
  }
}

bool all_finite(std::span<const float> v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

// Copies location `l` of a [C, locations] grid into a contiguous C-vector.
void gather_location(std::span<const float> grid, std::size_t channels, std::size_t locations,
                     std::size_t l, float* out) {
  for (std::size_t ch = 0; ch < channels; ++ch) out[ch] = grid[ch * locations + l];
}

// Float64 reference path for the gradient check.
struct DoubleParams {
  std::vector<double> weight, bias;
};

double hinge_loss_f64(const DoubleParams& p, std::size_t in_dim, std::size_t out_dim,
                      const std::vector<double>& sample, std::size_t locations,
                      const std::vector<double>& center, double radius,
                      double* min_margin = nullptr) {
  double total = 0.0;
  for (std::size_t l = 0; l < locations; ++l) {
    double sq = 0.0;
    for (std::size_t o = 0; o < out_dim; ++o) {
      double z = p.bias[o];
      for (std::size_t i = 0; i < in_dim; ++i) z += p.weight[o * in_dim + i] * sample[i * locations + l];
      const double d = z - center[o];
      sq += d * d;
    }
    const double margin = sq - radius * radius;
    if (min_margin) *min_margin = std::min(*min_margin, std::abs(margin));
    total += margin > 0.0 ? margin : 0.0;
  }
  return total / static_cast<double>(locations);
}

DoubleParams hinge_grad_f64(const DoubleParams& p, std::size_t in_dim, std::size_t out_dim,
                            const std::vector<double>& sample, std::size_t locations,
                            const std::vector<double>& center, double radius) {
  DoubleParams g{std::vector<double>(p.weight.size(), 0.0), std::vector<double>(p.bias.size(), 0.0)};
  std::vector<double> z(out_dim);
  for (std::size_t l = 0; l < locations; ++l) {
    double sq = 0.0;
    for (std::size_t o = 0; o < out_dim; ++o) {
      z[o] = p.bias[o];
      for (std::size_t i = 0; i < in_dim; ++i) z[o] += p.weight[o * in_dim + i] * sample[i * locations + l];
      const double d = z[o] - center[o];
      sq += d * d;
    }
    if (sq - radius * radius <= 0.0) continue;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double dz = 2.0 * (z[o] - center[o]) / static_cast<double>(locations);
      g.bias[o] += dz;
      for (std::size_t i = 0; i < in_dim; ++i) g.weight[o * in_dim + i] += dz * sample[i * locations + l];
    }
  }
  return g;
}

}  // namespace

ProjectorModel init_projector(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
  if (in_dim == 0 || out_dim == 0) throw Error(ErrorCode::Config, "projector dimensions must be >= 1");
  ProjectorModel m;
  m.in_dim = in_dim;
  m.out_dim = out_dim;
  m.weight.resize(in_dim * out_dim);
  m.bias.assign(out_dim, 0.0f);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  Rng rng(seed, Stream::ProjectorInit);
  for (auto& w : m.weight) w = static_cast<float>(rng.uniform(-bound, bound));
  m.adam.m_weight.assign(m.weight.size(), 0.0f);
  m.adam.v_weight.assign(m.weight.size(), 0.0f);
  m.adam.m_bias.assign(out_dim, 0.0f);
  m.adam.v_bias.assign(out_dim, 0.0f);
  return m;
}

void forward_into(const ProjectorModel& model, std::span<const float> f, std::span<float> z) {
  if (f.size() != model.in_dim || z.size() != model.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(f.size()) +
                                                  " features, projector expects " +
                                                  std::to_string(model.in_dim));
  }
  kernels::active().matvec_bias(model.weight.data(), f.data(), model.bias.data(), z.data(),
                                model.out_dim, model.in_dim);
}

std::vector<float> forward(const ProjectorModel& model, std::span<const float> f) {
  std::vector<float> z(model.out_dim);
  forward_into(model, f, z);
  return z;
}

std::vector<float> forward_grid(const ProjectorModel& model, std::span<const float> grid,
                                std::size_t locations) {
  if (locations == 0 || grid.size() != model.in_dim * locations) {
    throw Error(ErrorCode::DimensionMismatch, "grid does not have in_dim channels");
  }
  if (locations == 1) return forward(model, grid);
  std::vector<float> out(model.out_dim * locations);
  std::vector<float> f(model.in_dim), z(model.out_dim);
  for (std::size_t l = 0; l < locations; ++l) {
    gather_location(grid, model.in_dim, locations, l, f.data());
    forward_into(model, f, z);
    for (std::size_t o = 0; o < model.out_dim; ++o) out[o * locations + l] = z[o];
  }
  return out;
}

LossValue loss(std::span<const float> z, std::span<const float> center, double radius) {
  if (z.size() != center.size()) throw Error(ErrorCode::DimensionMismatch, "z and center differ in length");
  const double sq = kernels::active().squared_distance(z.data(), center.data(), z.size());
  if (!std::isfinite(sq)) throw Error(ErrorCode::NonFiniteLoss, "squared distance is not finite");
  const double margin = sq - radius * radius;
  return margin > 0.0 ? LossValue{margin, true} : LossValue{0.0, false};
}

LossValue loss_grid(std::span<const float> z_grid, std::span<const float> center, double radius,
                    std::size_t locations) {
  const std::size_t dim = center.size();
  if (locations == 0 || z_grid.size() != dim * locations) {
    throw Error(ErrorCode::DimensionMismatch, "projected grid does not match center dimension");
  }
  if (locations == 1) return loss(z_grid, center, radius);
  std::vector<float> z(dim);
  double total = 0.0;
  for (std::size_t l = 0; l < locations; ++l) {
    gather_location(z_grid, dim, locations, l, z.data());
    total += loss(z, center, radius).value;
  }
  const double mean = total / static_cast<double>(locations);
  return {mean, mean > 0.0};
}

LossValue accumulate_loss_grad(const ProjectorModel& model, std::span<const float> sample,
                               std::size_t locations, std::span<const float> center,
                               double radius, float scale, Gradients& acc,
                               std::span<float> z_out) {
  check_dims(model, sample.size(), locations, center.size());
  const auto& k = kernels::active();
  const std::size_t in = model.in_dim, out = model.out_dim;
  std::vector<float> f_buf(locations > 1 ? in : 0);
  std::vector<float> z(out), diff(out);
  // d/dz of mean_l max(||z_l - c||^2 - R^2, 0) is 2 (z_l - c) / locations when active.
  const float alpha = 2.0f * scale / static_cast<float>(locations);
  double total = 0.0;
  for (std::size_t l = 0; l < locations; ++l) {
    const float* f = sample.data();
    if (locations > 1) {
      gather_location(sample, in, locations, l, f_buf.data());
      f = f_buf.data();
    }
    k.matvec_bias(model.weight.data(), f, model.bias.data(), z.data(), out, in);
    if (!z_out.empty()) {
      for (std::size_t o = 0; o < out; ++o) z_out[o * locations + l] = z[o];
    }
    const LossValue lv = loss(z, center, radius);
    if (!lv.active) continue;
    total += lv.value;
    for (std::size_t o = 0; o < out; ++o) diff[o] = z[o] - center[o];
    k.rank1_update(acc.weight.data(), diff.data(), f, alpha, out, in);
    k.axpy(alpha, diff.data(), acc.bias.data(), out);
  }
  const double mean = total / static_cast<double>(locations);
  return {mean, mean > 0.0};
}

SampleGradient loss_grad(const ProjectorModel& model, std::span<const float> sample,
                         std::span<const float> center, double radius, std::size_t locations) {
  SampleGradient out{{}, Gradients::zeros_like(model)};
  out.loss = accumulate_loss_grad(model, sample, locations, center, radius, 1.0f, out.grads);
  return out;
}

void adam_step(ProjectorModel& model, const Gradients& grads) {
  if (grads.weight.size() != model.weight.size() || grads.bias.size() != model.bias.size()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient shape does not match the projector");
  }
  if (!all_finite(grads.weight) || !all_finite(grads.bias)) {
    throw Error(ErrorCode::NonFiniteGradient, "refusing Adam step on NaN/Inf gradient");
  }
  AdamState& s = model.adam;
  if (s.m_weight.size() != model.weight.size()) {
    s.m_weight.assign(model.weight.size(), 0.0f);
    s.v_weight.assign(model.weight.size(), 0.0f);
    s.m_bias.assign(model.bias.size(), 0.0f);
    s.v_bias.assign(model.bias.size(), 0.0f);
  }
  s.t += 1;
  const double t = static_cast<double>(s.t);
  kernels::AdamCoefficients c{
      static_cast<float>(s.lr),
      static_cast<float>(s.beta1),
      static_cast<float>(s.beta2),
      static_cast<float>(s.eps),
      static_cast<float>(s.weight_decay),
      static_cast<float>(1.0 - std::pow(s.beta1, t)),
      static_cast<float>(1.0 - std::pow(s.beta2, t)),
  };
  const auto& k = kernels::active();
  k.adam_update(model.weight.data(), grads.weight.data(), s.m_weight.data(), s.v_weight.data(),
                model.weight.size(), c);
  c.weight_decay = 0.0f;
  k.adam_update(model.bias.data(), grads.bias.data(), s.m_bias.data(), s.v_bias.data(),
                model.bias.size(), c);
  if (!all_finite(model.weight) || !all_finite(model.bias)) {
    throw Error(ErrorCode::NonFiniteGradient, "parameters became non-finite after Adam step");
  }
}

GradCheckResult grad_check(const ProjectorModel& model, std::span<const float> sample,
                           std::span<const float> center, double radius, double h,
                           std::size_t locations) {
  check_dims(model, sample.size(), locations, center.size());
  const std::size_t in = model.in_dim, out = model.out_dim;
  DoubleParams p{{model.weight.begin(), model.weight.end()}, {model.bias.begin(), model.bias.end()}};
  const std::vector<double> f(sample.begin(), sample.end());
  const std::vector<double> c(center.begin(), center.end());

  GradCheckResult result;
  double min_margin = INFINITY;
  hinge_loss_f64(p, in, out, f, locations, c, radius, &min_margin);
  if (min_margin < 10.0 * h) {
    result.skipped = true;
    return result;
  }

  const DoubleParams analytic = hinge_grad_f64(p, in, out, f, locations, c, radius);
  auto check = [&](std::vector<double>& params, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + h;
      const double plus = hinge_loss_f64(p, in, out, f, locations, c, radius);
      params[i] = saved - h;
      const double minus = hinge_loss_f64(p, in, out, f, locations, c, radius);
      params[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double rel = std::abs(grad[i] - numeric) / std::max(std::abs(numeric), 1e-12);
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.parameters_checked;
    }
  };
  check(p.weight, analytic.weight);
  check(p.bias, analytic.bias);
  return result;
}

}  // namespace hyperocc
