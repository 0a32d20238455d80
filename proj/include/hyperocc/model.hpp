#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hyperocc {

struct AdamState {
  std::vector<float> m_weight, v_weight;
  std::vector<float> m_bias, v_bias;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr = 1e-4;
  double weight_decay = 5e-4;  // coupled L2, weights only
};

/// Per-location linear projector z = W f + b (a 1x1 convolution on grids).
struct ProjectorModel {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<float> weight;  // out_dim x in_dim, row-major
  std::vector<float> bias;    // out_dim
  AdamState adam;
};

struct Gradients {
  std::vector<float> weight;
  std::vector<float> bias;

  static Gradients zeros_like(const ProjectorModel& m) {
    return {std::vector<float>(m.weight.size(), 0.0f), std::vector<float>(m.bias.size(), 0.0f)};
  }
};

struct LossValue {
  double value = 0.0;
  bool active = false;
};

/// Weights uniform in [-1/sqrt(in_dim), 1/sqrt(in_dim)], zero bias, zeroed Adam state.
ProjectorModel init_projector(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);

void forward_into(const ProjectorModel& model, std::span<const float> f, std::span<float> z);
std::vector<float> forward(const ProjectorModel& model, std::span<const float> f);

/// Applies the projector at every location of a [C, H*W] grid; output is [out_dim, H*W].
std::vector<float> forward_grid(const ProjectorModel& model, std::span<const float> grid,
                                std::size_t locations);

/// max(||z - c||^2 - R^2, 0). Equality with R^2 counts as inside (inactive).
LossValue loss(std::span<const float> z, std::span<const float> center, double radius);

/// Mean of the hinge loss over the locations of a [D, H*W] projected grid.
LossValue loss_grid(std::span<const float> z_grid, std::span<const float> center, double radius,
                    std::size_t locations);

/// Adds scale * dL/dtheta for one sample (vector or [C, H*W] grid, loss averaged over
/// locations) into `acc`. Writes the projected sample into `z_out` when non-empty.
LossValue accumulate_loss_grad(const ProjectorModel& model, std::span<const float> sample,
                               std::size_t locations, std::span<const float> center,
                               double radius, float scale, Gradients& acc,
                               std::span<float> z_out = {});

struct SampleGradient {
  LossValue loss;
  Gradients grads;
};

SampleGradient loss_grad(const ProjectorModel& model, std::span<const float> sample,
                         std::span<const float> center, double radius, std::size_t locations = 1);

/// One Adam step with coupled weight decay on the weights. Throws
/// NonFiniteGradient (and leaves the model untouched) on NaN/Inf gradients.
void adam_step(ProjectorModel& model, const Gradients& grads);

struct GradCheckResult {
  double max_rel_error = 0.0;
  bool skipped = false;  // too close to the hinge boundary to difference
  std::size_t parameters_checked = 0;
};

/// Central finite differences (float64) over every parameter against the
/// analytic gradient.
GradCheckResult grad_check(const ProjectorModel& model, std::span<const float> sample,
                           std::span<const float> center, double radius, double h,
                           std::size_t locations = 1);

}  // namespace hyperocc
