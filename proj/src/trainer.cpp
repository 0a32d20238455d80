#include "hyperocc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hyperocc/rng.hpp"
#include "hyperocc/scorer.hpp"

namespace hyperocc {

namespace {

// Online collapse/spread statistics are computed over windows of this many samples.
constexpr std::size_t kOnlineWindow = 64;

void require_normal_only(const FeatureSet& set) {
  for (std::size_t i = 0; i < set.n_samples; ++i) {
    if (set.label(i) != Label::Normal) {
      throw Error(ErrorCode::AnomalyInTraining,
                  "training sample " + std::to_string(i) + " is not labeled normal");
    }
  }
}

void check_training_set(const FeatureSet& train, const ProjectorModel& model, const Center& center) {
  if (train.n_samples == 0) throw Error(ErrorCode::EmptySet, "training set is empty");
  require_valid(train);
  require_normal_only(train);
  if (train.channels != model.in_dim) {
    throw Error(ErrorCode::DimensionMismatch, "features have " + std::to_string(train.channels) +
                                                  " channels, projector expects " +
                                                  std::to_string(model.in_dim));
  }
  if (center.dim() != model.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "center dimension differs from projector output");
  }
}

void configure_optimizer(ProjectorModel& model, const TrainConfig& cfg) {
  model.adam.lr = cfg.lr;
  model.adam.weight_decay = cfg.weight_decay;
}

// Runs fn, converting numeric failures into an abort that keeps the trace.
template <typename Fn>
auto or_abort(const TrainTrace& trace, Fn fn) {
  try {
    return fn();
  } catch (const TrainingAborted&) {
    throw;
  } catch (const Error& e) {
    if (error_class(e.code()) != ErrorClass::Numeric) throw;
    throw TrainingAborted(e.code(), e.what(), trace);
  }
}

void step_or_abort(ProjectorModel& model, const Gradients& grads, TrainTrace& trace) {
  or_abort(trace, [&] { adam_step(model, grads); });
}

}  // namespace

void validate_config(const TrainConfig& cfg) {
  if (cfg.batch_size == 0) throw Error(ErrorCode::Config, "batch size must be >= 1");
  if (!(cfg.radius >= 0.0) || !std::isfinite(cfg.radius)) {
    throw Error(ErrorCode::Config, "radius must be finite and >= 0");
  }
  if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) throw Error(ErrorCode::Config, "lr must be >= 0");
  if (!(cfg.weight_decay >= 0.0)) throw Error(ErrorCode::Config, "weight decay must be >= 0");
  if (cfg.mode == TrainMode::Online && (cfg.epochs != 1 || cfg.batch_size != 1)) {
    throw Error(ErrorCode::Config, "online training requires epochs = 1 and batch size = 1");
  }
}

bool TrainTrace::collapsed_in(std::size_t epoch) const {
  return std::any_of(collapse_events.begin(), collapse_events.end(),
                     [&](const CollapseEvent& e) { return e.epoch == epoch; });
}

double batch_spread(std::span<const float> batch, std::size_t dim) {
  const std::size_t rows = dim ? batch.size() / dim : 0;
  if (rows < 2) return 0.0;
  double total = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += batch[r * dim + d];
    mean /= static_cast<double>(rows);
    double var = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double x = batch[r * dim + d] - mean;
      var += x * x;
    }
    total += std::sqrt(var / static_cast<double>(rows));
  }
  return total / static_cast<double>(dim);
}

CollapseStatus collapse_check(std::span<const float> z_batch, std::size_t z_dim,
                              std::span<const float> f_batch, std::size_t f_dim) {
  const std::size_t rows = z_dim ? z_batch.size() / z_dim : 0;
  if (rows < 2) return CollapseStatus::Healthy;
  if (batch_spread(z_batch, z_dim) >= kCollapseSpread) return CollapseStatus::Healthy;
  bool inputs_identical = true;
  for (std::size_t r = 1; r < rows && inputs_identical; ++r) {
    inputs_identical = std::equal(f_batch.begin(), f_batch.begin() + f_dim,
                                  f_batch.begin() + r * f_dim);
  }
  return inputs_identical ? CollapseStatus::Healthy : CollapseStatus::Collapsed;
}

TrainTrace fit_offline(ProjectorModel& model, const FeatureSet& train, const Center& center,
                       const TrainConfig& cfg) {
  validate_config(cfg);
  if (cfg.mode != TrainMode::Offline) throw Error(ErrorCode::Config, "fit_offline needs offline mode");
  check_training_set(train, model, center);
  configure_optimizer(model, cfg);

  TrainTrace trace;
  const std::size_t n = train.n_samples;
  const std::size_t loc = train.locations();
  const std::size_t z_size = model.out_dim * loc;
  const std::size_t f_size = train.sample_size();
  std::vector<std::size_t> order(n);
  std::vector<float> z_batch(cfg.batch_size * z_size);
  std::vector<float> f_batch(cfg.batch_size * f_size);
  Gradients grads = Gradients::zeros_like(model);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed + epoch, Stream::Shuffle);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    double epoch_loss = 0.0, spread_sum = 0.0;
    std::size_t spread_batches = 0;
    for (std::size_t start = 0, batch = 0; start < n; start += cfg.batch_size, ++batch) {
      const std::size_t b = std::min(cfg.batch_size, n - start);
      std::fill(grads.weight.begin(), grads.weight.end(), 0.0f);
      std::fill(grads.bias.begin(), grads.bias.end(), 0.0f);
      const float scale = 1.0f / static_cast<float>(b);
      for (std::size_t j = 0; j < b; ++j) {
        auto sample = train.sample(order[start + j]);
        std::copy(sample.begin(), sample.end(), f_batch.begin() + j * f_size);
        std::span<float> z_out(z_batch.data() + j * z_size, z_size);
        epoch_loss += or_abort(trace, [&] {
                        return accumulate_loss_grad(model, sample, loc, center.vector, cfg.radius, scale,
                                                    grads, z_out);
                      }).value;
      }
      if (!std::isfinite(epoch_loss)) {
        throw TrainingAborted(ErrorCode::NonFiniteLoss,
                              "loss became non-finite in epoch " + std::to_string(epoch), trace);
      }
      std::span<const float> zs(z_batch.data(), b * z_size), fs(f_batch.data(), b * f_size);
      if (b >= 2) {
        spread_sum += batch_spread(zs, z_size);
        ++spread_batches;
        if (collapse_check(zs, z_size, fs, f_size) == CollapseStatus::Collapsed) {
          trace.collapse_events.push_back({epoch, batch});
        }
      }
      step_or_abort(model, grads, trace);
      trace.samples_seen += b;
    }
    trace.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
    trace.epoch_spread.push_back(spread_batches ? spread_sum / static_cast<double>(spread_batches) : 0.0);
  }
  return trace;
}

FeatureSetStream::FeatureSetStream(const FeatureSet& set) : set_(set) { require_normal_only(set); }

std::optional<std::span<const float>> FeatureSetStream::next() {
  if (pos_ >= set_.n_samples) return std::nullopt;
  return set_.sample(pos_++);
}

TrainTrace fit_online(ProjectorModel& model, SampleStream& stream, const Center& center,
                      const TrainConfig& cfg) {
  validate_config(cfg);
  if (cfg.mode != TrainMode::Online) throw Error(ErrorCode::Config, "fit_online needs online mode");
  if (center.dim() != model.out_dim) {
    throw Error(ErrorCode::DimensionMismatch, "center dimension differs from projector output");
  }
  configure_optimizer(model, cfg);

  TrainTrace trace;
  const std::size_t loc = stream.locations();
  const std::size_t z_size = model.out_dim * loc;
  const std::size_t f_size = model.in_dim * loc;
  std::vector<float> z_window, f_window;
  Gradients grads = Gradients::zeros_like(model);
  double loss_sum = 0.0, spread_sum = 0.0;
  std::size_t windows = 0;

  auto close_window = [&] {
    const std::size_t rows = z_window.size() / z_size;
    if (rows >= 2) {
      spread_sum += batch_spread(z_window, z_size);
      ++windows;
      if (collapse_check(z_window, z_size, f_window, f_size) == CollapseStatus::Collapsed) {
        trace.collapse_events.push_back({0, (trace.samples_seen - 1) / kOnlineWindow});
      }
    }
    z_window.clear();
    f_window.clear();
  };

  while (auto sample = stream.next()) {
    for (float x : *sample) {
      if (!std::isfinite(x)) {
        throw TrainingAborted(ErrorCode::NonFiniteData, "streamed sample is not finite", trace);
      }
    }
    if (cfg.prequential) {
      trace.prequential_scores.push_back(score_sample(model, *sample, center.vector, cfg.radius, loc));
    }
    std::fill(grads.weight.begin(), grads.weight.end(), 0.0f);
    std::fill(grads.bias.begin(), grads.bias.end(), 0.0f);
    const std::size_t offset = z_window.size();
    z_window.resize(offset + z_size);
    const LossValue lv = or_abort(trace, [&] {
      return accumulate_loss_grad(model, *sample, loc, center.vector, cfg.radius, 1.0f, grads,
                                  std::span<float>(z_window).subspan(offset));
    });
    if (!std::isfinite(lv.value)) {
      throw TrainingAborted(ErrorCode::NonFiniteLoss, "loss became non-finite", trace);
    }
    loss_sum += lv.value;
    f_window.insert(f_window.end(), sample->begin(), sample->end());
    step_or_abort(model, grads, trace);
    ++trace.samples_seen;
    if (z_window.size() == kOnlineWindow * z_size) close_window();
  }
  close_window();
  if (trace.samples_seen > 0) {
    trace.epoch_loss.push_back(loss_sum / static_cast<double>(trace.samples_seen));
    trace.epoch_spread.push_back(windows ? spread_sum / static_cast<double>(windows) : 0.0);
  }
  return trace;
}

}  // namespace hyperocc
