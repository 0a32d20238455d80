#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hyperocc/center.hpp"
#include "hyperocc/error.hpp"
#include "hyperocc/feature_store.hpp"
#include "hyperocc/model.hpp"

namespace hyperocc {

enum class TrainMode { Offline, Online };

struct TrainConfig {
  double radius = 1e-5;
  double lr = 1e-4;
  double weight_decay = 5e-4;
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  std::uint64_t seed = kDefaultSeed;
  TrainMode mode = TrainMode::Offline;
  // Online only: record each sample's distance to the center before its update.
  bool prequential = false;

  static TrainConfig online_defaults() {
    TrainConfig c;
    c.epochs = 1;
    c.batch_size = 1;
    c.mode = TrainMode::Online;
    return c;
  }
};

/// Throws ErrorCode::Config when the config breaks its invariants.
void validate_config(const TrainConfig& cfg);

struct CollapseEvent {
  std::size_t epoch;
  std::size_t batch;
};

struct TrainTrace {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_spread;
  std::vector<CollapseEvent> collapse_events;
  std::size_t samples_seen = 0;
  std::vector<double> prequential_scores;

  bool collapsed_in(std::size_t epoch) const;
};

/// Training stopped on a non-finite loss or update; carries the partial trace.
class TrainingAborted : public Error {
 public:
  TrainingAborted(ErrorCode code, const std::string& message, TrainTrace trace)
      : Error(code, message), trace_(std::move(trace)) {}
  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

enum class CollapseStatus { Healthy, Collapsed };

inline constexpr double kCollapseSpread = 1e-6;

/// Mean over dimensions of the population std of a batch of vectors (rows of `batch`).
double batch_spread(std::span<const float> batch, std::size_t dim);

/// Collapsed when the projected batch has spread < 1e-6 although the inputs differ.
/// Batches of fewer than two rows are reported healthy.
CollapseStatus collapse_check(std::span<const float> z_batch, std::size_t z_dim,
                              std::span<const float> f_batch, std::size_t f_dim);

/// Mini-batch training over normal samples: per-epoch seeded shuffle, mean
/// batch loss, one Adam step per batch. The center is never modified.
TrainTrace fit_offline(ProjectorModel& model, const FeatureSet& train, const Center& center,
                       const TrainConfig& cfg);

/// Source of single samples for one-pass training.
class SampleStream {
 public:
  virtual ~SampleStream() = default;
  /// Next sample, or nullopt at the end. The span stays valid until the next call.
  virtual std::optional<std::span<const float>> next() = 0;
  virtual std::size_t locations() const = 0;
};

/// Streams a FeatureSet in stored order. Rejects sets with non-normal labels.
class FeatureSetStream : public SampleStream {
 public:
  explicit FeatureSetStream(const FeatureSet& set);
  std::optional<std::span<const float>> next() override;
  std::size_t locations() const override { return set_.locations(); }

 private:
  const FeatureSet& set_;
  std::size_t pos_ = 0;
};

/// One gradient step per arriving sample, each sample seen exactly once.
TrainTrace fit_online(ProjectorModel& model, SampleStream& stream, const Center& center,
                      const TrainConfig& cfg);

}  // namespace hyperocc
