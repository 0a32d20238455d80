#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyperocc/center.hpp"
#include "hyperocc/feature_store.hpp"
#include "hyperocc/model.hpp"
#include "hyperocc/trainer.hpp"

namespace hyperocc {

struct PolarCoord {
  double radius = 0.0;     // ||z||
  double cos_theta = 0.0;  // angle to the center direction; 0 for z = 0
};

PolarCoord polar_decompose(std::span<const float> z, std::span<const float> center);

struct PolarSample {
  PolarCoord coord;
  Label group;
};

/// Polar coordinates of every labeled sample after projection (grids mean-pooled).
std::vector<PolarSample> polar_stats(const ProjectorModel& model, const FeatureSet& set,
                                     std::span<const float> center);

struct CrossCosine {
  double mean = 0.0;
  std::size_t pairs = 0;
  std::size_t skipped_zero = 0;  // zero-norm samples left out
  bool subsampled = false;
};

inline constexpr std::size_t kMaxExactPairs = 1'000'000;

/// Mean cosine over all (normal, anomaly) pairs of mean-pooled feature vectors;
/// above 10^6 pairs, 10^6 pairs are drawn with the seeded generator.
CrossCosine cross_cosine_stats(const FeatureSet& normals, const FeatureSet& anomalies,
                               std::uint64_t seed = kDefaultSeed);

struct NormSweepRow {
  double norm = 0.0;
  double image_auc = 0.0;
  double cross_cos_projected = 0.0;
  double anom_cos_to_center = 0.0;
};

struct NormSweepReport {
  std::vector<NormSweepRow> rows;
  double base_cross_cosine = 0.0;
};

/// One fresh projector per norm (same init seed), trained on `train` toward
/// set_norm(center_template, norm) and evaluated on `test`. Points may run on
/// `jobs` threads; rows always come back in norm order.
NormSweepReport norm_sweep(const FeatureSet& train, const FeatureSet& test,
                           std::span<const double> norms, const TrainConfig& cfg,
                           const Center& center_template, std::size_t jobs = 1);

struct FeasibleDomain {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
  bool hi_closed = false;  // [lo, hi] when every tested norm passes, else [lo, hi)

  std::string to_string() const;
};

/// Longest prefix of tested norms (from the smallest) whose AUC >= threshold.
FeasibleDomain feasible_domain(std::span<const NormSweepRow> rows, double auc_threshold);

struct AblationRow {
  CenterKind kind;
  double image_auc = 0.0;
};

/// One train + evaluate per center kind, all at norm 1 with identical data and init.
std::vector<AblationRow> distribution_ablation(const FeatureSet& train, const FeatureSet& test,
                                               std::span<const CenterKind> kinds,
                                               const TrainConfig& cfg);

/// norm,image_auc,cross_cos_projected,anom_cos_to_center
std::string sweep_csv(const NormSweepReport& report);
/// kind,image_auc
std::string ablation_csv(std::span<const AblationRow> rows);

}  // namespace hyperocc
