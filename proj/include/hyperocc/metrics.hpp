#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperocc/feature_store.hpp"
#include "hyperocc/model.hpp"
#include "hyperocc/scorer.hpp"

namespace hyperocc {

/// Area under the ROC curve via the Mann-Whitney rank sum, ties counted half.
/// Higher score = more anomalous. Labels must be 0 or 1 and both classes present.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct EvalOptions {
  double sigma = kDefaultSmoothingSigma;  // blur applied to upsampled maps for pixel AUC
};

struct EvalReport {
  double image_auc = 0.0;
  std::optional<double> pixel_auc;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<std::size_t> sample_ids;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

/// Scores every labeled test sample, then image AUC and (when masks are
/// present) pooled pixel AUC over the upsampled score maps.
EvalReport evaluate(const ProjectorModel& model, const FeatureSet& test,
                    std::span<const float> center, double radius, const EvalOptions& options = {});

/// sample_id,score,label
std::string eval_csv(const EvalReport& report);
/// {"image_auc":..,"pixel_auc":..|null,"n_pos":..,"n_neg":..}
std::string eval_summary_json(const EvalReport& report);

}  // namespace hyperocc
