#include "hyperocc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hyperocc/error.hpp"

namespace hyperocc {

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scores and labels differ in length");
  }
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw Error(ErrorCode::BadLabel, "AUC labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw Error(ErrorCode::NonFiniteData, "AUC score is not finite");
    n_pos += labels[i];
  }
  const std::uint64_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::UndefinedAUC, "need at least one positive and one negative sample");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum, using mid-ranks for tied groups; kept integral so
  // the result is exact.
  std::uint64_t rank_sum_x2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t mid_rank_x2 = (i + 1) + j;  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) rank_sum_x2 += labels[order[k]] * mid_rank_x2;
    i = j;
  }
  const std::uint64_t u_x2 = rank_sum_x2 - n_pos * (n_pos + 1);
  return static_cast<double>(u_x2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate(const ProjectorModel& model, const FeatureSet& test, std::span<const float> center,
                    double radius, const EvalOptions& options) {
  require_valid(test);
  if (test.channels != model.in_dim) {
    throw Error(ErrorCode::DimensionMismatch, "test features do not match projector input");
  }
  EvalReport report;
  const std::size_t loc = test.locations();
  std::vector<float> pixel_scores;
  std::vector<std::uint8_t> pixel_labels;

  for (std::size_t i = 0; i < test.n_samples; ++i) {
    const Label label = test.label(i);
    if (label == Label::Unknown) continue;
    const auto sample = test.sample(i);
    report.sample_ids.push_back(i);
    report.scores.push_back(score_sample(model, sample, center, radius, loc));
    report.labels.push_back(static_cast<std::uint8_t>(label));
    (label == Label::Anomaly ? report.n_pos : report.n_neg) += 1;

    if (test.masks) {
      const auto& masks = *test.masks;
      const ScoreMap map = score_map(model, sample, test.height, test.width, center, radius);
      const ScoreMap up = upsample_smooth(map, masks.height, masks.width, options.sigma);
      pixel_scores.insert(pixel_scores.end(), up.values.begin(), up.values.end());
      const auto bits = masks.mask(i);
      pixel_labels.insert(pixel_labels.end(), bits.begin(), bits.end());
    }
  }
  report.image_auc = roc_auc(report.scores, report.labels);
  if (test.masks) {
    std::vector<double> px(pixel_scores.begin(), pixel_scores.end());
    report.pixel_auc = roc_auc(px, pixel_labels);
  }
  return report;
}

std::string eval_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "sample_id,score,label\n";
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    out << report.sample_ids[i] << ',' << report.scores[i] << ',' << int{report.labels[i]} << '\n';
  }
  return out.str();
}

std::string eval_summary_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["image_auc"] = report.image_auc;
  j["pixel_auc"] = report.pixel_auc ? nlohmann::ordered_json(*report.pixel_auc) : nlohmann::ordered_json();
  j["n_pos"] = report.n_pos;
  j["n_neg"] = report.n_neg;
  return j.dump(2) + "\n";
}

}  // namespace hyperocc
