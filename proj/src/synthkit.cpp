#include "hyperocc/synthkit.hpp"

#include <cmath>

#include <json.hpp>

#include "hyperocc/error.hpp"
#include "hyperocc/rng.hpp"

namespace hyperocc {

namespace {

void normalize(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  for (double& x : v) x /= n;
}

void append_samples(FeatureSet& set, const std::vector<double>& direction, std::size_t count,
                    double noise, Label label, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    for (double d : direction) set.data.push_back(static_cast<float>(kClusterRadius * d + noise * rng.normal()));
    set.labels.push_back(static_cast<std::uint8_t>(label));
  }
  set.n_samples += count;
}

std::string spec_meta(const SynthSpec& s, std::string_view split) {
  nlohmann::ordered_json j;
  j["source"] = "synthkit";
  j["split"] = split;
  j["dim"] = s.dim;
  j["n_train_normal"] = s.n_train_normal;
  j["n_test_normal"] = s.n_test_normal;
  j["n_test_anomaly"] = s.n_test_anomaly;
  j["cos_target"] = s.cos_target;
  j["within_noise"] = s.within_noise;
  j["seed"] = s.seed;
  return j.dump();
}

}  // namespace

SynthTask gen_clusters(const SynthSpec& spec) {
  if (spec.dim < 2) throw Error(ErrorCode::Config, "synthetic tasks need dim >= 2");
  if (spec.n_train_normal == 0 || spec.n_test_normal == 0 || spec.n_test_anomaly == 0) {
    throw Error(ErrorCode::Config, "synthetic sample counts must be >= 1");
  }
  if (!(spec.cos_target >= 0.0 && spec.cos_target <= 1.0)) {
    throw Error(ErrorCode::Config, "cos_target must lie in [0, 1]");
  }
  if (!(spec.within_noise >= 0.0)) throw Error(ErrorCode::Config, "noise must be >= 0");

  Rng rng(spec.seed, Stream::Synth);
  SynthTask task;
  auto& un = task.normal_direction;
  un.resize(spec.dim);
  for (double& x : un) x = rng.normal();
  normalize(un);

  // Orthogonal draw by Gram-Schmidt against u_n, then mix to the target cosine.
  std::vector<double> v(spec.dim);
  for (double& x : v) x = rng.normal();
  double proj = 0.0;
  for (std::size_t i = 0; i < spec.dim; ++i) proj += v[i] * un[i];
  for (std::size_t i = 0; i < spec.dim; ++i) v[i] -= proj * un[i];
  normalize(v);
  const double sin_target = std::sqrt(1.0 - spec.cos_target * spec.cos_target);
  auto& ua = task.anomaly_direction;
  ua.resize(spec.dim);
  for (std::size_t i = 0; i < spec.dim; ++i) ua[i] = spec.cos_target * un[i] + sin_target * v[i];

  for (FeatureSet* set : {&task.train, &task.test}) {
    set->channels = static_cast<std::uint32_t>(spec.dim);
    set->height = set->width = 1;
  }
  task.train.meta = spec_meta(spec, "train");
  task.test.meta = spec_meta(spec, "test");
  append_samples(task.train, un, spec.n_train_normal, spec.within_noise, Label::Normal, rng);
  append_samples(task.test, un, spec.n_test_normal, spec.within_noise, Label::Normal, rng);
  append_samples(task.test, ua, spec.n_test_anomaly, spec.within_noise, Label::Anomaly, rng);
  return task;
}

std::vector<std::pair<std::string, SynthSpec>> reference_tasks() {
  SynthSpec low;
  low.cos_target = 0.2;
  SynthSpec high;
  high.cos_target = 0.6;
  return {{"LOWSIM", low}, {"HIGHSIM", high}};
}

std::optional<SynthSpec> find_preset(std::string_view name) {
  for (auto& [n, s] : reference_tasks()) {
    if (n == name) return s;
  }
  return std::nullopt;
}

}  // namespace hyperocc
