#include <doctest.h>

#include <cmath>
#include <cstring>

#include "hyperocc/error.hpp"
#include "hyperocc/synthkit.hpp"
#include "hyperocc/trainer.hpp"

using namespace hyperocc;

namespace {

const SynthTask& lowsim() {
  static const SynthTask task = gen_clusters(*find_preset("LOWSIM"));
  return task;
}

Center unit_center(std::size_t dim) { return make_center(dim, CenterKind::StandardNormal, kDefaultSeed); }

// Counts how often each sample index is handed out.
class CountingStream : public SampleStream {
 public:
  explicit CountingStream(const FeatureSet& s) : set_(s), hits_(s.n_samples, 0) {}
  std::optional<std::span<const float>> next() override {
    if (pos_ >= set_.n_samples) return std::nullopt;
    ++hits_[pos_];
    return set_.sample(pos_++);
  }
  std::size_t locations() const override { return set_.locations(); }
  const std::vector<int>& hits() const { return hits_; }

 private:
  const FeatureSet& set_;
  std::vector<int> hits_;
  std::size_t pos_ = 0;
};

class EmptyStream : public SampleStream {
 public:
  std::optional<std::span<const float>> next() override { return std::nullopt; }
  std::size_t locations() const override { return 1; }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::Config;
}

}  // namespace

TEST_CASE("config invariants") {
  TrainConfig cfg;
  CHECK_NOTHROW(validate_config(cfg));
  CHECK_NOTHROW(validate_config(TrainConfig::online_defaults()));
  TrainConfig bad = TrainConfig::online_defaults();
  bad.epochs = 3;
  CHECK(code_of([&] { validate_config(bad); }) == ErrorCode::Config);
  bad = TrainConfig::online_defaults();
  bad.batch_size = 4;
  CHECK(code_of([&] { validate_config(bad); }) == ErrorCode::Config);
  TrainConfig zero_batch;
  zero_batch.batch_size = 0;
  CHECK(code_of([&] { validate_config(zero_batch); }) == ErrorCode::Config);
}

TEST_CASE("loss drops by 10x on the low-similarity task with default settings") {
  const auto& t = lowsim();
  ProjectorModel m = init_projector(64, 64, kDefaultSeed);
  const TrainTrace trace = fit_offline(m, t.train, unit_center(64), TrainConfig{});
  REQUIRE(trace.epoch_loss.size() == 50);
  CHECK(trace.epoch_loss.back() < 0.1 * trace.epoch_loss.front());
  CHECK(trace.samples_seen == 50 * 512);

  std::size_t non_increasing = 0;
  for (std::size_t e = 1; e < trace.epoch_loss.size(); ++e) {
    non_increasing += trace.epoch_loss[e] <= trace.epoch_loss[e - 1];
  }
  CHECK(non_increasing >= 0.9 * (trace.epoch_loss.size() - 1));
  CHECK(trace.collapse_events.empty());
}

TEST_CASE("zero epochs leave the model unchanged") {
  ProjectorModel m = init_projector(64, 64, 5);
  const ProjectorModel before = m;
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainTrace trace = fit_offline(m, lowsim().train, unit_center(64), cfg);
  CHECK(trace.epoch_loss.empty());
  CHECK(m.weight == before.weight);
  CHECK(m.bias == before.bias);
}

TEST_CASE("offline and online training are deterministic and never touch the center") {
  const auto& t = lowsim();
  const Center c = unit_center(64);
  const auto c_before = c.vector;
  TrainConfig cfg;
  cfg.epochs = 3;
  ProjectorModel a = init_projector(64, 64, 1), b = init_projector(64, 64, 1);
  fit_offline(a, t.train, c, cfg);
  fit_offline(b, t.train, c, cfg);
  CHECK(std::memcmp(a.weight.data(), b.weight.data(), a.weight.size() * 4) == 0);
  CHECK(a.bias == b.bias);

  ProjectorModel oa = init_projector(64, 64, 1), ob = init_projector(64, 64, 1);
  FeatureSetStream sa(t.train), sb(t.train);
  fit_online(oa, sa, c, TrainConfig::online_defaults());
  fit_online(ob, sb, c, TrainConfig::online_defaults());
  CHECK(oa.weight == ob.weight);
  CHECK(std::memcmp(c.vector.data(), c_before.data(), c_before.size() * 4) == 0);
}

TEST_CASE("training rejects anomalies, unknown labels and empty sets") {
  const auto& t = lowsim();
  ProjectorModel m = init_projector(64, 64, 1);
  CHECK(code_of([&] { fit_offline(m, t.test, unit_center(64), TrainConfig{}); }) == ErrorCode::AnomalyInTraining);
  FeatureSet unknown = t.train.subset(std::vector<std::size_t>{0, 1});
  unknown.labels[1] = 255;
  CHECK(code_of([&] { fit_offline(m, unknown, unit_center(64), TrainConfig{}); }) == ErrorCode::AnomalyInTraining);
  CHECK(code_of([&] { FeatureSetStream s(t.test); }) == ErrorCode::AnomalyInTraining);
  FeatureSet empty;
  empty.channels = 64;
  CHECK(code_of([&] { fit_offline(m, empty, unit_center(64), TrainConfig{}); }) == ErrorCode::EmptySet);
  CHECK(code_of([&] { fit_offline(m, t.train, unit_center(32), TrainConfig{}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("online mode visits each sample exactly once") {
  const auto& t = lowsim();
  ProjectorModel m = init_projector(64, 64, 1);
  CountingStream s(t.train);
  const TrainTrace trace = fit_online(m, s, unit_center(64), TrainConfig::online_defaults());
  CHECK(trace.samples_seen == t.train.n_samples);
  for (int h : s.hits()) REQUIRE(h == 1);
  CHECK(m.adam.t == t.train.n_samples);
}

TEST_CASE("empty stream leaves the model unchanged") {
  ProjectorModel m = init_projector(8, 8, 1);
  const auto w = m.weight;
  EmptyStream s;
  const TrainTrace trace = fit_online(m, s, unit_center(8), TrainConfig::online_defaults());
  CHECK(trace.samples_seen == 0);
  CHECK(m.weight == w);
}

TEST_CASE("prequential scores are recorded before each update") {
  const auto& t = lowsim();
  ProjectorModel m = init_projector(64, 64, 1);
  TrainConfig cfg = TrainConfig::online_defaults();
  cfg.prequential = true;
  FeatureSetStream s(t.train);
  const TrainTrace trace = fit_online(m, s, unit_center(64), cfg);
  REQUIRE(trace.prequential_scores.size() == t.train.n_samples);
  CHECK(trace.prequential_scores.back() < trace.prequential_scores.front());
}

TEST_CASE("collapse check") {
  const std::vector<float> f{1, 2, 3, 4, 5, 6};  // 3 distinct rows of dim 2
  const std::vector<float> same{7, 7, 7, 7, 7, 7};
  CHECK(collapse_check(same, 2, f, 2) == CollapseStatus::Collapsed);
  CHECK(collapse_check(f, 2, f, 2) == CollapseStatus::Healthy);
  CHECK(collapse_check(same, 2, same, 2) == CollapseStatus::Healthy);
  CHECK(collapse_check(std::span(same).first(2), 2, std::span(f).first(2), 2) == CollapseStatus::Healthy);
  CHECK(batch_spread(f, 2) == doctest::Approx(std::sqrt(8.0 / 3.0)));

  // W = 0 projects every sample onto b.
  ProjectorModel m = init_projector(64, 64, 1);
  std::fill(m.weight.begin(), m.weight.end(), 0.0f);
  std::fill(m.bias.begin(), m.bias.end(), 0.5f);
  const TrainTrace trace = fit_offline(m, lowsim().train, unit_center(64), TrainConfig{});
  REQUIRE_FALSE(trace.collapse_events.empty());
  CHECK(trace.collapse_events[0].epoch == 0);
  CHECK(trace.collapse_events[0].batch == 0);
  CHECK(trace.collapsed_in(0));
}

TEST_CASE("non-finite loss aborts with the partial trace") {
  FeatureSet s = lowsim().train.subset(std::vector<std::size_t>{0, 1, 2, 3});
  std::fill(s.data.begin() + 64, s.data.end(), 3e38f);
  ProjectorModel m = init_projector(64, 64, 1);
  TrainConfig cfg;
  cfg.batch_size = 1;
  try {
    fit_offline(m, s, unit_center(64), cfg);
    FAIL("expected abort");
  } catch (const TrainingAborted& e) {
    CHECK(e.code() == ErrorCode::NonFiniteLoss);
    CHECK(e.trace().samples_seen < 4);
  }
}
