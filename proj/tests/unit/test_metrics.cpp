#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "../oracles.hpp"
#include "hyperocc/center.hpp"
#include "hyperocc/error.hpp"
#include "hyperocc/metrics.hpp"
#include "hyperocc/synthkit.hpp"

using namespace hyperocc;

namespace {

using Labels = std::vector<std::uint8_t>;

ErrorCode auc_error(std::vector<double> s, Labels l) {
  try {
    roc_auc(s, l);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::Config;
}

}  // namespace

TEST_CASE("auc on small worked instances") {
  CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.9, 0.8}, Labels{0, 0, 1, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, Labels{0, 1, 0, 1}) == 0.5);
  // Both positives (0.5, 0.5) beat both negatives (0.3, 0.4): 4 wins of 4 pairs.
  const std::vector<double> s{0.3, 0.5, 0.4, 0.5};
  const Labels l{0, 1, 0, 1};
  CHECK(oracle::pair_auc(s, l) == 1.0);
  CHECK(roc_auc(s, l) == 1.0);
  // One tie between classes: (3 + 0.5) / 4.
  CHECK(roc_auc(std::vector<double>{0.3, 0.5, 0.5, 0.6}, Labels{0, 1, 0, 1}) == 0.875);
}

TEST_CASE("auc input errors") {
  CHECK(auc_error({1, 2}, {0, 0}) == ErrorCode::UndefinedAUC);
  CHECK(auc_error({1, 2}, {1, 1}) == ErrorCode::UndefinedAUC);
  CHECK(auc_error({1, 2}, {0, 2}) == ErrorCode::BadLabel);
  CHECK(auc_error({1, NAN}, {0, 1}) == ErrorCode::NonFiniteData);
}

TEST_CASE("auc equals pair counting on random tied instances") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + gen() % 200;
    std::vector<double> s(n);
    Labels l(n);
    const int levels = 1 + static_cast<int>(gen() % 10);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % levels);
      l[i] = static_cast<std::uint8_t>(gen() & 1);
    }
    l[0] = 0;
    l[1] = 1;
    REQUIRE(roc_auc(s, l) == oracle::pair_auc(s, l));
  }
}

TEST_CASE("auc is invariant under increasing transforms and flips under negation") {
  std::mt19937_64 gen(22);
  std::normal_distribution<double> d;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10 + gen() % 100;
    std::vector<double> s(n), lin(n), ex(n), neg(n);
    Labels l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = d(gen);
      lin[i] = 2 * s[i] + 1;
      ex[i] = std::exp(s[i]);
      neg[i] = -s[i];
      l[i] = static_cast<std::uint8_t>(i % 2);
    }
    const double a = roc_auc(s, l);
    CHECK(roc_auc(lin, l) == a);
    CHECK(roc_auc(ex, l) == a);
    CHECK(roc_auc(neg, l) + a == 1.0);
  }
}

TEST_CASE("evaluate on a separable synthetic task") {
  SynthSpec spec;
  spec.dim = 16;
  spec.n_train_normal = 32;
  spec.n_test_normal = 20;
  spec.n_test_anomaly = 10;
  spec.cos_target = 0.0;
  spec.within_noise = 0.1;
  const SynthTask t = gen_clusters(spec);
  // Identity projector with the normal direction as center separates perfectly.
  ProjectorModel id = init_projector(16, 16, 1);
  std::fill(id.weight.begin(), id.weight.end(), 0.0f);
  for (int i = 0; i < 16; ++i) id.weight[i * 16 + i] = 1.0f;
  std::vector<float> c(t.normal_direction.begin(), t.normal_direction.end());
  for (auto& x : c) x *= static_cast<float>(kClusterRadius);
  const EvalReport r = evaluate(id, t.test, c, 1e-5);
  CHECK(r.image_auc == 1.0);
  CHECK(r.n_pos == 10);
  CHECK(r.n_neg == 20);
  CHECK_FALSE(r.pixel_auc);

  const auto j = nlohmann::json::parse(eval_summary_json(r));
  CHECK(j["image_auc"] == 1.0);
  CHECK(j["pixel_auc"].is_null());
  const std::string csv = eval_csv(r);
  CHECK(csv.rfind("sample_id,score,label\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);

  auto [normals, anomalies] = split_by_label(t.test);
  try {
    evaluate(id, normals, c, 1e-5);
    FAIL("expected UndefinedAUC");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndefinedAUC);
  }
}

TEST_CASE("untrained projector is near chance on orthogonal clusters") {
  std::vector<double> aucs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.cos_target = 0.0;
    spec.seed = seed;
    const SynthTask t = gen_clusters(spec);
    const ProjectorModel m = init_projector(64, 64, seed);
    const Center c = make_center(64, CenterKind::StandardNormal, seed);
    aucs.push_back(evaluate(m, t.test, c.vector, 1e-5).image_auc);
  }
  double mean = 0.0;
  for (double a : aucs) mean += a / aucs.size();
  MESSAGE("mean untrained AUC over 20 seeds: " << mean);
  CHECK(mean >= 0.3);
  CHECK(mean <= 0.7);
}

TEST_CASE("pixel auc pools upsampled maps against masks") {
  // Two 1x2 grids, dim 1, identity projector, center 0, R = 0: map = f^2.
  FeatureSet s;
  s.n_samples = 2;
  s.channels = 1;
  s.height = 1;
  s.width = 2;
  s.data = {0.0f, 3.0f, 0.1f, 0.2f};
  s.labels = {1, 0};
  s.masks = MaskSet{1, 2, {0, 1, 0, 0}};
  ProjectorModel m = init_projector(1, 1, 1);
  m.weight = {1.0f};
  const EvalReport r = evaluate(m, s, std::vector<float>{0.0f}, 0.0, {0.0});
  CHECK(r.image_auc == 1.0);
  REQUIRE(r.pixel_auc);
  CHECK(*r.pixel_auc == 1.0);
}
