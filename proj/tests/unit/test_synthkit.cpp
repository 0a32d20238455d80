#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "hyperocc/metrics.hpp"
#include "hyperocc/synthkit.hpp"
#include "hyperocc/trainer.hpp"

using namespace hyperocc;

TEST_CASE("presets") {
  const auto tasks = reference_tasks();
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].first == "LOWSIM");
  CHECK(tasks[0].second.cos_target == 0.2);
  CHECK(tasks[1].first == "HIGHSIM");
  CHECK(tasks[1].second.cos_target == 0.6);
  for (const auto& [name, s] : tasks) {
    CHECK(s.dim == 64);
    CHECK(s.within_noise == 0.5);
    CHECK(s.n_train_normal == 512);
    CHECK(s.n_test_normal == 128);
    CHECK(s.n_test_anomaly == 128);
    CHECK(s.seed == 1024);
  }
  CHECK_FALSE(find_preset("MIDSIM"));
}

TEST_CASE("generated sets are valid, labeled and reproducible") {
  for (const auto& [name, spec] : reference_tasks()) {
    CAPTURE(name);
    const SynthTask a = gen_clusters(spec), b = gen_clusters(spec);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(validate(a.train).ok());
    CHECK(validate(a.test).ok());
    CHECK(a.train.n_samples == 512);
    for (auto l : a.train.labels) REQUIRE(l == 0);
    for (std::size_t i = 0; i < 256; ++i) REQUIRE(a.test.labels[i] == (i < 128 ? 0 : 1));

    double dot = 0, nn = 0, na = 0;
    for (std::size_t i = 0; i < spec.dim; ++i) {
      dot += a.normal_direction[i] * a.anomaly_direction[i];
      nn += a.normal_direction[i] * a.normal_direction[i];
      na += a.anomaly_direction[i] * a.anomaly_direction[i];
    }
    CHECK(std::abs(dot - spec.cos_target) <= 1e-6);
    CHECK(std::abs(nn - 1.0) <= 1e-12);
    CHECK(std::abs(na - 1.0) <= 1e-12);

    const auto meta = nlohmann::json::parse(a.train.meta);
    CHECK(meta.contains("cos_target"));
  }
  SynthSpec other = *find_preset("LOWSIM");
  other.seed = 7;
  CHECK(gen_clusters(other).train.data != gen_clusters(*find_preset("LOWSIM")).train.data);
}

TEST_CASE("coincident clusters are indistinguishable") {
  SynthSpec spec;
  spec.cos_target = 1.0;
  spec.within_noise = 1e-3;
  spec.n_train_normal = 128;
  const SynthTask t = gen_clusters(spec);
  ProjectorModel m = init_projector(64, 64, 1);
  const Center c = make_center(64, CenterKind::StandardNormal, 1);
  TrainConfig cfg;
  cfg.epochs = 5;
  fit_offline(m, t.train, c, cfg);
  CHECK(evaluate(m, t.test, c.vector, cfg.radius).image_auc == doctest::Approx(0.5).epsilon(0.2));
}
