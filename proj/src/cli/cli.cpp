#include "hyperocc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "../byte_io.hpp"
#include "hyperocc/analyzer.hpp"
#include "hyperocc/center.hpp"
#include "hyperocc/error.hpp"
#include "hyperocc/feature_store.hpp"
#include "hyperocc/metrics.hpp"
#include "hyperocc/model_io.hpp"
#include "hyperocc/scorer.hpp"
#include "hyperocc/synthkit.hpp"
#include "hyperocc/trainer.hpp"
#include "manifest.hpp"

namespace hyperocc::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool ignore_env_seed = false;
};

void write_text(const fs::path& path, const std::string& text) {
  detail::write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<double> parse_norms(const std::string& s) {
  std::vector<double> norms;
  for (const auto& p : split_commas(s)) {
    try {
      norms.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, "bad norm value '" + p + "'");
    }
  }
  if (norms.empty()) throw Error(ErrorCode::Config, "--norms is empty");
  return norms;
}

// ---------------------------------------------------------------------------
// Training options shared by train / sweep / ablate.

struct TrainOptions {
  std::string protocol = "B";
  double radius = 1e-5;
  double lr = 1e-4;
  double weight_decay = 5e-4;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  std::uint64_t seed = kDefaultSeed;
  bool online = false;
  std::string center_dist = "normal";
  double center_norm = 1.0;

  CLI::Option* epochs_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
};

void add_train_options(CLI::App* app, TrainOptions& o, bool with_center) {
  app->add_option("--protocol", o.protocol, "Epoch/batch presets: A (20/64), B (50/16), C (online 1/1)")
      ->check(CLI::IsMember({"A", "B", "C"}))
      ->capture_default_str();
  app->add_option("--radius", o.radius, "Hypersphere radius R")->capture_default_str();
  app->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  app->add_option("--weight-decay", o.weight_decay, "Coupled L2 weight decay on W")->capture_default_str();
  o.epochs_opt = app->add_option("--epochs", o.epochs, "Training epochs (overrides --protocol)");
  o.batch_opt = app->add_option("--batch-size", o.batch_size, "Mini-batch size (overrides --protocol)");
  app->add_option("--seed", o.seed, "Seed for center, init and shuffling (env HYPEROCC_SEED overrides)")
      ->capture_default_str();
  app->add_flag("--online", o.online, "One-pass streaming training, batch size 1");
  if (with_center) {
    app->add_option("--center-dist", o.center_dist, "Center distribution: normal, uniform, ones, feature-mean")
        ->check(CLI::IsMember({"normal", "uniform", "ones", "feature-mean"}))
        ->capture_default_str();
    app->add_option("--center-norm", o.center_norm, "L2 norm of the center")->capture_default_str();
  }
}

std::uint64_t resolve_seed(const Context& ctx, std::uint64_t flag_seed) {
  if (ctx.ignore_env_seed) return flag_seed;
  if (const char* env = std::getenv("HYPEROCC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, std::string("HYPEROCC_SEED is not an integer: ") + env);
    }
  }
  return flag_seed;
}

TrainConfig resolve_config(const Context& ctx, TrainOptions& o) {
  TrainConfig cfg;
  const bool online = o.online || o.protocol == "C";
  std::size_t epochs = o.protocol == "A" ? 20 : 50;
  std::size_t batch = o.protocol == "A" ? 64 : 16;
  if (online) epochs = batch = 1;
  if (o.epochs_opt->count() > 0) epochs = o.epochs;
  if (o.batch_opt->count() > 0) batch = o.batch_size;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.mode = online ? TrainMode::Online : TrainMode::Offline;
  cfg.radius = o.radius;
  cfg.lr = o.lr;
  cfg.weight_decay = o.weight_decay;
  cfg.seed = resolve_seed(ctx, o.seed);
  validate_config(cfg);
  return cfg;
}

void record_train_options(Manifest& m, const TrainOptions& o, const TrainConfig& cfg, bool with_center) {
  m.arg("--protocol", o.protocol);
  m.arg("--radius", cfg.radius);
  m.arg("--lr", cfg.lr);
  m.arg("--weight-decay", cfg.weight_decay);
  m.arg("--epochs", std::uint64_t{cfg.epochs});
  m.arg("--batch-size", std::uint64_t{cfg.batch_size});
  m.arg("--seed", cfg.seed);
  if (cfg.mode == TrainMode::Online) m.switch_flag("--online");
  if (with_center) {
    m.arg("--center-dist", o.center_dist);
    m.arg("--center-norm", o.center_norm);
  }
}

Center resolve_center(const TrainOptions& o, std::size_t dim, std::uint64_t seed, const FeatureSet& train) {
  const auto kind = parse_center_kind(o.center_dist);
  if (!kind) throw Error(ErrorCode::Config, "unknown center distribution " + o.center_dist);
  Center base = *kind == CenterKind::FeatureMean ? feature_mean_center(train) : make_center(dim, *kind, seed);
  return set_norm(base, o.center_norm);
}

// ---------------------------------------------------------------------------
// Data sources for sweep / ablate: a synthetic preset or FOCC files.

struct DataOptions {
  std::string preset;
  std::string train_path;
  std::string test_path;
};

void add_data_options(CLI::App* app, DataOptions& d) {
  app->add_option("--preset", d.preset, "Synthetic preset (LOWSIM, HIGHSIM) instead of files");
  app->add_option("--train", d.train_path, "Training FOCC file (normals)");
  app->add_option("--test", d.test_path, "Labeled test FOCC file");
}

std::pair<FeatureSet, FeatureSet> load_data(const DataOptions& d, Manifest& m) {
  if (!d.preset.empty()) {
    if (!d.train_path.empty() || !d.test_path.empty()) {
      throw Error(ErrorCode::Config, "use either --preset or --train/--test");
    }
    const auto spec = find_preset(d.preset);
    if (!spec) throw Error(ErrorCode::Config, "unknown preset " + d.preset);
    m.arg("--preset", d.preset);
    auto task = gen_clusters(*spec);
    return {std::move(task.train), std::move(task.test)};
  }
  if (d.train_path.empty() || d.test_path.empty()) {
    throw Error(ErrorCode::Config, "need --preset or both --train and --test");
  }
  m.input("--train", d.train_path);
  m.input("--test", d.test_path);
  return {read_focc(d.train_path), read_focc(d.test_path)};
}

std::string default_manifest(const std::string& manifest, const std::string& first_output) {
  return manifest.empty() ? first_output + ".manifest.json" : manifest;
}

// ---------------------------------------------------------------------------
// Subcommands

struct TrainArgs {
  TrainOptions train;
  std::string features;
  std::string out = "model.hocc";
  std::string trace;
  std::string manifest;
  bool prequential = false;
};

int cmd_train(Context& ctx, TrainArgs& a) {
  TrainConfig cfg = resolve_config(ctx, a.train);
  cfg.prequential = a.prequential;
  const std::string trace_path = a.trace.empty() ? a.out + ".trace.csv" : a.trace;
  const std::string manifest_path = default_manifest(a.manifest, a.out);

  Manifest m("train");
  m.input("--features", a.features);
  record_train_options(m, a.train, cfg, true);
  if (a.prequential) m.switch_flag("--prequential");
  m.output("--out", a.out);
  m.output("--trace", trace_path);
  m.output("--manifest", manifest_path);

  const FeatureSet features = read_focc(a.features);
  require_valid(features);
  const Center center = resolve_center(a.train, features.channels, cfg.seed, features);
  ProjectorModel model = init_projector(features.channels, features.channels, cfg.seed);

  TrainTrace trace;
  if (cfg.mode == TrainMode::Online) {
    FeatureSetStream stream(features);
    trace = fit_online(model, stream, center, cfg);
  } else {
    trace = fit_offline(model, features, center, cfg);
  }
  for (const auto& e : trace.collapse_events) {
    ctx.err << "warning: projected batch collapsed to a point (epoch " << e.epoch << ", batch " << e.batch << ")\n";
  }

  save_model({model, center, cfg.radius}, a.out);
  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,mean_loss,spread,collapse_flag\n";
  for (std::size_t e = 0; e < trace.epoch_loss.size(); ++e) {
    csv << e << ',' << trace.epoch_loss[e] << ',' << trace.epoch_spread[e] << ',' << (trace.collapsed_in(e) ? 1 : 0)
        << '\n';
  }
  write_text(trace_path, csv.str());
  if (a.prequential) {
    std::ostringstream pq;
    pq.precision(17);
    pq << "sample_id,score\n";
    for (std::size_t i = 0; i < trace.prequential_scores.size(); ++i) pq << i << ',' << trace.prequential_scores[i] << '\n';
    write_text(trace_path + ".prequential.csv", pq.str());
  }
  m.write(manifest_path);
  ctx.out << "trained " << trace.samples_seen << " sample updates, final loss "
          << (trace.epoch_loss.empty() ? 0.0 : trace.epoch_loss.back()) << ", model " << a.out << "\n";
  return kOk;
}

struct EvalArgs {
  std::string model;
  std::string features;
  std::string out_json = "eval.json";
  std::string out_csv = "eval.csv";
  std::string manifest;
  double sigma = kDefaultSmoothingSigma;
};

int cmd_eval(Context& ctx, EvalArgs& a) {
  const std::string manifest_path = default_manifest(a.manifest, a.out_json);
  Manifest m("eval");
  m.input("--model", a.model);
  m.input("--features", a.features);
  m.arg("--sigma", a.sigma);
  m.output("--out-json", a.out_json);
  m.output("--out-csv", a.out_csv);
  m.output("--manifest", manifest_path);

  const ModelBundle bundle = load_model(a.model);
  const FeatureSet test = read_focc(a.features);
  const EvalReport report = evaluate(bundle.model, test, bundle.center.vector, bundle.radius, {a.sigma});
  const std::string summary = eval_summary_json(report);
  write_text(a.out_json, summary);
  write_text(a.out_csv, eval_csv(report));
  m.write(manifest_path);
  ctx.out << summary;
  return kOk;
}

struct ScoreArgs {
  std::string model;
  std::string features;
  std::string out_csv = "scores.csv";
  std::string maps_dir;
  std::uint32_t map_size = 224;
  double sigma = kDefaultSmoothingSigma;
  std::string manifest;
};

int cmd_score(Context& ctx, ScoreArgs& a) {
  const std::string manifest_path = default_manifest(a.manifest, a.out_csv);
  Manifest m("score");
  m.input("--model", a.model);
  m.input("--features", a.features);
  m.arg("--map-size", std::uint64_t{a.map_size});
  m.arg("--sigma", a.sigma);
  m.output("--out-csv", a.out_csv);
  if (!a.maps_dir.empty()) m.output("--maps-dir", a.maps_dir);
  m.output("--manifest", manifest_path);

  const ModelBundle b = load_model(a.model);
  const FeatureSet set = read_focc(a.features);
  require_valid(set);
  if (set.channels != b.model.in_dim) throw Error(ErrorCode::DimensionMismatch, "features do not match the model");
  if (!a.maps_dir.empty()) fs::create_directories(a.maps_dir);

  std::ostringstream csv;
  csv.precision(17);
  csv << "sample_id,score,is_anomaly\n";
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < set.n_samples; ++i) {
    const auto sample = set.sample(i);
    const Decision d = decide(score_sample(b.model, sample, b.center.vector, b.radius, set.locations()), b.radius);
    flagged += d.is_anomaly;
    csv << i << ',' << d.score << ',' << (d.is_anomaly ? 1 : 0) << '\n';
    if (!a.maps_dir.empty() && set.is_grid()) {
      const ScoreMap map = score_map(b.model, sample, set.height, set.width, b.center.vector, b.radius);
      const std::uint32_t oh = set.masks ? set.masks->height : a.map_size;
      const std::uint32_t ow = set.masks ? set.masks->width : a.map_size;
      const ScoreMap up = upsample_smooth(map, oh, ow, a.sigma);
      const std::string stem = "sample_" + std::to_string(i);
      write_smap(up, fs::path(a.maps_dir) / (stem + ".smap"));
      write_pgm(up, fs::path(a.maps_dir) / (stem + ".pgm"));
    }
  }
  write_text(a.out_csv, csv.str());
  m.write(manifest_path);
  ctx.out << "scored " << set.n_samples << " samples, " << flagged << " beyond radius\n";
  return kOk;
}

struct SweepArgs {
  TrainOptions train;
  DataOptions data;
  std::string norms = "1,4,8,16,32";
  std::string out = "sweep.csv";
  std::string manifest;
  double threshold = -1.0;
  std::size_t jobs = 1;
};

int cmd_sweep(Context& ctx, SweepArgs& a) {
  const TrainConfig cfg = resolve_config(ctx, a.train);
  if (cfg.mode != TrainMode::Offline) throw Error(ErrorCode::Config, "sweep trains offline");
  const auto norms = parse_norms(a.norms);
  const std::string manifest_path = default_manifest(a.manifest, a.out);
  Manifest m("sweep");
  auto [train, test] = load_data(a.data, m);
  record_train_options(m, a.train, cfg, true);
  m.arg("--norms", a.norms);
  if (a.threshold >= 0.0) m.arg("--threshold", a.threshold);
  m.arg("--jobs", std::uint64_t{a.jobs});
  m.output("--out", a.out);
  m.output("--manifest", manifest_path);

  const Center tmpl = resolve_center(a.train, train.channels, cfg.seed, train);
  const NormSweepReport report = norm_sweep(train, test, norms, cfg, tmpl, a.jobs);
  write_text(a.out, sweep_csv(report));
  m.write(manifest_path);
  ctx.out << "base cross-cosine " << report.base_cross_cosine << "\n" << sweep_csv(report);
  if (a.threshold >= 0.0) {
    ctx.out << "feasible norm domain (AUC >= " << a.threshold << "): "
            << feasible_domain(report.rows, a.threshold).to_string() << "\n";
  }
  return kOk;
}

struct AblateArgs {
  TrainOptions train;
  DataOptions data;
  std::string kinds = "feature-mean,normal,uniform,ones";
  std::string out = "ablate.csv";
  std::string manifest;
};

int cmd_ablate(Context& ctx, AblateArgs& a) {
  const TrainConfig cfg = resolve_config(ctx, a.train);
  if (cfg.mode != TrainMode::Offline) throw Error(ErrorCode::Config, "ablate trains offline");
  std::vector<CenterKind> kinds;
  for (const auto& k : split_commas(a.kinds)) {
    const auto kind = parse_center_kind(k);
    if (!kind) throw Error(ErrorCode::Config, "unknown center kind " + k);
    kinds.push_back(*kind);
  }
  const std::string manifest_path = default_manifest(a.manifest, a.out);
  Manifest m("ablate");
  auto [train, test] = load_data(a.data, m);
  record_train_options(m, a.train, cfg, false);
  m.arg("--kinds", a.kinds);
  m.output("--out", a.out);
  m.output("--manifest", manifest_path);

  const auto rows = distribution_ablation(train, test, kinds, cfg);
  write_text(a.out, ablation_csv(rows));
  m.write(manifest_path);
  ctx.out << ablation_csv(rows);
  return kOk;
}

struct AnalyzeArgs {
  std::string normals;
  std::string anomalies;
  std::string features;
  std::string out;
  std::string manifest;
  std::uint64_t seed = kDefaultSeed;
};

int cmd_analyze(Context& ctx, AnalyzeArgs& a) {
  Manifest m("analyze");
  FeatureSet normals, anomalies;
  if (!a.features.empty()) {
    if (!a.normals.empty() || !a.anomalies.empty()) {
      throw Error(ErrorCode::Config, "use either --features or --normals/--anomalies");
    }
    m.input("--features", a.features);
    std::tie(normals, anomalies) = split_by_label(read_focc(a.features));
  } else {
    if (a.normals.empty() || a.anomalies.empty()) {
      throw Error(ErrorCode::Config, "need --features or both --normals and --anomalies");
    }
    m.input("--normals", a.normals);
    m.input("--anomalies", a.anomalies);
    normals = read_focc(a.normals);
    anomalies = read_focc(a.anomalies);
  }
  const std::uint64_t seed = resolve_seed(ctx, a.seed);
  m.arg("--seed", seed);
  const CrossCosine cc = cross_cosine_stats(normals, anomalies, seed);
  if (cc.skipped_zero > 0) ctx.err << "warning: skipped " << cc.skipped_zero << " zero-norm samples\n";
  const std::string out = a.out.empty() ? "analyze.csv" : a.out;
  const std::string manifest_path = default_manifest(a.manifest, out);
  m.output("--out", out);
  m.output("--manifest", manifest_path);
  std::ostringstream csv;
  csv.precision(17);
  csv << "mean_cross_cosine,pairs,skipped_zero,subsampled\n"
      << cc.mean << ',' << cc.pairs << ',' << cc.skipped_zero << ',' << (cc.subsampled ? 1 : 0) << '\n';
  write_text(out, csv.str());
  m.write(manifest_path);
  std::ostringstream line;
  line.precision(6);
  line << cc.mean << "\n";
  ctx.out << line.str();
  return kOk;
}

struct SynthArgs {
  std::string preset;
  std::string out = "synth_train.focc,synth_test.focc";
  std::string manifest;
  SynthSpec spec;
};

int cmd_synth(Context& ctx, SynthArgs& a, CLI::App* app) {
  SynthSpec spec = a.spec;
  if (!a.preset.empty()) {
    const auto p = find_preset(a.preset);
    if (!p) throw Error(ErrorCode::Config, "unknown preset " + a.preset);
    spec = *p;
    for (const char* flag : {"--dim", "--n-train", "--n-test-normal", "--n-test-anomaly", "--cos", "--noise"}) {
      if (app->count(flag) > 0) throw Error(ErrorCode::Config, std::string(flag) + " conflicts with --preset");
    }
    if (app->count("--seed") > 0) spec.seed = a.spec.seed;
  }
  spec.seed = resolve_seed(ctx, spec.seed);
  const auto outs = split_commas(a.out);
  if (outs.size() != 2) throw Error(ErrorCode::Config, "--out needs two comma-separated paths (train,test)");
  const std::string manifest_path = default_manifest(a.manifest, outs[0]);

  Manifest m("synth");
  m.arg("--dim", std::uint64_t{spec.dim});
  m.arg("--n-train", std::uint64_t{spec.n_train_normal});
  m.arg("--n-test-normal", std::uint64_t{spec.n_test_normal});
  m.arg("--n-test-anomaly", std::uint64_t{spec.n_test_anomaly});
  m.arg("--cos", spec.cos_target);
  m.arg("--noise", spec.within_noise);
  m.arg("--seed", spec.seed);
  m.output("--out", a.out);
  m.output("--manifest", manifest_path);

  const SynthTask task = gen_clusters(spec);
  write_focc(task.train, outs[0]);
  write_focc(task.test, outs[1]);
  m.write(manifest_path);
  ctx.out << "wrote " << outs[0] << " (" << task.train.n_samples << " samples) and " << outs[1] << " ("
          << task.test.n_samples << " samples)\n";
  return kOk;
}

int run_parsed(const std::vector<std::string>& args, Context& ctx);

int cmd_replay(Context& ctx, const std::string& manifest_path, const std::string& out_dir) {
  nlohmann::json j;
  try {
    std::ifstream in(manifest_path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + manifest_path);
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);
  Context replay_ctx{ctx.out, ctx.err, true};
  return run_parsed(replay_args(j, out_dir), replay_ctx);
}

int run_parsed(const std::vector<std::string>& args, Context& ctx) {
  CLI::App app{"hyperocc: one-class anomaly detection with a data-agnostic hypersphere center"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a projector on normal features");
  t->add_option("--features", train.features, "FOCC file of normal training features")->required();
  t->add_option("--out", train.out, "Model file to write")->capture_default_str();
  t->add_option("--trace", train.trace, "Trace CSV (default <out>.trace.csv)");
  t->add_option("--manifest", train.manifest, "Manifest path (default <out>.manifest.json)");
  t->add_flag("--prequential", train.prequential, "Online: record each sample's score before its update");
  add_train_options(t, train.train, true);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Image (and pixel) ROC AUC of a model on labeled features");
  e->add_option("--model", eval.model, "Model file")->required();
  e->add_option("--features", eval.features, "Labeled test FOCC file")->required();
  e->add_option("--out-json", eval.out_json, "Summary JSON")->capture_default_str();
  e->add_option("--out-csv", eval.out_csv, "Per-sample scores CSV")->capture_default_str();
  e->add_option("--sigma", eval.sigma, "Gaussian blur for pixel maps")->capture_default_str();
  e->add_option("--manifest", eval.manifest, "Manifest path (default <out-json>.manifest.json)");

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "Score samples and export anomaly maps");
  s->add_option("--model", score.model, "Model file")->required();
  s->add_option("--features", score.features, "FOCC file to score")->required();
  s->add_option("--out-csv", score.out_csv, "Scores CSV")->capture_default_str();
  s->add_option("--maps-dir", score.maps_dir, "Write SMAP + PGM maps for grid features here");
  s->add_option("--map-size", score.map_size, "Map side length when no masks are present")->capture_default_str();
  s->add_option("--sigma", score.sigma, "Gaussian blur for maps")->capture_default_str();
  s->add_option("--manifest", score.manifest, "Manifest path");

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Train and evaluate across center norms");
  add_data_options(sw, sweep.data);
  add_train_options(sw, sweep.train, true);
  sw->add_option("--norms", sweep.norms, "Comma-separated, strictly increasing")->capture_default_str();
  sw->add_option("--threshold", sweep.threshold, "Report the feasible norm domain for this AUC");
  sw->add_option("--jobs", sweep.jobs, "Parallel sweep points")->capture_default_str();
  sw->add_option("--out", sweep.out, "Sweep CSV")->capture_default_str();
  sw->add_option("--manifest", sweep.manifest, "Manifest path");

  AblateArgs ablate;
  auto* ab = app.add_subcommand("ablate", "Compare center distributions at norm 1");
  add_data_options(ab, ablate.data);
  add_train_options(ab, ablate.train, false);
  ab->add_option("--kinds", ablate.kinds, "Comma-separated center kinds")->capture_default_str();
  ab->add_option("--out", ablate.out, "Ablation CSV")->capture_default_str();
  ab->add_option("--manifest", ablate.manifest, "Manifest path");

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Mean cosine similarity between normal and anomalous features");
  an->add_option("--normals", analyze.normals, "FOCC of normal features");
  an->add_option("--anomalies", analyze.anomalies, "FOCC of anomalous features");
  an->add_option("--features", analyze.features, "Single labeled FOCC, split by label");
  an->add_option("--seed", analyze.seed, "Seed for pair subsampling")->capture_default_str();
  an->add_option("--out", analyze.out, "Result CSV (default analyze.csv)");
  an->add_option("--manifest", analyze.manifest, "Manifest path");

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Generate synthetic two-cluster feature files");
  sy->add_option("--preset", synth.preset, "LOWSIM or HIGHSIM");
  sy->add_option("--out", synth.out, "train.focc,test.focc")->capture_default_str();
  sy->add_option("--dim", synth.spec.dim, "Feature dimension")->capture_default_str();
  sy->add_option("--n-train", synth.spec.n_train_normal, "Training normals")->capture_default_str();
  sy->add_option("--n-test-normal", synth.spec.n_test_normal, "Test normals")->capture_default_str();
  sy->add_option("--n-test-anomaly", synth.spec.n_test_anomaly, "Test anomalies")->capture_default_str();
  sy->add_option("--cos", synth.spec.cos_target, "Cosine between cluster directions")->capture_default_str();
  sy->add_option("--noise", synth.spec.within_noise, "Per-component noise std")->capture_default_str();
  sy->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  sy->add_option("--manifest", synth.manifest, "Manifest path");

  std::string replay_manifest, replay_out_dir;
  auto* rp = app.add_subcommand("replay", "Re-run a command exactly from its manifest");
  rp->add_option("manifest", replay_manifest, "Manifest JSON")->required();
  rp->add_option("--out-dir", replay_out_dir, "Redirect all outputs into this directory");

  std::vector<std::string> argv_storage{"hyperocc"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, ctx.out, ctx.err);
    return code == 0 ? kOk : kConfig;
  }

  if (t->parsed()) return cmd_train(ctx, train);
  if (e->parsed()) return cmd_eval(ctx, eval);
  if (s->parsed()) return cmd_score(ctx, score);
  if (sw->parsed()) return cmd_sweep(ctx, sweep);
  if (ab->parsed()) return cmd_ablate(ctx, ablate);
  if (an->parsed()) return cmd_analyze(ctx, analyze);
  if (sy->parsed()) return cmd_synth(ctx, synth, sy);
  if (rp->parsed()) return cmd_replay(ctx, replay_manifest, replay_out_dir);
  return kConfig;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  try {
    return run_parsed(args, ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(error_class(e.code()));
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace hyperocc::cli
