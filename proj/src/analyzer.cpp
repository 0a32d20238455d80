#include "hyperocc/analyzer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "hyperocc/error.hpp"
#include "hyperocc/metrics.hpp"
#include "hyperocc/rng.hpp"

namespace hyperocc {

namespace {

using Vec = std::vector<double>;

// Mean over the locations of a [D, L] grid.
Vec pool(std::span<const float> grid, std::size_t dim, std::size_t locations) {
  Vec v(dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t l = 0; l < locations; ++l) v[d] += grid[d * locations + l];
    v[d] /= static_cast<double>(locations);
  }
  return v;
}

double norm_of(const Vec& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

// Unit vectors; zero vectors are dropped and counted.
std::vector<Vec> unit_vectors(std::vector<Vec> vs, std::size_t& skipped) {
  std::vector<Vec> out;
  out.reserve(vs.size());
  for (auto& v : vs) {
    const double n = norm_of(v);
    if (!(n > 0.0)) {
      ++skipped;
      continue;
    }
    for (double& x : v) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CrossCosine mean_cross_cosine(std::vector<Vec> a, std::vector<Vec> b, std::uint64_t seed) {
  CrossCosine out;
  const auto ua = unit_vectors(std::move(a), out.skipped_zero);
  const auto ub = unit_vectors(std::move(b), out.skipped_zero);
  if (ua.empty() || ub.empty()) throw Error(ErrorCode::EmptySet, "cross-cosine needs two non-empty groups");
  double sum = 0.0;
  const std::uint64_t total = std::uint64_t{ua.size()} * ub.size();
  if (total <= kMaxExactPairs) {
    for (const auto& x : ua) {
      for (const auto& y : ub) sum += dot(x, y);
    }
    out.pairs = total;
  } else {
    Rng rng(seed, Stream::Subsample);
    for (std::size_t k = 0; k < kMaxExactPairs; ++k) {
      sum += dot(ua[rng.index(ua.size())], ub[rng.index(ub.size())]);
    }
    out.pairs = kMaxExactPairs;
    out.subsampled = true;
  }
  out.mean = sum / static_cast<double>(out.pairs);
  return out;
}

std::vector<Vec> pooled_features(const FeatureSet& set) {
  std::vector<Vec> out;
  out.reserve(set.n_samples);
  for (std::size_t i = 0; i < set.n_samples; ++i) out.push_back(pool(set.sample(i), set.channels, set.locations()));
  return out;
}

std::vector<Vec> pooled_projections(const ProjectorModel& model, const FeatureSet& set) {
  std::vector<Vec> out;
  out.reserve(set.n_samples);
  for (std::size_t i = 0; i < set.n_samples; ++i) {
    const auto z = forward_grid(model, set.sample(i), set.locations());
    out.push_back(pool(z, model.out_dim, set.locations()));
  }
  return out;
}

// Train a fresh projector toward `center` and measure it on `test`.
NormSweepRow run_point(const FeatureSet& train, const FeatureSet& test, const TrainConfig& cfg,
                       const Center& center) {
  ProjectorModel model = init_projector(train.channels, train.channels, cfg.seed);
  fit_offline(model, train, center, cfg);
  const EvalReport report = evaluate(model, test, center.vector, cfg.radius);

  NormSweepRow row;
  row.norm = center.norm;
  row.image_auc = report.image_auc;
  auto [normals, anomalies] = split_by_label(test);
  row.cross_cos_projected =
      mean_cross_cosine(pooled_projections(model, normals), pooled_projections(model, anomalies), cfg.seed).mean;
  double cos_sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : polar_stats(model, anomalies, center.vector)) {
    cos_sum += p.coord.cos_theta;
    ++count;
  }
  row.anom_cos_to_center = count ? cos_sum / static_cast<double>(count) : 0.0;
  return row;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

PolarCoord polar_decompose(std::span<const float> z, std::span<const float> center) {
  if (z.size() != center.size()) throw Error(ErrorCode::DimensionMismatch, "z and center differ in length");
  double zz = 0.0, cc = 0.0, zc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zz += double{z[i]} * z[i];
    cc += double{center[i]} * center[i];
    zc += double{z[i]} * center[i];
  }
  if (!(cc > 0.0)) throw Error(ErrorCode::ZeroCenter, "polar decomposition needs a non-zero center");
  const double r = std::sqrt(zz);
  if (r == 0.0) return {0.0, 0.0};
  return {r, std::clamp(zc / (r * std::sqrt(cc)), -1.0, 1.0)};
}

std::vector<PolarSample> polar_stats(const ProjectorModel& model, const FeatureSet& set,
                                     std::span<const float> center) {
  std::vector<PolarSample> out;
  const auto pooled = pooled_projections(model, set);
  std::vector<float> z(model.out_dim);
  for (std::size_t i = 0; i < set.n_samples; ++i) {
    if (set.label(i) == Label::Unknown) continue;
    std::transform(pooled[i].begin(), pooled[i].end(), z.begin(), [](double x) { return static_cast<float>(x); });
    out.push_back({polar_decompose(z, center), set.label(i)});
  }
  return out;
}

CrossCosine cross_cosine_stats(const FeatureSet& normals, const FeatureSet& anomalies, std::uint64_t seed) {
  if (normals.n_samples == 0 || anomalies.n_samples == 0) {
    throw Error(ErrorCode::EmptySet, "cross-cosine needs two non-empty sets");
  }
  if (normals.channels != anomalies.channels) {
    throw Error(ErrorCode::DimensionMismatch, "sets differ in channel count");
  }
  return mean_cross_cosine(pooled_features(normals), pooled_features(anomalies), seed);
}

NormSweepReport norm_sweep(const FeatureSet& train, const FeatureSet& test, std::span<const double> norms,
                           const TrainConfig& cfg, const Center& center_template, std::size_t jobs) {
  if (norms.empty()) throw Error(ErrorCode::Config, "norm sweep needs at least one norm");
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > 0.0) || (i > 0 && !(norms[i] > norms[i - 1]))) {
      throw Error(ErrorCode::Config, "norms must be positive and strictly increasing");
    }
  }
  NormSweepReport report;
  auto [normals, anomalies] = split_by_label(test);
  report.base_cross_cosine = cross_cosine_stats(normals, anomalies, cfg.seed).mean;
  report.rows.resize(norms.size());
  parallel_for(norms.size(), jobs, [&](std::size_t i) {
    report.rows[i] = run_point(train, test, cfg, set_norm(center_template, norms[i]));
  });
  return report;
}

std::string FeasibleDomain::to_string() const {
  if (empty) return "empty";
  std::ostringstream out;
  out << '[' << lo << ", " << hi << (hi_closed ? ']' : ')');
  return out.str();
}

FeasibleDomain feasible_domain(std::span<const NormSweepRow> rows, double auc_threshold) {
  FeasibleDomain d;
  if (rows.empty() || !(rows.front().image_auc >= auc_threshold)) return d;
  d.empty = false;
  d.lo = rows.front().norm;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].image_auc >= auc_threshold)) {
      d.hi = rows[i].norm;
      d.hi_closed = false;
      return d;
    }
  }
  d.hi = rows.back().norm;
  d.hi_closed = true;
  return d;
}

std::vector<AblationRow> distribution_ablation(const FeatureSet& train, const FeatureSet& test,
                                               std::span<const CenterKind> kinds, const TrainConfig& cfg) {
  std::vector<AblationRow> rows;
  for (CenterKind kind : kinds) {
    const Center center =
        kind == CenterKind::FeatureMean ? feature_mean_center(train) : make_center(train.channels, kind, cfg.seed);
    ProjectorModel model = init_projector(train.channels, train.channels, cfg.seed);
    fit_offline(model, train, center, cfg);
    rows.push_back({kind, evaluate(model, test, center.vector, cfg.radius).image_auc});
  }
  return rows;
}

std::string sweep_csv(const NormSweepReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "norm,image_auc,cross_cos_projected,anom_cos_to_center\n";
  for (const auto& r : report.rows) {
    out << r.norm << ',' << r.image_auc << ',' << r.cross_cos_projected << ',' << r.anom_cos_to_center << '\n';
  }
  return out.str();
}

std::string ablation_csv(std::span<const AblationRow> rows) {
  std::ostringstream out;
  out.precision(17);
  out << "kind,image_auc\n";
  for (const auto& r : rows) out << to_string(r.kind) << ',' << r.image_auc << '\n';
  return out.str();
}

}  // namespace hyperocc
