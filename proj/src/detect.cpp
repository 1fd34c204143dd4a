#include "regimescope/detect.hpp"

#include <algorithm>
#include <cmath>

#include "regimescope/filtration.hpp"
#include "regimescope/persistence.hpp"

namespace regimescope::detect {

namespace {

constexpr std::uint64_t kStreamTimeTest = 0x74696d65ULL;
constexpr std::uint64_t kStreamSeriesRun = 0x73657269ULL;
constexpr std::uint64_t kStreamNullRun = 0x6e756c6cULL;

}  // namespace

void SnapshotSeries::validate() const {
  if (runs.empty()) throw DataError("snapshot series has no runs");
  if (times.empty()) throw DataError("snapshot series has no time indices");
  for (const auto& run : runs) {
    if (run.size() != times.size())
      throw DataError("snapshot series run length does not match the time indices");
  }
}

void CompareParams::validate() const {
  grid().validate();
  if (dim != 0 && dim != 1) throw ConfigError("dim must be 0 or 1");
  if (m_prime < 1) throw ConfigError("m_prime must be >= 1");
  if (noise_floor < 0.0) throw ConfigError("noise_floor must be >= 0");
  if (num_perms < 100) throw ConfigError("num_perms must be >= 100");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw ConfigError("alpha_level must be in (0, 1)");
  if (window < 1) throw ConfigError("window must be >= 1");
}

std::vector<std::vector<std::vector<double>>> contour_curves(const SnapshotSeries& series,
                                                             const CompareParams& params) {
  series.validate();
  params.validate();
  const landscape::EpsGrid grid = params.grid();
  const std::size_t s_runs = series.runs.size();
  const std::size_t t_count = series.times.size();

  std::vector<std::vector<std::vector<double>>> curves(
      s_runs, std::vector<std::vector<double>>(t_count));
  parallel_for(s_runs * t_count, params.threads, [&](std::size_t job) {
    const std::size_t s = job / t_count;
    const std::size_t t = job % t_count;
    const auto complex =
        ph::vr_filtration(series.runs[s][t], {params.eps_max, params.metric});
    const auto diagram = ph::persistence(complex);
    const auto ls = landscape::build_landscape(diagram, params.dim, grid, params.noise_floor);
    curves[s][t] = landscape::contour(ls, params.m_prime).values;
  });
  return curves;
}

TransitionReport compare_curves(const std::vector<std::vector<std::vector<double>>>& curves_a,
                                const std::vector<std::vector<std::vector<double>>>& curves_b,
                                const std::vector<std::int64_t>& times,
                                const CompareParams& params, std::uint64_t seed) {
  params.validate();
  if (curves_a.size() < 2 || curves_b.size() < 2)
    throw DataError("comparison needs at least 2 runs per series");
  for (const auto* curves : {&curves_a, &curves_b}) {
    for (const auto& run : *curves) {
      if (run.size() != times.size())
        throw DataError("curve run length does not match the time indices");
    }
  }

  TransitionReport report;
  report.times = times;
  report.alpha_level = params.alpha_level;
  report.sustained_window = params.window;
  report.min_adjusted_p.assign(times.size(), 1.0);

  for (std::size_t t = 0; t < times.size(); ++t) {
    stats::ContourSample sample;
    sample.grid = params.grid();
    sample.group_a.reserve(curves_a.size());
    sample.group_b.reserve(curves_b.size());
    for (const auto& run : curves_a) sample.group_a.push_back(run[t]);
    for (const auto& run : curves_b) sample.group_b.push_back(run[t]);
    const auto curve = stats::global_test(sample, params.num_perms,
                                          derive_seed(seed, kStreamTimeTest, t), params.threads);
    report.min_adjusted_p[t] = curve.global_p;
  }

  report.transition_interval =
      infer_transition(report.times, report.min_adjusted_p, params.alpha_level, params.window);
  return report;
}

TransitionReport compare_series(const SnapshotSeries& a, const SnapshotSeries& b,
                                const CompareParams& params, std::uint64_t seed) {
  a.validate();
  b.validate();
  if (a.times != b.times) throw DataError("series time indices do not match");
  if (a.runs.size() < 2 || b.runs.size() < 2)
    throw DataError("comparison needs at least 2 runs per series");
  const auto curves_a = contour_curves(a, params);
  const auto curves_b = contour_curves(b, params);
  return compare_curves(curves_a, curves_b, a.times, params, seed);
}

std::optional<std::pair<std::int64_t, std::int64_t>> infer_transition(
    const std::vector<std::int64_t>& times, const std::vector<double>& min_adjusted_p,
    double alpha_level, std::size_t window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  if (times.size() != min_adjusted_p.size())
    throw DataError("times and p-values have different lengths");
  const std::size_t t_count = times.size();
  for (std::size_t i = 0; i + window <= t_count; ++i) {
    bool sustained = true;
    for (std::size_t j = i; j < i + window; ++j) {
      if (!(min_adjusted_p[j] <= alpha_level)) {
        sustained = false;
        break;
      }
    }
    if (!sustained) continue;
    std::size_t end = i + window - 1;
    while (end + 1 < t_count && min_adjusted_p[end + 1] <= alpha_level) ++end;
    return std::make_pair(times[i], times[end]);
  }
  return std::nullopt;
}

SnapshotSeries simulate_series(const std::string& label, sim::SimConfig cfg, std::size_t s_runs,
                               std::uint64_t seed) {
  if (s_runs < 1) throw ConfigError("series needs at least 1 run");
  SnapshotSeries series;
  series.label = label;
  series.runs.resize(s_runs);
  for (std::size_t s = 0; s < s_runs; ++s) {
    cfg.seed = derive_seed(seed, kStreamSeriesRun, s);
    const auto snapshots = sim::run_simulation(cfg);
    std::vector<PointCloud> clouds;
    clouds.reserve(snapshots.size());
    std::vector<std::int64_t> times;
    times.reserve(snapshots.size());
    for (const auto& snap : snapshots) {
      clouds.push_back(snap.positions);
      times.push_back(static_cast<std::int64_t>(snap.time_index));
    }
    if (s == 0) {
      series.times = std::move(times);
    } else if (series.times != times) {
      throw DataError("simulation runs produced different time indices");
    }
    series.runs[s] = std::move(clouds);
  }
  return series;
}

sim::SimConfig null_model_config() {
  sim::SimConfig cfg;
  cfg.alpha = 0.09;
  cfg.beta = 0.024;
  return cfg;
}

SnapshotSeries matched_null_series(const std::vector<PointCloud>& observed,
                                   const std::vector<std::int64_t>& times, std::size_t s_runs,
                                   std::uint64_t seed, sim::SimConfig cfg) {
  if (observed.empty()) throw DataError("matched null needs at least one observed frame");
  if (observed.size() != times.size())
    throw DataError("observed frames and time indices have different lengths");
  const PointCloud& first = observed.front();
  if (first.size() < 2) throw DataError("observed first frame has fewer than 2 points");
  if (s_runs < 2) throw DataError("matched null needs at least 2 runs");

  cfg.num_particles = first.size();
  cfg.num_steps = (observed.size() - 1) * cfg.snapshot_stride;
  if (first.domain) cfg.box_side = first.domain->side;
  cfg.validate();
  std::vector<Vec2> start;
  start.reserve(first.size());
  for (const Vec2 p : first.points) {
    if (!(p.x >= 0.0) || !(p.y >= 0.0) || !(p.x <= cfg.box_side) || !(p.y <= cfg.box_side))
      throw DataError("observed first-frame positions fall outside the null-model box");
    // In the periodic box, a coordinate at exactly box_side is position 0.
    start.push_back({p.x == cfg.box_side ? 0.0 : p.x, p.y == cfg.box_side ? 0.0 : p.y});
  }

  SnapshotSeries series;
  series.label = "matched-null";
  series.times = times;
  series.runs.resize(s_runs);
  for (std::size_t s = 0; s < s_runs; ++s) {
    cfg.seed = derive_seed(seed, kStreamNullRun, s);
    sim::ParticleState state = sim::random_initial_state(cfg);
    state.positions = start;
    const auto snapshots = sim::run_simulation(cfg, state);
    if (snapshots.size() != times.size())
      throw DataError("null-model snapshot count does not match the observed frames");
    std::vector<PointCloud> clouds;
    clouds.reserve(snapshots.size());
    for (const auto& snap : snapshots) clouds.push_back(snap.positions);
    series.runs[s] = std::move(clouds);
  }
  return series;
}

}  // namespace regimescope::detect
