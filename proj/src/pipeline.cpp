#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "regimescope/filtration.hpp"
#include "regimescope/io.hpp"
#include "regimescope/landscape.hpp"
#include "regimescope/persistence.hpp"

namespace regimescope::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string canonical_params(const RunManifest& m) {
  std::ostringstream os;
  os << "command=" << m.command << ";config=" << m.config_path << ";seed=" << m.seed
     << ";alpha_level=" << format_double(m.alpha_level) << ";eps_max=" << format_double(m.eps_max)
     << ";grid=" << m.grid_samples << ";m_prime=" << m.m_prime
     << ";noise_floor=" << format_double(m.noise_floor) << ";perms=" << m.num_perms
     << ";metric=" << metric_name(m.metric) << ";dim=" << m.dim << ";window=" << m.window
     << ";density=" << format_double(m.target_density) << ";null_runs=" << m.null_runs
     << ";time=" << m.time_index;
  for (const auto& p : m.input_a) os << ";a=" << p;
  for (const auto& p : m.input_b) os << ";b=" << p;
  for (const auto& p : m.frames) os << ";frames=" << p;
  return os.str();
}

bool verbose(const RunManifest& m) { return m.log_level != "quiet"; }

void note(const RunManifest& m, const std::string& msg) {
  if (verbose(m)) std::cerr << "[regimescope] " << msg << "\n";
}

detect::CompareParams compare_params(const RunManifest& m, unsigned threads) {
  detect::CompareParams params;
  params.eps_max = m.eps_max;
  params.grid_samples = m.grid_samples;
  params.metric = m.metric;
  params.dim = m.dim;
  params.m_prime = m.m_prime;
  params.noise_floor = m.noise_floor;
  params.num_perms = m.num_perms;
  params.alpha_level = m.alpha_level;
  params.window = m.window;
  params.threads = threads;
  params.validate();
  return params;
}

std::string artifact_path(const RunManifest& m, const std::string& name) {
  const std::string stem =
      m.command + "_" + std::to_string(m.seed) + "_" + params_hash(m) + "_" + name;
  return (fs::path(m.output_dir) / stem).string();
}

void require_single_input(const RunManifest& m) {
  if (m.input_a.size() != 1)
    throw ConfigError(m.command + " requires exactly one input file (got " +
                      std::to_string(m.input_a.size()) + ")");
}

std::vector<std::string> cmd_simulate(RunManifest& m, unsigned threads) {
  (void)threads;
  if (m.config_path.empty()) throw ConfigError("simulate requires --config");
  sim::SimConfig cfg = load_sim_config(m.config_path);
  if (m.seed_given)
    cfg.seed = m.seed;
  else
    m.seed = cfg.seed;  // artifact names carry the seed actually used
  note(m, "simulating " + std::to_string(cfg.num_particles) + " particles for " +
              std::to_string(cfg.num_steps) + " steps");
  const auto snapshots = sim::run_simulation(cfg);
  const std::string path = artifact_path(m, "snapshots.csv");
  write_snapshots(path, snapshots, cfg.box_side);
  return {path};
}

std::vector<std::string> cmd_ph(const RunManifest& m, unsigned threads) {
  require_single_input(m);
  const SnapshotData data = read_clouds(m.input_a.front());
  const ph::FiltrationParams params{m.eps_max, m.metric};
  params.validate();

  DiagramSeries series;
  series.times = data.times;
  series.diagrams.resize(data.clouds.size());
  parallel_for(data.clouds.size(), threads, [&](std::size_t t) {
    series.diagrams[t] = ph::persistence(ph::vr_filtration(data.clouds[t], params));
  });
  const std::string path = artifact_path(m, "diagrams.csv");
  write_diagrams(path, series);
  return {path};
}

std::vector<std::string> cmd_landscape(const RunManifest& m, unsigned threads) {
  require_single_input(m);
  const DiagramSeries series = read_diagrams(m.input_a.front());
  const landscape::EpsGrid grid{m.eps_max, m.grid_samples};
  grid.validate();

  ContourSeries contours;
  contours.grid = grid;
  contours.times = series.times;
  contours.values.assign(1, std::vector<std::vector<double>>(series.times.size()));
  std::vector<landscape::Landscape> landscapes(series.times.size());
  parallel_for(series.times.size(), threads, [&](std::size_t t) {
    landscapes[t] = landscape::build_landscape(series.diagrams[t], m.dim, grid, m.noise_floor);
    contours.values[0][t] = landscape::contour(landscapes[t], m.m_prime).values;
  });
  const std::string contours_path = artifact_path(m, "contours.csv");
  write_contours(contours_path, contours);
  std::vector<std::string> artifacts{contours_path};
  if (series.times.size() == 1) {
    const std::string ls_path = artifact_path(m, "landscape.csv");
    write_landscape(ls_path, landscapes.front());
    artifacts.push_back(ls_path);
  }
  return artifacts;
}

std::vector<std::string> cmd_test(const RunManifest& m, unsigned threads) {
  if (m.input_a.size() < 2 || m.input_b.size() < 2)
    throw ConfigError("test requires at least 2 contour files per group (--a and --b)");

  auto gather = [&](const std::vector<std::string>& paths, landscape::EpsGrid* grid,
                    std::int64_t* time) {
    std::vector<std::vector<double>> curves;
    for (const auto& path : paths) {
      const ContourSeries series = read_contours(path);
      if (grid->num_samples == 0) {
        *grid = series.grid;
      } else if (!(series.grid == *grid)) {
        throw DataError(path + ": contour grid differs from the other inputs");
      }
      std::size_t t_pos = 0;
      if (m.time_index >= 0) {
        const auto it = std::find(series.times.begin(), series.times.end(), m.time_index);
        if (it == series.times.end())
          throw DataError(path + ": time index " + std::to_string(m.time_index) + " not present");
        t_pos = static_cast<std::size_t>(it - series.times.begin());
      } else if (series.times.size() != 1) {
        throw ConfigError(path + ": several time indices present; pass --time");
      }
      if (*time == std::numeric_limits<std::int64_t>::min()) *time = series.times[t_pos];
      for (const auto& run : series.values) curves.push_back(run[t_pos]);
    }
    return curves;
  };

  stats::ContourSample sample;
  sample.grid = landscape::EpsGrid{0.0, 0};
  std::int64_t time = std::numeric_limits<std::int64_t>::min();
  sample.group_a = gather(m.input_a, &sample.grid, &time);
  sample.group_b = gather(m.input_b, &sample.grid, &time);
  note(m, "testing " + std::to_string(sample.group_a.size()) + " vs " +
              std::to_string(sample.group_b.size()) + " curves at time " + std::to_string(time));
  const auto curve = stats::global_test(sample, m.num_perms, m.seed, threads);
  const std::string path = artifact_path(m, "test_curve.csv");
  write_test_curve(path, curve);
  return {path};
}

detect::SnapshotSeries series_from_files(const std::vector<std::string>& paths,
                                         const std::string& label) {
  detect::SnapshotSeries series;
  series.label = label;
  for (const auto& path : paths) {
    SnapshotData data = read_clouds(path);
    if (series.runs.empty()) {
      series.times = data.times;
    } else if (series.times != data.times) {
      throw DataError(path + ": time indices differ from the other runs");
    }
    series.runs.push_back(std::move(data.clouds));
  }
  return series;
}

std::vector<std::string> cmd_detect(const RunManifest& m, unsigned threads) {
  const auto params = compare_params(m, threads);
  detect::TransitionReport report;

  if (!m.frames.empty()) {
    if (m.frames.size() < 2)
      throw DataError(
          "experiment-vs-null detection needs at least 2 --frames replicates for the rank test");
    detect::SnapshotSeries experiment;
    experiment.label = "experiment";
    for (const auto& path : m.frames) {
      FramesData frames = load_frames(path);
      for (const std::int64_t f : frames.flagged)
        note(m, path + ": frame " + std::to_string(f) + " has fewer than 2 points");
      if (frames.clouds.front().size() < 2)
        throw DataError(path + ": first frame has fewer than 2 points");
      // One transform per replicate, fixed by its first frame.
      const NormalizeResult norm = normalize_density(frames.clouds.front(), m.target_density);
      std::vector<PointCloud> clouds;
      clouds.reserve(frames.clouds.size());
      for (const auto& cloud : frames.clouds) {
        PointCloud scaled;
        scaled.points.reserve(cloud.size());
        for (const Vec2 p : cloud.points)
          scaled.points.push_back(
              {(p.x - norm.offset.x) * norm.scale, (p.y - norm.offset.y) * norm.scale});
        scaled.domain = norm.cloud.domain;
        clouds.push_back(std::move(scaled));
      }
      if (experiment.runs.empty()) {
        experiment.times = frames.times;
      } else if (experiment.times != frames.times) {
        throw DataError(path + ": frame indices differ from the other replicates");
      }
      experiment.runs.push_back(std::move(clouds));
    }
    sim::SimConfig null_cfg =
        m.config_path.empty() ? detect::null_model_config() : load_sim_config(m.config_path);
    const auto null_series = detect::matched_null_series(
        experiment.runs.front(), experiment.times, m.null_runs, m.seed, null_cfg);
    note(m, "comparing " + std::to_string(experiment.runs.size()) + " replicates against " +
                std::to_string(null_series.runs.size()) + " null runs");
    report = detect::compare_series(experiment, null_series, params, m.seed);
  } else {
    if (m.input_a.size() < 2 || m.input_b.size() < 2)
      throw ConfigError("detect requires at least 2 snapshot files per series (--a and --b)");
    const auto series_a = series_from_files(m.input_a, "series-a");
    const auto series_b = series_from_files(m.input_b, "series-b");
    note(m, "comparing " + std::to_string(series_a.runs.size()) + " vs " +
                std::to_string(series_b.runs.size()) + " runs over " +
                std::to_string(series_a.times.size()) + " time indices");
    report = detect::compare_series(series_a, series_b, params, m.seed);
  }

  const std::string path = artifact_path(m, "transition.csv");
  write_transition(path, report);
  return {path};
}

}  // namespace

std::string params_hash(const RunManifest& manifest) {
  const std::string s = canonical_params(manifest);
  // FNV-1a, 64-bit; stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 8);  // 8 hex chars are plenty for name collisions
}

int run_pipeline(const RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m = manifest;
  try {
    const unsigned threads = resolve_threads(m.threads);
    fs::create_directories(m.output_dir);

    std::vector<std::string> artifacts;
    if (m.command == "simulate") {
      artifacts = cmd_simulate(m, threads);
    } else if (m.command == "ph") {
      artifacts = cmd_ph(m, threads);
    } else if (m.command == "landscape") {
      artifacts = cmd_landscape(m, threads);
    } else if (m.command == "test") {
      artifacts = cmd_test(m, threads);
    } else if (m.command == "detect") {
      artifacts = cmd_detect(m, threads);
    } else {
      throw ConfigError("unknown command '" + m.command + "'");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json summary;
    summary["command"] = m.command;
    summary["version"] = kVersion;
    summary["seed"] = m.seed;
    summary["threads"] = threads;
    summary["params"] = canonical_params(m);
    summary["artifacts"] = artifacts;
    summary["wall_time_seconds"] = wall;
    std::ofstream out(artifact_path(m, "summary.json"));
    out << summary.dump(2) << "\n";

    for (const auto& a : artifacts) note(m, "wrote " + a);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace regimescope::io
