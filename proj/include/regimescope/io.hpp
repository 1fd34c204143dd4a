#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "regimescope/detect.hpp"
#include "regimescope/fda_stats.hpp"
#include "regimescope/persistence.hpp"
#include "regimescope/sim.hpp"

namespace regimescope::io {

inline constexpr const char* kVersion = "0.1.0";

// ---- configuration files -------------------------------------------------

// Flat key=value text; '#' starts a comment, blank lines ignored. Unknown
// keys are rejected with the offending key named.
sim::SimConfig load_sim_config(const std::string& path);

// ---- snapshot CSV (time_index, particle_id, x, y, interacting) -----------

struct SnapshotData {
  std::vector<PointCloud> clouds;            // one per time index
  std::vector<std::int64_t> times;
  std::vector<std::vector<bool>> interacting;  // parallel to clouds
};

void write_snapshots(const std::string& path, const std::vector<sim::Snapshot>& snapshots,
                     double box_side);
SnapshotData read_snapshots(const std::string& path);

// ---- frames CSV (frame_index, track_id, x, y) ----------------------------

struct FramesData {
  std::vector<PointCloud> clouds;
  std::vector<std::int64_t> times;
  std::vector<std::int64_t> flagged;  // frame indices with fewer than 2 points
};

FramesData load_frames(const std::string& path);

// Either format, distinguished by header: snapshots or frames.
SnapshotData read_clouds(const std::string& path);

// ---- diagram CSV (time_index, dim, birth, death) -------------------------

struct DiagramSeries {
  std::vector<std::int64_t> times;
  std::vector<ph::PersistenceDiagram> diagrams;
};

void write_diagrams(const std::string& path, const DiagramSeries& series);
DiagramSeries read_diagrams(const std::string& path);

// ---- contour CSV (run_id, time_index, eps, value) ------------------------

struct ContourSeries {
  landscape::EpsGrid grid;
  std::vector<std::int64_t> times;
  // values[run][t] is a grid-length curve
  std::vector<std::vector<std::vector<double>>> values;
};

void write_contours(const std::string& path, const ContourSeries& series);
ContourSeries read_contours(const std::string& path);

// ---- landscape CSV (eps, lambda_1..lambda_M) -----------------------------

void write_landscape(const std::string& path, const landscape::Landscape& ls);

// ---- test-curve and transition CSV ---------------------------------------

void write_test_curve(const std::string& path, const stats::TestCurve& curve);
void write_transition(const std::string& path, const detect::TransitionReport& report);

// ---- density normalization -----------------------------------------------

// Rescales into a square of side sqrt(K / target_density) whose lower-left
// corner is the origin; the same transform applied to any point is
// p -> (p - bbox_min) * scale.
struct NormalizeResult {
  PointCloud cloud;
  double scale = 1.0;
  Vec2 offset{0.0, 0.0};  // bbox_min of the input
  double side = 0.0;
};

NormalizeResult normalize_density(const PointCloud& cloud, double target_density);

// ---- pipeline ------------------------------------------------------------

struct RunManifest {
  std::string command;            // simulate | ph | landscape | test | detect
  std::string config_path;
  std::vector<std::string> input_a;
  std::vector<std::string> input_b;
  std::vector<std::string> frames;  // experimental replicates for detect
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;  // a --seed flag overrides the config-file seed
  unsigned threads = 1;
  std::string log_level = "info";

  double alpha_level = 0.05;
  double eps_max = 3.0;
  std::size_t grid_samples = 2001;
  std::size_t m_prime = 5;
  double noise_floor = 0.0;
  std::size_t num_perms = 1000;
  Metric metric = Metric::euclidean;
  int dim = 1;
  std::size_t window = 10;
  double target_density = 0.5;
  std::size_t null_runs = 30;
  std::int64_t time_index = -1;  // test: time to compare; -1 = the only one present
};

// Stable hash of every parameter that shapes the outputs; part of artifact
// file names so distinct configurations never collide.
std::string params_hash(const RunManifest& manifest);

// Executes the command end to end. Returns the process exit code:
// 0 success, 2 configuration error, 3 data error, 4 internal error.
int run_pipeline(const RunManifest& manifest);

}  // namespace regimescope::io
