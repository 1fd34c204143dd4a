#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regimescope/fda_stats.hpp"
#include "regimescope/sim.hpp"

namespace regimescope::detect {

// S independent runs sharing one list of time indices; runs[s][t] is the
// point cloud of run s at times[t].
struct SnapshotSeries {
  std::string label;
  std::vector<std::vector<PointCloud>> runs;
  std::vector<std::int64_t> times;

  void validate() const;  // shape consistency; comparisons also require >= 2 runs
};

// Per-time minimum adjusted p-values and the inferred transition interval.
struct TransitionReport {
  std::vector<std::int64_t> times;
  std::vector<double> min_adjusted_p;
  double alpha_level = 0.05;
  std::size_t sustained_window = 10;
  std::optional<std::pair<std::int64_t, std::int64_t>> transition_interval;
};

// Parameters shared by every per-time comparison in one detection run.
struct CompareParams {
  double eps_max = 3.0;
  std::size_t grid_samples = 2001;
  Metric metric = Metric::euclidean;
  int dim = 1;
  std::size_t m_prime = 5;
  double noise_floor = 0.0;
  std::size_t num_perms = 1000;
  double alpha_level = 0.05;
  std::size_t window = 10;
  unsigned threads = 1;

  landscape::EpsGrid grid() const { return {eps_max, grid_samples}; }
  void validate() const;
};

// Contour values per run per time: result[s][t] is a grid-length vector.
// Computing these once per series lets several comparisons share them.
std::vector<std::vector<std::vector<double>>> contour_curves(const SnapshotSeries& series,
                                                             const CompareParams& params);

TransitionReport compare_curves(const std::vector<std::vector<std::vector<double>>>& curves_a,
                                const std::vector<std::vector<std::vector<double>>>& curves_b,
                                const std::vector<std::int64_t>& times,
                                const CompareParams& params, std::uint64_t seed);

// Per-time global tests between the two series' contour groups. Requires
// matching time indices and at least 2 runs on both sides.
TransitionReport compare_series(const SnapshotSeries& a, const SnapshotSeries& b,
                                const CompareParams& params, std::uint64_t seed);

// First time index opening a run of `window` consecutive indices with
// p <= alpha_level, together with the last index of the maximal such run.
std::optional<std::pair<std::int64_t, std::int64_t>> infer_transition(
    const std::vector<std::int64_t>& times, const std::vector<double>& min_adjusted_p,
    double alpha_level, std::size_t window);

// S runs of the model under one config; run s gets a seed derived from
// (seed, s) and the snapshot time indices become the series times.
SnapshotSeries simulate_series(const std::string& label, sim::SimConfig cfg, std::size_t s_runs,
                               std::uint64_t seed);

// Disordered-regime parameters for the matched random null.
sim::SimConfig null_model_config();

// S null-model simulations, each started from the observed first-frame
// positions (headings and tumble offsets drawn per run) and evolved over the
// observed duration, one snapshot per observed frame.
SnapshotSeries matched_null_series(const std::vector<PointCloud>& observed,
                                   const std::vector<std::int64_t>& times, std::size_t s_runs,
                                   std::uint64_t seed, sim::SimConfig cfg = null_model_config());

}  // namespace regimescope::detect
