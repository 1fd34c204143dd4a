#pragma once

#include <cstdint>
#include <vector>

#include "regimescope/landscape.hpp"

namespace regimescope::stats {

// Two groups of contour curves sampled on one shared grid. Curves hold the
// sampled values only; group sizes may differ.
struct ContourSample {
  landscape::EpsGrid grid;
  std::vector<std::vector<double>> group_a;
  std::vector<std::vector<double>> group_b;

  void validate() const;
};

// Per-grid-point test results for one two-group comparison.
struct TestCurve {
  landscape::EpsGrid grid;
  std::vector<double> statistic;   // standardized rank-sum statistic per grid point
  std::vector<double> raw_p;
  std::vector<double> adjusted_p;  // Westfall-Young min-P adjusted
  double global_stat = 0.0;        // max over the grid of |statistic|
  double global_p = 1.0;           // min over the grid of adjusted_p
};

struct RankSumResult {
  double statistic = 0.0;  // T: sum of combined-sample ranks of sample_b
  double p_value = 1.0;    // two-sided
};

// automatic: exact when available, normal otherwise. exact requires tie-free
// samples of size <= 10 each.
enum class PvalueMethod { automatic, exact, normal };

// Ascending 1-based ranks; ties get mid-ranks.
std::vector<double> ranks(const std::vector<double>& values);

// Two-sample Wilcoxon rank-sum test. Exact enumeration when both samples have
// size <= 10 and the combined sample is tie-free; otherwise the normal
// approximation with tie-corrected variance and 0.5 continuity correction.
// All 2S values identical gives p = 1.
RankSumResult wilcoxon_rank_sum(const std::vector<double>& sample_a,
                                const std::vector<double>& sample_b,
                                PvalueMethod method = PvalueMethod::automatic);

// (T - S(2S+1)/2) / sqrt(S^2 (2S+1) / 12) for equal group sizes S.
double standardized_statistic(double t, std::size_t s);

std::vector<double> pointwise_pvalues(const ContourSample& sample);

// Westfall-Young min-P step-down adjustment over whole-curve label
// permutations. All C(n, n_b) label assignments are enumerated when there are
// no more of them than num_perms; otherwise num_perms random assignments are
// drawn, one RNG stream per replicate. Deterministic given seed.
std::vector<double> westfall_young_adjust(const ContourSample& sample, std::size_t num_perms,
                                          std::uint64_t seed, unsigned threads = 1);

TestCurve global_test(const ContourSample& sample, std::size_t num_perms, std::uint64_t seed,
                      unsigned threads = 1);

}  // namespace regimescope::stats
