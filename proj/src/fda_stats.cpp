#include "regimescope/fda_stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace regimescope::stats {

namespace {

constexpr std::uint64_t kStreamPermutation = 0x70657254aa11ULL;

// Everything needed to evaluate the rank-sum p-value for any relabeling of one
// fixed combined sample: the ranks themselves plus either an exact p lookup
// by integer T or the normal-approximation moments.
struct PointTest {
  std::vector<double> rank;  // per combined index
  double mu = 0.0;
  double sigma = 0.0;  // tie-corrected std dev; 0 means all values identical
  bool exact = false;
  long t_min = 0;
  std::vector<double> p_by_t;
};

double choose(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > 1e18) return 1e18;
  }
  return c;
}

PointTest make_point_test(const std::vector<double>& combined, std::size_t n_a) {
  const std::size_t n = combined.size();
  const std::size_t n_b = n - n_a;
  PointTest pt;
  pt.rank = ranks(combined);

  std::vector<double> sorted(combined);
  std::sort(sorted.begin(), sorted.end());
  bool ties = false;
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    if (j - i > 1) {
      ties = true;
      tie_sum += t * t * t - t;
    }
    i = j;
  }

  const auto dn = static_cast<double>(n);
  pt.mu = static_cast<double>(n_b) * (dn + 1.0) / 2.0;
  const double variance = static_cast<double>(n_a) * static_cast<double>(n_b) / 12.0 *
                          ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
  pt.sigma = variance > 0.0 ? std::sqrt(variance) : 0.0;

  if (!ties && n_a <= 10 && n_b <= 10) {
    pt.exact = true;
    // Distribution of T over all n_b-subsets of the integer ranks 1..n, by
    // subset-sum counting.
    const std::size_t smax = n * (n + 1) / 2;
    std::vector<std::vector<double>> dp(n_b + 1, std::vector<double>(smax + 1, 0.0));
    dp[0][0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t c = std::min(n_b, k); c >= 1; --c) {
        for (std::size_t s = smax; s >= k; --s) dp[c][s] += dp[c - 1][s - k];
      }
    }
    const double total = std::accumulate(dp[n_b].begin(), dp[n_b].end(), 0.0);
    pt.t_min = static_cast<long>(n_b * (n_b + 1) / 2);
    const long t_max = static_cast<long>(n_b * (2 * n - n_b + 1) / 2);
    pt.p_by_t.assign(static_cast<std::size_t>(t_max - pt.t_min + 1), 1.0);
    for (long t = pt.t_min; t <= t_max; ++t) {
      const double dist = std::abs(static_cast<double>(t) - pt.mu);
      double count = 0.0;
      for (std::size_t s = 0; s <= smax; ++s) {
        if (dp[n_b][s] > 0.0 && std::abs(static_cast<double>(s) - pt.mu) >= dist)
          count += dp[n_b][s];
      }
      pt.p_by_t[static_cast<std::size_t>(t - pt.t_min)] = count / total;
    }
  }
  return pt;
}

double p_of_t(const PointTest& pt, double t, PvalueMethod method = PvalueMethod::automatic) {
  const bool use_exact =
      method == PvalueMethod::exact || (method == PvalueMethod::automatic && pt.exact);
  if (use_exact) {
    if (!pt.exact)
      throw ConfigError("exact p-value unavailable (ties or more than 10 values per sample)");
    const long ti = std::lround(t);
    return pt.p_by_t[static_cast<std::size_t>(ti - pt.t_min)];
  }
  if (pt.sigma <= 0.0) return 1.0;
  const double dist = std::abs(t - pt.mu);
  const double z = std::max(dist - 0.5, 0.0) / pt.sigma;
  return std::erfc(z / std::sqrt(2.0));
}

double rank_sum_b(const PointTest& pt, std::size_t n_a) {
  double t = 0.0;
  for (std::size_t i = n_a; i < pt.rank.size(); ++i) t += pt.rank[i];
  return t;
}

struct WyResult {
  std::vector<double> statistic;
  std::vector<double> raw;
  std::vector<double> adjusted;
};

WyResult wy_core(const ContourSample& sample, std::size_t num_perms, std::uint64_t seed,
                 unsigned threads) {
  sample.validate();
  if (num_perms < 100) throw ConfigError("num_perms must be >= 100");

  const std::size_t n_a = sample.group_a.size();
  const std::size_t n_b = sample.group_b.size();
  const std::size_t n = n_a + n_b;
  const std::size_t g = sample.grid.num_samples;

  std::vector<PointTest> pts(g);
  WyResult res;
  res.statistic.resize(g);
  res.raw.resize(g);
  const double sigma_plain = std::sqrt(static_cast<double>(n_a) * static_cast<double>(n_b) *
                                       (static_cast<double>(n) + 1.0) / 12.0);
  parallel_for(g, threads, [&](std::size_t k) {
    std::vector<double> combined(n);
    for (std::size_t i = 0; i < n_a; ++i) combined[i] = sample.group_a[i][k];
    for (std::size_t i = 0; i < n_b; ++i) combined[n_a + i] = sample.group_b[i][k];
    pts[k] = make_point_test(combined, n_a);
    const double t_obs = rank_sum_b(pts[k], n_a);
    res.raw[k] = p_of_t(pts[k], t_obs);
    res.statistic[k] = n_a == n_b ? standardized_statistic(t_obs, n_a)
                                  : (t_obs - pts[k].mu) / sigma_plain;
  });

  // Sorted order of raw p-values (ascending); the step-down walk runs over
  // this order.
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return res.raw[a] < res.raw[b]; });

  const double n_choose = choose(n, n_b);
  const bool exhaustive = n_choose <= static_cast<double>(num_perms);
  const std::size_t reps = exhaustive ? static_cast<std::size_t>(n_choose) : num_perms;

  std::vector<std::atomic<std::uint32_t>> hits(g);
  for (auto& h : hits) h.store(0, std::memory_order_relaxed);

  auto tally = [&](const std::vector<std::size_t>& b_set) {
    std::vector<double> p_star(g);
    for (std::size_t k = 0; k < g; ++k) {
      double t = 0.0;
      for (std::size_t i : b_set) t += pts[k].rank[i];
      p_star[k] = p_of_t(pts[k], t);
    }
    double q = std::numeric_limits<double>::infinity();
    for (std::size_t pos = g; pos-- > 0;) {
      const std::size_t k = order[pos];
      q = std::min(q, p_star[k]);
      if (q <= res.raw[k]) hits[pos].fetch_add(1, std::memory_order_relaxed);
    }
  };

  if (exhaustive) {
    std::vector<std::size_t> comb(n_b);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    for (std::size_t rep = 0; rep < reps; ++rep) {
      tally(comb);
      // Next n_b-combination of [0, n) in lexicographic order.
      std::size_t i = n_b;
      while (i-- > 0) {
        if (comb[i] + 1 <= n - n_b + i) {
          ++comb[i];
          for (std::size_t j = i + 1; j < n_b; ++j) comb[j] = comb[j - 1] + 1;
          break;
        }
      }
    }
  } else {
    parallel_for(reps, threads, [&](std::size_t rep) {
      Rng rng(derive_seed(seed, kStreamPermutation, rep));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(idx);
      idx.resize(n_b);
      tally(idx);
    });
  }

  std::vector<double> adjusted_sorted(g);
  for (std::size_t pos = 0; pos < g; ++pos)
    adjusted_sorted[pos] =
        static_cast<double>(hits[pos].load(std::memory_order_relaxed)) / static_cast<double>(reps);
  for (std::size_t pos = 1; pos < g; ++pos)
    adjusted_sorted[pos] = std::max(adjusted_sorted[pos], adjusted_sorted[pos - 1]);

  res.adjusted.resize(g);
  for (std::size_t pos = 0; pos < g; ++pos) res.adjusted[order[pos]] = adjusted_sorted[pos];
  return res;
}

}  // namespace

void ContourSample::validate() const {
  grid.validate();
  if (group_a.size() < 2 || group_b.size() < 2)
    throw DataError("each group needs at least 2 curves");
  for (const auto* group : {&group_a, &group_b}) {
    for (const auto& curve : *group) {
      if (curve.size() != grid.num_samples)
        throw DataError("curve length does not match the grid");
    }
  }
}

std::vector<double> ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[idx[j]] == values[idx[i]]) ++j;
    // Mid-rank of 1-based positions i+1 .. j.
    const double r = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) out[idx[k]] = r;
    i = j;
  }
  return out;
}

RankSumResult wilcoxon_rank_sum(const std::vector<double>& sample_a,
                                const std::vector<double>& sample_b, PvalueMethod method) {
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("wilcoxon_rank_sum: empty sample");
  std::vector<double> combined(sample_a);
  combined.insert(combined.end(), sample_b.begin(), sample_b.end());
  const PointTest pt = make_point_test(combined, sample_a.size());
  const double t = rank_sum_b(pt, sample_a.size());
  return {t, p_of_t(pt, t, method)};
}

double standardized_statistic(double t, std::size_t s) {
  const auto ds = static_cast<double>(s);
  const double mean = ds * (2.0 * ds + 1.0) / 2.0;
  const double sd = std::sqrt(ds * ds * (2.0 * ds + 1.0) / 12.0);
  return (t - mean) / sd;
}

std::vector<double> pointwise_pvalues(const ContourSample& sample) {
  sample.validate();
  const std::size_t n_a = sample.group_a.size();
  const std::size_t n = n_a + sample.group_b.size();
  const std::size_t g = sample.grid.num_samples;
  std::vector<double> out(g);
  for (std::size_t k = 0; k < g; ++k) {
    std::vector<double> combined(n);
    for (std::size_t i = 0; i < n_a; ++i) combined[i] = sample.group_a[i][k];
    for (std::size_t i = n_a; i < n; ++i) combined[i] = sample.group_b[i - n_a][k];
    const PointTest pt = make_point_test(combined, n_a);
    out[k] = p_of_t(pt, rank_sum_b(pt, n_a));
  }
  return out;
}

std::vector<double> westfall_young_adjust(const ContourSample& sample, std::size_t num_perms,
                                          std::uint64_t seed, unsigned threads) {
  return wy_core(sample, num_perms, seed, threads).adjusted;
}

TestCurve global_test(const ContourSample& sample, std::size_t num_perms, std::uint64_t seed,
                      unsigned threads) {
  WyResult res = wy_core(sample, num_perms, seed, threads);
  TestCurve curve;
  curve.grid = sample.grid;
  curve.statistic = std::move(res.statistic);
  curve.raw_p = std::move(res.raw);
  curve.adjusted_p = std::move(res.adjusted);
  // Resampling granularity can leave the adjusted estimate a hair under the
  // raw p; the reported curve keeps the step-down guarantee instead.
  for (std::size_t k = 0; k < curve.adjusted_p.size(); ++k)
    curve.adjusted_p[k] = std::max(curve.adjusted_p[k], curve.raw_p[k]);
  curve.global_stat = 0.0;
  curve.global_p = 1.0;
  for (std::size_t k = 0; k < curve.statistic.size(); ++k) {
    curve.global_stat = std::max(curve.global_stat, std::abs(curve.statistic[k]));
    curve.global_p = std::min(curve.global_p, curve.adjusted_p[k]);
  }
  return curve;
}

}  // namespace regimescope::stats
