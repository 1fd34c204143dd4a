#include "regimescope/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace regimescope::landscape {

void EpsGrid::validate() const {
  if (!(eps_max > 0.0)) throw ConfigError("eps_max must be > 0");
  if (num_samples < 2) throw ConfigError("grid must have at least 2 samples");
}

std::vector<double> EpsGrid::values() const {
  std::vector<double> out(num_samples);
  for (std::size_t k = 0; k < num_samples; ++k) out[k] = value(k);
  return out;
}

double persistence_function(double birth, double death, double eps) {
  if (!(death > birth)) throw std::invalid_argument("persistence pair requires death > birth");
  const double half = 0.5 * (death - birth);
  const double mid = 0.5 * (death + birth);
  return std::max(half - std::abs(eps - mid), 0.0);
}

Landscape build_landscape(const ph::PersistenceDiagram& diagram, int dim, const EpsGrid& grid,
                          double noise_floor) {
  grid.validate();
  if (noise_floor < 0.0) throw ConfigError("noise_floor must be >= 0");

  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : diagram.pairs) {
    if (p.dim != dim) continue;
    if (p.death - p.birth < noise_floor) continue;
    const double death = std::min(p.death, grid.eps_max);
    if (death > p.birth) pairs.emplace_back(p.birth, death);
  }

  const std::size_t g = grid.num_samples;
  // Tent values collected per grid point, support range only.
  std::vector<std::vector<double>> at(g);
  const double step = grid.step();
  for (const auto& [b, d] : pairs) {
    // One index of slack on both sides; the h > 0 filter trims the excess.
    const auto k_lo = static_cast<std::size_t>(std::max(0.0, std::ceil(b / step) - 1.0));
    const auto k_hi = static_cast<std::size_t>(
        std::min(static_cast<double>(g - 1), std::floor(d / step) + 1.0));
    for (std::size_t k = k_lo; k <= k_hi && k < g; ++k) {
      const double h = persistence_function(b, d, grid.value(k));
      if (h > 0.0) at[k].push_back(h);
    }
  }

  Landscape ls;
  ls.grid = grid;
  ls.dim = dim;
  const std::size_t m_count = std::max<std::size_t>(pairs.size(), 1);
  ls.envelopes.assign(m_count, std::vector<double>(g, 0.0));
  for (std::size_t k = 0; k < g; ++k) {
    std::sort(at[k].begin(), at[k].end(), std::greater<>());
    for (std::size_t m = 0; m < at[k].size(); ++m) ls.envelopes[m][k] = at[k][m];
  }
  return ls;
}

Contour contour(const Landscape& landscape, std::size_t m_prime) {
  if (m_prime < 1) throw ConfigError("m_prime must be >= 1");
  const std::size_t g = landscape.grid.num_samples;
  Contour c;
  c.grid = landscape.grid;
  c.truncation = m_prime;
  c.values.assign(g, 0.0);
  const std::size_t used = std::min(m_prime, landscape.envelopes.size());
  for (std::size_t m = 0; m < used; ++m) {
    const auto& env = landscape.envelopes[m];
    for (std::size_t k = 0; k < g; ++k) c.values[k] += env[k];
  }
  const double inv = 1.0 / static_cast<double>(m_prime);
  for (double& v : c.values) v *= inv;
  return c;
}

double lp_norm(const Contour& a, const Contour& b, double p) {
  if (!(a.grid == b.grid)) throw DataError("lp_norm: contours on different grids");
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  const std::size_t g = a.grid.num_samples;
  if (std::isinf(p)) {
    double best = 0.0;
    for (std::size_t k = 0; k < g; ++k) best = std::max(best, std::abs(a.values[k] - b.values[k]));
    return best;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < g; ++k) {
    const double w = (k == 0 || k == g - 1) ? 0.5 : 1.0;
    acc += w * std::pow(std::abs(a.values[k] - b.values[k]), p);
  }
  return std::pow(acc * a.grid.step(), 1.0 / p);
}

LandscapeStats landscape_stats(const Landscape& landscape) {
  LandscapeStats stats;
  if (landscape.envelopes.empty()) return stats;
  const std::size_t g = landscape.grid.num_samples;
  const auto& top = landscape.envelopes.front();
  std::size_t support = 0;
  std::size_t overlap_total = 0;
  for (std::size_t k = 0; k < g; ++k) {
    stats.max_half_persistence = std::max(stats.max_half_persistence, top[k]);
    if (top[k] <= 0.0) continue;
    ++support;
    for (const auto& env : landscape.envelopes) {
      if (env[k] > 0.0) ++overlap_total;
    }
  }
  if (support > 0)
    stats.overlap_mean = static_cast<double>(overlap_total) / static_cast<double>(support);
  return stats;
}

}  // namespace regimescope::landscape
