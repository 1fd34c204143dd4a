#include "regimescope/filtration.hpp"

#include <algorithm>
#include <cmath>

namespace regimescope::ph {

void FiltrationParams::validate() const {
  if (!(eps_max > 0.0)) throw ConfigError("eps_max must be > 0");
}

namespace {

bool simplex_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.v < b.v;
}

}  // namespace

FilteredComplex vr_filtration_from_distances(const std::vector<double>& dist, std::size_t n,
                                             double eps_max) {
  FilteredComplex fc;
  fc.num_points = n;
  auto d = [&](std::size_t i, std::size_t j) { return dist[i * n + j]; };

  fc.simplices.reserve(n * 4);
  for (std::size_t i = 0; i < n; ++i)
    fc.simplices.push_back({0.0, 0, {static_cast<std::uint32_t>(i), 0, 0}});

  // Adjacency under the cutoff, used for edge and triangle enumeration.
  std::vector<std::vector<std::uint32_t>> nbr(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d(i, j) <= eps_max) {
        nbr[i].push_back(static_cast<std::uint32_t>(j));
        fc.simplices.push_back(
            {d(i, j), 1, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0}});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t j : nbr[i]) {
      for (std::uint32_t k : nbr[i]) {
        if (k <= j) continue;
        if (d(j, k) <= eps_max) {
          const double value = std::max({d(i, j), d(i, k), d(j, k)});
          fc.simplices.push_back({value, 2, {static_cast<std::uint32_t>(i), j, k}});
        }
      }
    }
  }
  std::sort(fc.simplices.begin(), fc.simplices.end(), simplex_less);
  return fc;
}

FilteredComplex vr_filtration(const PointCloud& cloud, const FiltrationParams& params) {
  params.validate();
  if (cloud.points.empty()) throw DataError("vr_filtration: empty point cloud");
  const auto dist = distance_matrix(cloud, params.metric);
  return vr_filtration_from_distances(dist, cloud.size(), params.eps_max);
}

}  // namespace regimescope::ph
