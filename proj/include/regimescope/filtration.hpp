#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "regimescope/point_cloud.hpp"

namespace regimescope::ph {

struct FiltrationParams {
  double eps_max = 3.0;
  Metric metric = Metric::euclidean;
  // Homology is computed for dimensions 0 and 1 only, so the complex carries
  // simplices up to dimension 2.

  void validate() const;
};

struct Simplex {
  double value = 0.0;   // filtration value (vertices 0, edges d(i,j), triangles max edge)
  std::uint8_t dim = 0;
  std::array<std::uint32_t, 3> v{0, 0, 0};  // sorted vertex ids, unused entries 0
};

// Simplices sorted by (value, dim, lexicographic vertices); every simplex
// appears after all of its faces.
struct FilteredComplex {
  std::size_t num_points = 0;
  std::vector<Simplex> simplices;
};

// Vietoris-Rips complex: an edge enters at d(i,j) when d(i,j) <= eps_max, a
// triangle enters when its three edges are present, at the largest edge value.
FilteredComplex vr_filtration(const PointCloud& cloud, const FiltrationParams& params);

// Same construction from a precomputed n x n distance matrix.
FilteredComplex vr_filtration_from_distances(const std::vector<double>& dist, std::size_t n,
                                             double eps_max);

}  // namespace regimescope::ph
