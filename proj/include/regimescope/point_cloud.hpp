#pragma once

#include <optional>
#include <vector>

#include "regimescope/common.hpp"

namespace regimescope {

enum class Metric { euclidean, toroidal };

// Square periodic domain [0, side) x [0, side).
struct Domain {
  double side = 0.0;
  bool periodic = true;
};

// Component-wise minimum image of a displacement in a periodic box of the
// given side; results lie in [-side/2, side/2).
double min_image(double d, double side);
Vec2 min_image(Vec2 d, double side);

struct PointCloud {
  std::vector<Vec2> points;
  std::optional<Domain> domain;

  std::size_t size() const { return points.size(); }
};

double distance(Vec2 a, Vec2 b, Metric metric, const std::optional<Domain>& domain);

// Symmetric matrix with zero diagonal, row-major, n x n.
std::vector<double> distance_matrix(const PointCloud& cloud, Metric metric);

Metric parse_metric(const std::string& name);
const char* metric_name(Metric metric);

}  // namespace regimescope
