#include "regimescope/point_cloud.hpp"

#include <cmath>
#include <stdexcept>

namespace regimescope {

double min_image(double d, double side) { return d - side * std::floor(d / side + 0.5); }

Vec2 min_image(Vec2 d, double side) { return {min_image(d.x, side), min_image(d.y, side)}; }

double distance(Vec2 a, Vec2 b, Metric metric, const std::optional<Domain>& domain) {
  Vec2 d = b - a;
  if (metric == Metric::toroidal) {
    if (!domain || domain->side <= 0.0)
      throw ConfigError("toroidal metric requires a point cloud with a domain");
    d = min_image(d, domain->side);
  }
  return d.norm();
}

std::vector<double> distance_matrix(const PointCloud& cloud, Metric metric) {
  if (cloud.points.empty()) throw DataError("distance_matrix: empty point cloud");
  if (metric == Metric::toroidal && !cloud.domain)
    throw ConfigError("toroidal metric requires a point cloud with a domain");
  const std::size_t n = cloud.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(cloud.points[i], cloud.points[j], metric, cloud.domain);
      m[i * n + j] = d;
      m[j * n + i] = d;
    }
  }
  return m;
}

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "toroidal") return Metric::toroidal;
  throw ConfigError("unknown metric '" + name + "' (expected euclidean or toroidal)");
}

const char* metric_name(Metric metric) {
  return metric == Metric::euclidean ? "euclidean" : "toroidal";
}

}  // namespace regimescope
