#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <iterator>
#include <map>
#include <tuple>
#include <vector>

#include "regimescope/common.hpp"
#include "regimescope/filtration.hpp"
#include "regimescope/persistence.hpp"
#include "regimescope/point_cloud.hpp"

using namespace regimescope;
using namespace regimescope::ph;

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Textbook boundary-matrix reduction over Z2, no clearing, dense column scans.
// Slow but simple; used as the ground truth for the production reduction.
PersistenceDiagram reference_persistence(const FilteredComplex& fc) {
  const auto& sx = fc.simplices;
  std::map<std::tuple<int, std::uint32_t, std::uint32_t, std::uint32_t>, std::size_t> index;
  for (std::size_t i = 0; i < sx.size(); ++i)
    index[{sx[i].dim, sx[i].v[0], sx[i].v[1], sx[i].v[2]}] = i;

  std::vector<std::vector<std::size_t>> cols(sx.size());
  for (std::size_t j = 0; j < sx.size(); ++j) {
    if (sx[j].dim == 1)
      cols[j] = {index.at({0, sx[j].v[0], 0, 0}), index.at({0, sx[j].v[1], 0, 0})};
    else if (sx[j].dim == 2)
      cols[j] = {index.at({1, sx[j].v[0], sx[j].v[1], 0}),
                 index.at({1, sx[j].v[0], sx[j].v[2], 0}),
                 index.at({1, sx[j].v[1], sx[j].v[2], 0})};
    std::sort(cols[j].begin(), cols[j].end());
  }

  std::vector<std::size_t> owner(sx.size(), kNone);
  std::vector<bool> is_birth(sx.size(), false), zero_col(sx.size(), false);
  std::vector<PersistencePair> out;
  for (std::size_t j = 0; j < sx.size(); ++j) {
    auto& col = cols[j];
    while (!col.empty() && owner[col.back()] != kNone) {
      std::vector<std::size_t> merged;
      std::set_symmetric_difference(col.begin(), col.end(), cols[owner[col.back()]].begin(),
                                    cols[owner[col.back()]].end(), std::back_inserter(merged));
      col = std::move(merged);
    }
    if (col.empty()) {
      zero_col[j] = true;
      continue;
    }
    const std::size_t pivot = col.back();
    owner[pivot] = j;
    is_birth[pivot] = true;
    if (sx[j].value > sx[pivot].value && sx[pivot].dim <= 1)
      out.push_back({sx[pivot].value, sx[j].value, static_cast<int>(sx[pivot].dim)});
  }
  for (std::size_t j = 0; j < sx.size(); ++j)
    if (zero_col[j] && !is_birth[j] && sx[j].dim <= 1)
      out.push_back({sx[j].value, kInfiniteDeath, static_cast<int>(sx[j].dim)});
  sort_pairs(out);
  return {out};
}

std::size_t component_count(const PointCloud& cloud, Metric metric, double eps_max) {
  const std::size_t n = cloud.size();
  const auto dist = distance_matrix(cloud, metric);
  std::vector<bool> seen(n, false);
  std::size_t comps = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++comps;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < n; ++j)
        if (!seen[j] && dist[i * n + j] <= eps_max) {
          seen[j] = true;
          queue.push_back(j);
        }
    }
  }
  return comps;
}

PointCloud random_cloud(std::uint64_t seed, std::size_t n, std::optional<Domain> domain) {
  PointCloud cloud;
  cloud.domain = domain;
  Rng rng(seed);
  const double side = domain ? domain->side : 3.0;
  for (std::size_t i = 0; i < n; ++i)
    cloud.points.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
  return cloud;
}

PointCloud unit_square() {
  return {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}, std::nullopt};
}

}  // namespace

TEST_CASE("min_image maps displacements into [-side/2, side/2)") {
  CHECK(min_image(7.0, 10.0) == -3.0);
  CHECK(min_image(-8.0, 10.0) == 2.0);
  CHECK(min_image(5.0, 10.0) == -5.0);
  CHECK(min_image(4.9, 10.0) == doctest::Approx(4.9));
  CHECK(min_image(0.0, 10.0) == 0.0);
  const Vec2 v = min_image(Vec2{7.0, -8.0}, 10.0);
  CHECK(v.x == -3.0);
  CHECK(v.y == 2.0);
}

TEST_CASE("distance supports both metrics") {
  const std::optional<Domain> box = Domain{10.0, true};
  CHECK(distance({0.0, 0.0}, {3.0, 4.0}, Metric::euclidean, std::nullopt) == doctest::Approx(5.0));
  CHECK(distance({0.5, 0.0}, {9.5, 0.0}, Metric::euclidean, std::nullopt) == doctest::Approx(9.0));
  CHECK(distance({0.5, 0.0}, {9.5, 0.0}, Metric::toroidal, box) == doctest::Approx(1.0));
  CHECK(distance({1.0, 9.0}, {9.0, 1.0}, Metric::toroidal, box) ==
        doctest::Approx(std::sqrt(8.0)));
  CHECK_THROWS_AS(distance({0.0, 0.0}, {1.0, 0.0}, Metric::toroidal, std::nullopt), ConfigError);
}

TEST_CASE("distance_matrix is symmetric with a zero diagonal") {
  const PointCloud cloud{{{0.0, 0.0}, {3.0, 4.0}, {0.0, 1.0}}, std::nullopt};
  const auto d = distance_matrix(cloud, Metric::euclidean);
  REQUIRE(d.size() == 9);
  CHECK(d[0 * 3 + 0] == 0.0);
  CHECK(d[1 * 3 + 1] == 0.0);
  CHECK(d[0 * 3 + 1] == doctest::Approx(5.0));
  CHECK(d[1 * 3 + 0] == d[0 * 3 + 1]);
  CHECK(d[0 * 3 + 2] == doctest::Approx(1.0));

  CHECK_THROWS_AS(distance_matrix(PointCloud{}, Metric::euclidean), DataError);
  CHECK_THROWS_AS(distance_matrix(cloud, Metric::toroidal), ConfigError);
}

TEST_CASE("parse_metric and metric_name round-trip") {
  CHECK(parse_metric("euclidean") == Metric::euclidean);
  CHECK(parse_metric("toroidal") == Metric::toroidal);
  CHECK_THROWS_AS(parse_metric("chebyshev"), ConfigError);
  CHECK(metric_name(Metric::euclidean) == std::string("euclidean"));
  CHECK(metric_name(Metric::toroidal) == std::string("toroidal"));
}

TEST_CASE("vr_filtration on an equilateral triangle") {
  const double h = std::sqrt(3.0) / 2.0;
  const PointCloud cloud{{{0.0, 0.0}, {1.0, 0.0}, {0.5, h}}, std::nullopt};
  const auto fc = vr_filtration(cloud, {2.0, Metric::euclidean});
  REQUIRE(fc.simplices.size() == 7);
  CHECK(fc.num_points == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(fc.simplices[static_cast<std::size_t>(i)].dim == 0);
    CHECK(fc.simplices[static_cast<std::size_t>(i)].value == 0.0);
    CHECK(fc.simplices[static_cast<std::size_t>(i)].v[0] == static_cast<std::uint32_t>(i));
  }
  for (int i = 3; i < 6; ++i) {
    CHECK(fc.simplices[static_cast<std::size_t>(i)].dim == 1);
    CHECK(fc.simplices[static_cast<std::size_t>(i)].value == doctest::Approx(1.0));
  }
  CHECK(fc.simplices[6].dim == 2);
  CHECK(fc.simplices[6].value == doctest::Approx(1.0));
  CHECK(fc.simplices[6].v == std::array<std::uint32_t, 3>{0, 1, 2});
}

TEST_CASE("vr_filtration drops pairs beyond eps_max") {
  const PointCloud cloud{{{0.0, 0.0}, {5.0, 0.0}}, std::nullopt};
  const auto fc = vr_filtration(cloud, {3.0, Metric::euclidean});
  REQUIRE(fc.simplices.size() == 2);
  CHECK(fc.simplices[0].dim == 0);
  CHECK(fc.simplices[1].dim == 0);
}

TEST_CASE("vr_filtration on the unit square") {
  const auto fc = vr_filtration(unit_square(), {2.0, Metric::euclidean});
  std::size_t vertices = 0, edges = 0, triangles = 0;
  for (const auto& s : fc.simplices) {
    if (s.dim == 0) ++vertices;
    if (s.dim == 1) ++edges;
    if (s.dim == 2) ++triangles;
  }
  CHECK(vertices == 4);
  CHECK(edges == 6);
  CHECK(triangles == 4);
  for (const auto& s : fc.simplices) {
    if (s.dim == 2) CHECK(s.value == std::sqrt(2.0));
    if (s.dim == 1) CHECK((s.value == 1.0 || s.value == std::sqrt(2.0)));
  }
}

TEST_CASE("vr_filtration rejects bad inputs") {
  CHECK_THROWS_AS(vr_filtration(unit_square(), {0.0, Metric::euclidean}), ConfigError);
  CHECK_THROWS_AS(vr_filtration(unit_square(), {-1.0, Metric::euclidean}), ConfigError);
  CHECK_THROWS_AS(vr_filtration(PointCloud{}, {1.0, Metric::euclidean}), DataError);
}

TEST_CASE("vr_filtration invariants hold on random clouds") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    CAPTURE(seed);
    const bool toroidal = seed % 2 == 1;
    const Metric metric = toroidal ? Metric::toroidal : Metric::euclidean;
    const auto cloud =
        random_cloud(seed, 4 + seed % 5, toroidal ? std::optional<Domain>(Domain{3.0, true})
                                                  : std::nullopt);
    const double eps_max = seed % 3 == 0 ? 1.2 : 2.5;
    const auto fc = vr_filtration(cloud, {eps_max, metric});
    const auto dist = distance_matrix(cloud, metric);
    const std::size_t n = cloud.size();

    std::map<std::tuple<int, std::uint32_t, std::uint32_t, std::uint32_t>, std::size_t> pos;
    for (std::size_t i = 0; i < fc.simplices.size(); ++i) {
      const auto& s = fc.simplices[i];
      pos[{s.dim, s.v[0], s.v[1], s.v[2]}] = i;
      if (i > 0) {
        const auto& p = fc.simplices[i - 1];
        const auto key = std::make_tuple(p.value, p.dim, p.v);
        CHECK(key <= std::make_tuple(s.value, s.dim, s.v));
      }
      if (s.dim == 1) {
        CHECK(s.value == dist[s.v[0] * n + s.v[1]]);
        CHECK(pos.count({0, s.v[0], 0, 0}) == 1);
        CHECK(pos.count({0, s.v[1], 0, 0}) == 1);
      }
      if (s.dim == 2) {
        const double expect = std::max({dist[s.v[0] * n + s.v[1]], dist[s.v[0] * n + s.v[2]],
                                        dist[s.v[1] * n + s.v[2]]});
        CHECK(s.value == expect);
        CHECK(pos.count({1, s.v[0], s.v[1], 0}) == 1);
        CHECK(pos.count({1, s.v[0], s.v[2], 0}) == 1);
        CHECK(pos.count({1, s.v[1], s.v[2], 0}) == 1);
      }
    }

    std::size_t expect_edges = 0, expect_triangles = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (dist[i * n + j] <= eps_max) ++expect_edges;
        for (std::size_t k = j + 1; k < n; ++k)
          if (dist[i * n + j] <= eps_max && dist[i * n + k] <= eps_max &&
              dist[j * n + k] <= eps_max)
            ++expect_triangles;
      }
    std::size_t edges = 0, triangles = 0;
    for (const auto& s : fc.simplices) {
      if (s.dim == 1) ++edges;
      if (s.dim == 2) ++triangles;
    }
    CHECK(edges == expect_edges);
    CHECK(triangles == expect_triangles);
  }
}

TEST_CASE("vr_filtration_from_distances matches the cloud construction") {
  const auto cloud = random_cloud(5, 7, std::nullopt);
  const auto direct = vr_filtration(cloud, {2.5, Metric::euclidean});
  const auto dist = distance_matrix(cloud, Metric::euclidean);
  const auto indirect = vr_filtration_from_distances(dist, cloud.size(), 2.5);
  REQUIRE(direct.simplices.size() == indirect.simplices.size());
  for (std::size_t i = 0; i < direct.simplices.size(); ++i) {
    CHECK(direct.simplices[i].value == indirect.simplices[i].value);
    CHECK(direct.simplices[i].dim == indirect.simplices[i].dim);
    CHECK(direct.simplices[i].v == indirect.simplices[i].v);
  }
}

TEST_CASE("persistence of isolated points is one infinite bar each") {
  const PointCloud cloud{{{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}}, std::nullopt};
  const auto dg = persistence(vr_filtration(cloud, {1.0, Metric::euclidean}));
  REQUIRE(dg.pairs.size() == 3);
  for (const auto& p : dg.pairs) {
    CHECK(p.dim == 0);
    CHECK(p.birth == 0.0);
    CHECK(p.infinite());
  }
}

TEST_CASE("persistence of the unit square") {
  const auto dg = persistence(vr_filtration(unit_square(), {2.0, Metric::euclidean}));
  const auto h0 = dg.dim_pairs(0);
  REQUIRE(h0.size() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(h0[static_cast<std::size_t>(i)].birth == 0.0);
    CHECK(h0[static_cast<std::size_t>(i)].death == 1.0);
  }
  CHECK(h0[3].infinite());

  const auto h1 = dg.dim_pairs(1);
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == 1.0);
  CHECK(h1[0].death == std::sqrt(2.0));
  CHECK(dg.count(0) == 4);
  CHECK(dg.count(1) == 1);
}

TEST_CASE("equilateral triangle yields no surviving loop") {
  const double h = std::sqrt(3.0) / 2.0;
  const PointCloud cloud{{{0.0, 0.0}, {1.0, 0.0}, {0.5, h}}, std::nullopt};
  const auto dg = persistence(vr_filtration(cloud, {2.0, Metric::euclidean}));
  CHECK(dg.count(1) == 0);  // loop fills the instant it closes
  const auto h0 = dg.dim_pairs(0);
  REQUIRE(h0.size() == 3);
  CHECK(h0[0].death == doctest::Approx(1.0));
  CHECK(h0[1].death == doctest::Approx(1.0));
  CHECK(h0[2].infinite());
}

TEST_CASE("regular hexagon carries one loop from side to chord scale") {
  PointCloud cloud;
  for (int k = 0; k < 6; ++k) {
    const double a = k * 3.14159265358979323846 / 3.0;
    cloud.points.push_back({std::cos(a), std::sin(a)});
  }
  const auto dg = persistence(vr_filtration(cloud, {2.5, Metric::euclidean}));
  CHECK(dg.count(0) == 6);
  const auto h1 = dg.dim_pairs(1);
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h1[0].death == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("a ring winding the torus is born at the spacing scale") {
  PointCloud cloud;
  cloud.domain = Domain{4.0, true};
  for (int k = 0; k < 8; ++k) cloud.points.push_back({0.5 * k, 2.0});
  const auto fc = vr_filtration(cloud, {2.5, Metric::toroidal});
  const auto dg = persistence(fc);
  const auto h1 = dg.dim_pairs(1);
  REQUIRE(!h1.empty());
  CHECK(h1[0].birth == doctest::Approx(0.5).epsilon(1e-12));
  const auto ref = reference_persistence(fc);
  CHECK(dg.pairs == ref.pairs);
}

TEST_CASE("persistence matches a textbook reduction on random clouds") {
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    CAPTURE(seed);
    const bool toroidal = seed % 2 == 1;
    const Metric metric = toroidal ? Metric::toroidal : Metric::euclidean;
    const auto cloud =
        random_cloud(seed, 3 + seed % 6, toroidal ? std::optional<Domain>(Domain{3.0, true})
                                                  : std::nullopt);
    const double eps_max = seed % 3 == 0 ? 1.2 : 2.5;
    const auto fc = vr_filtration(cloud, {eps_max, metric});
    const auto fast = persistence(fc);
    const auto ref = reference_persistence(fc);
    CHECK(fast.pairs == ref.pairs);

    std::size_t infinite_h0 = 0;
    for (const auto& p : fast.pairs)
      if (p.dim == 0 && p.infinite()) ++infinite_h0;
    CHECK(infinite_h0 == component_count(cloud, metric, eps_max));
  }
}

TEST_CASE("h0_union_find agrees with the matrix reduction") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    CAPTURE(seed);
    const auto cloud = random_cloud(seed, 4 + seed % 7, std::nullopt);
    const auto fc = vr_filtration(cloud, {seed % 2 ? 2.0 : 3.5, Metric::euclidean});
    const auto full = persistence(fc).dim_pairs(0);
    const auto uf = h0_union_find(fc);
    CHECK(uf.pairs == full);
  }
}

TEST_CASE("diagrams move little under small perturbations") {
  const double delta = 1e-4;
  const auto base = random_cloud(321, 12, std::nullopt);
  PointCloud moved = base;
  Rng rng(654);
  for (auto& p : moved.points) {
    p.x += rng.uniform(-delta, delta);
    p.y += rng.uniform(-delta, delta);
  }
  const FiltrationParams params{5.0, Metric::euclidean};
  const auto da = persistence(vr_filtration(base, params));
  const auto db = persistence(vr_filtration(moved, params));

  auto finite_deaths = [](const PersistenceDiagram& d) {
    std::vector<double> out;
    for (const auto& p : d.pairs)
      if (p.dim == 0 && !p.infinite()) out.push_back(p.death);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto deaths_a = finite_deaths(da), deaths_b = finite_deaths(db);
  REQUIRE(deaths_a.size() == deaths_b.size());
  for (std::size_t i = 0; i < deaths_a.size(); ++i)
    CHECK(std::abs(deaths_a[i] - deaths_b[i]) < 3.0 * delta);

  auto significant = [&](const PersistenceDiagram& d) {
    std::vector<PersistencePair> out;
    for (const auto& p : d.pairs)
      if (p.dim == 1 && !p.infinite() && p.persistence() > 10.0 * delta) out.push_back(p);
    return out;
  };
  const auto loops_a = significant(da), loops_b = significant(db);
  REQUIRE(loops_a.size() == loops_b.size());
  for (const auto& pa : loops_a) {
    bool matched = false;
    for (const auto& pb : loops_b)
      matched = matched ||
                (std::abs(pa.birth - pb.birth) < 3.0 * delta &&
                 std::abs(pa.death - pb.death) < 3.0 * delta);
    CHECK(matched);
  }
}
