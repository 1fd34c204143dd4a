#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "regimescope/common.hpp"
#include "regimescope/landscape.hpp"
#include "regimescope/persistence.hpp"

using namespace regimescope;
using namespace regimescope::landscape;
using regimescope::ph::kInfiniteDeath;
using regimescope::ph::PersistenceDiagram;
using regimescope::ph::PersistencePair;

namespace {

// Independent landscape construction: evaluate every tent at every grid point
// and take order statistics by a full sort. No support tracking, no shortcuts.
std::vector<std::vector<double>> direct_landscape(const PersistenceDiagram& diagram, int dim,
                                                  const EpsGrid& grid, double noise_floor) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : diagram.pairs) {
    if (p.dim != dim || p.death - p.birth < noise_floor) continue;
    const double death = std::min(p.death, grid.eps_max);
    if (death > p.birth) pairs.emplace_back(p.birth, death);
  }
  const std::size_t g = grid.num_samples;
  const std::size_t m_count = std::max<std::size_t>(pairs.size(), 1);
  std::vector<std::vector<double>> env(m_count, std::vector<double>(g, 0.0));
  for (std::size_t k = 0; k < g; ++k) {
    std::vector<double> at;
    for (const auto& [b, d] : pairs) at.push_back(persistence_function(b, d, grid.value(k)));
    std::sort(at.begin(), at.end(), std::greater<>());
    for (std::size_t m = 0; m < at.size(); ++m) env[m][k] = at[m];
  }
  return env;
}

PersistenceDiagram diagram_of(std::vector<PersistencePair> pairs) {
  PersistenceDiagram d;
  d.pairs = std::move(pairs);
  return d;
}

}  // namespace

TEST_CASE("EpsGrid spans [0, eps_max] uniformly") {
  const EpsGrid grid{4.0, 9};
  grid.validate();
  CHECK(grid.step() == 0.5);
  CHECK(grid.value(0) == 0.0);
  CHECK(grid.value(8) == 4.0);
  CHECK(grid.value(3) == 1.5);
  const auto vals = grid.values();
  REQUIRE(vals.size() == 9);
  CHECK(vals.front() == 0.0);
  CHECK(vals.back() == 4.0);
  CHECK((grid == EpsGrid{4.0, 9}));
  CHECK_FALSE((grid == EpsGrid{4.0, 11}));

  CHECK_THROWS_AS((EpsGrid{0.0, 9}.validate()), ConfigError);
  CHECK_THROWS_AS((EpsGrid{-1.0, 9}.validate()), ConfigError);
  CHECK_THROWS_AS((EpsGrid{4.0, 1}.validate()), ConfigError);
}

TEST_CASE("persistence_function is the half-persistence tent") {
  CHECK(persistence_function(1.0, 3.0, 2.0) == 1.0);
  CHECK(persistence_function(1.0, 3.0, 1.5) == 0.5);
  CHECK(persistence_function(1.0, 3.0, 1.0) == 0.0);
  CHECK(persistence_function(1.0, 3.0, 0.2) == 0.0);
  CHECK(persistence_function(1.0, 3.0, 3.7) == 0.0);
  CHECK(persistence_function(0.0, 4.0, 2.0) == 2.0);
  CHECK(persistence_function(0.0, 4.0, 3.0) == 1.0);
  CHECK_THROWS_AS(persistence_function(2.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(persistence_function(3.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("build_landscape of a single pair samples its tent") {
  const EpsGrid grid{4.0, 9};
  const auto ls = build_landscape(diagram_of({{1.0, 3.0, 1}}), 1, grid);
  REQUIRE(ls.envelopes.size() == 1);
  CHECK(ls.dim == 1);
  const auto& top = ls.lambda(1);
  CHECK(top == std::vector<double>{0.0, 0.0, 0.0, 0.5, 1.0, 0.5, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(ls.lambda(2), std::out_of_range);
}

TEST_CASE("nested pairs split into first and second envelopes") {
  const EpsGrid grid{4.0, 9};
  const auto ls = build_landscape(diagram_of({{0.0, 4.0, 1}, {1.0, 3.0, 1}}), 1, grid);
  REQUIRE(ls.envelopes.size() == 2);
  CHECK(ls.lambda(1) == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 1.5, 1.0, 0.5, 0.0});
  CHECK(ls.lambda(2) == std::vector<double>{0.0, 0.0, 0.0, 0.5, 1.0, 0.5, 0.0, 0.0, 0.0});
}

TEST_CASE("duplicate pairs stack identical envelopes") {
  const EpsGrid grid{4.0, 9};
  const auto ls = build_landscape(diagram_of({{1.0, 3.0, 1}, {1.0, 3.0, 1}}), 1, grid);
  REQUIRE(ls.envelopes.size() == 2);
  CHECK(ls.lambda(1) == ls.lambda(2));
}

TEST_CASE("empty or mismatched diagrams leave one zero envelope") {
  const EpsGrid grid{3.0, 11};
  for (const auto& diagram : {diagram_of({}), diagram_of({{0.0, 1.0, 0}})}) {
    const auto ls = build_landscape(diagram, 1, grid);
    REQUIRE(ls.envelopes.size() == 1);
    for (double v : ls.lambda(1)) CHECK(v == 0.0);
  }
}

TEST_CASE("noise floor drops short-lived pairs before truncation") {
  const EpsGrid grid{3.0, 301};
  const auto filtered =
      build_landscape(diagram_of({{0.0, 0.5, 1}, {0.0, 2.0, 1}}), 1, grid, 1.0);
  const auto only_big = build_landscape(diagram_of({{0.0, 2.0, 1}}), 1, grid);
  REQUIRE(filtered.envelopes.size() == 1);
  CHECK(filtered.lambda(1) == only_big.lambda(1));

  // An infinite death survives any floor; truncation happens afterwards.
  const auto late = build_landscape(diagram_of({{2.9, kInfiniteDeath, 1}}), 1, grid, 0.5);
  REQUIRE(late.envelopes.size() == 1);
  const double peak = *std::max_element(late.lambda(1).begin(), late.lambda(1).end());
  CHECK(peak > 0.0);
  CHECK(peak <= 0.05 + 1e-12);
}

TEST_CASE("infinite deaths are clipped to the grid end") {
  const EpsGrid grid{3.0, 301};
  const auto clipped = build_landscape(diagram_of({{0.5, kInfiniteDeath, 1}}), 1, grid);
  const auto finite = build_landscape(diagram_of({{0.5, 3.0, 1}}), 1, grid);
  CHECK(clipped.lambda(1) == finite.lambda(1));

  // Births at or beyond eps_max produce nothing after clipping.
  const auto empty = build_landscape(diagram_of({{3.0, kInfiniteDeath, 1}}), 1, grid);
  REQUIRE(empty.envelopes.size() == 1);
  for (double v : empty.lambda(1)) CHECK(v == 0.0);
}

TEST_CASE("build_landscape validates its knobs") {
  CHECK_THROWS_AS(build_landscape(diagram_of({}), 1, (EpsGrid{0.0, 9})), ConfigError);
  CHECK_THROWS_AS(build_landscape(diagram_of({}), 1, (EpsGrid{3.0, 11}), -0.1), ConfigError);
}

TEST_CASE("landscapes match the direct order-statistic construction") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CAPTURE(seed);
    Rng rng(derive_seed(9000, 0, seed));
    PersistenceDiagram diagram;
    const std::size_t n = rng.uniform_int(13);
    for (std::size_t i = 0; i < n; ++i) {
      const double b = rng.uniform(0.0, 2.5);
      double d = b + rng.uniform(0.0, 2.5);
      if (rng.uniform() < 0.15) d = kInfiniteDeath;
      const int dim = rng.uniform() < 0.25 ? 0 : 1;
      diagram.pairs.push_back({b, d, dim});
    }
    const EpsGrid grid{3.0, 157};
    const double floor = seed % 2 == 0 ? 0.0 : 0.3;
    const auto ls = build_landscape(diagram, 1, grid, floor);
    const auto expect = direct_landscape(diagram, 1, grid, floor);
    REQUIRE(ls.envelopes.size() == expect.size());
    for (std::size_t m = 0; m < expect.size(); ++m) CHECK(ls.envelopes[m] == expect[m]);

    const double step = grid.step();
    for (std::size_t m = 0; m < ls.envelopes.size(); ++m) {
      for (std::size_t k = 0; k < grid.num_samples; ++k) {
        CHECK(ls.envelopes[m][k] >= 0.0);
        if (m + 1 < ls.envelopes.size()) CHECK(ls.envelopes[m][k] >= ls.envelopes[m + 1][k]);
        if (k + 1 < grid.num_samples)
          CHECK(std::abs(ls.envelopes[m][k + 1] - ls.envelopes[m][k]) <= step + 1e-12);
      }
    }
  }
}

TEST_CASE("contour averages with a fixed divisor") {
  const EpsGrid grid{4.0, 9};
  const auto one = build_landscape(diagram_of({{1.0, 3.0, 1}}), 1, grid);
  const auto c1 = contour(one, 1);
  CHECK(c1.values == one.lambda(1));
  CHECK(c1.truncation == 1);
  CHECK(c1.grid == grid);

  const auto c2 = contour(one, 2);
  for (std::size_t k = 0; k < grid.num_samples; ++k)
    CHECK(c2.values[k] == 0.5 * one.lambda(1)[k]);

  const auto two = build_landscape(diagram_of({{0.0, 4.0, 1}, {1.0, 3.0, 1}}), 1, grid);
  const auto c3 = contour(two, 3);
  for (std::size_t k = 0; k < grid.num_samples; ++k)
    CHECK(c3.values[k] ==
          doctest::Approx((two.lambda(1)[k] + two.lambda(2)[k]) / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(contour(one, 0), ConfigError);
}

TEST_CASE("lp_norm integrates differences by trapezoid rule") {
  const EpsGrid grid{3.0, 151};
  Contour a{grid, std::vector<double>(grid.num_samples, 1.0), 1};
  Contour b{grid, std::vector<double>(grid.num_samples, 0.0), 1};
  CHECK(lp_norm(a, b, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(lp_norm(a, b, std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(lp_norm(a, a, 2.0) == 0.0);

  const EpsGrid unit{1.0, 101};
  Contour ramp{unit, unit.values(), 1};
  Contour zero{unit, std::vector<double>(unit.num_samples, 0.0), 1};
  CHECK(lp_norm(ramp, zero, 2.0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-4));
  CHECK(lp_norm(ramp, zero, std::numeric_limits<double>::infinity()) == 1.0);

  Contour other{EpsGrid{3.0, 152}, std::vector<double>(152, 0.0), 1};
  CHECK_THROWS_AS(lp_norm(a, other, 2.0), DataError);
  CHECK_THROWS_AS(lp_norm(a, b, 0.5), ConfigError);
}

TEST_CASE("landscape_stats summarizes the top envelope") {
  const EpsGrid grid{2.0, 5};
  const auto ls = build_landscape(diagram_of({{0.0, 2.0, 1}, {0.5, 1.5, 1}}), 1, grid);
  const auto stats = landscape_stats(ls);
  // supp(lambda_1) covers eps = 0.5, 1.0, 1.5; the second envelope is positive
  // only at eps = 1.0, so the mean count is (1 + 2 + 1) / 3.
  CHECK(stats.overlap_mean == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(stats.max_half_persistence == 1.0);

  const EpsGrid wide{4.0, 9};
  const auto single = build_landscape(diagram_of({{0.0, 4.0, 1}}), 1, wide);
  const auto s1 = landscape_stats(single);
  CHECK(s1.overlap_mean == 1.0);
  CHECK(s1.max_half_persistence == 2.0);

  const auto empty = build_landscape(diagram_of({}), 1, wide);
  const auto s0 = landscape_stats(empty);
  CHECK(s0.overlap_mean == 0.0);
  CHECK(s0.max_half_persistence == 0.0);
}
