#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "specext/grid.hpp"

using namespace specext;

namespace {

SymTrigPoly random_poly(const IndexSet& S, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SymTrigPoly poly{S, std::vector<double>(S.half_size())};
  for (auto& c : poly.coeffs) c = gauss(rng);
  return poly;
}

}  // namespace

TEST_CASE("box index sets") {
  const IndexSet one = make_box_index_set({1});
  CHECK(one.full_size() == 3);
  REQUIRE(one.half_size() == 2);
  CHECK(one.half_at(0) == MultiIndex{0});
  CHECK(one.half_at(1) == MultiIndex{1});

  const IndexSet cube = make_box_index_set({1, 1, 1});
  CHECK(cube.full_size() == 27);
  CHECK(cube.half_size() == 14);
  CHECK(cube.half_at(0) == MultiIndex{0, 0, 0});

  CHECK(make_box_index_set({0}).full_size() == 1);
  CHECK_THROWS_AS(make_box_index_set({}), std::invalid_argument);
  CHECK_THROWS_AS(make_box_index_set({-1}), std::invalid_argument);
}

TEST_CASE("difference index sets") {
  CHECK(make_difference_index_set({{0, 0}}).full_size() == 1);
  CHECK_THROWS_AS(make_difference_index_set({}), std::invalid_argument);
  CHECK_THROWS_AS(make_difference_index_set({{1}}), std::invalid_argument);

  const IndexSet pair = make_difference_index_set({{0}, {1}});
  CHECK(pair.full_size() == 3);
  CHECK(pair.half_size() == 2);

  // The degree-one 3-d set: 13 indices total, 7 in the half set, and the
  // half set holds the mixed differences with positive leading entry.
  const IndexSet s9 = make_difference_index_set(
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(s9.full_size() == 13);
  REQUIRE(s9.half_size() == 7);
  CHECK(s9.contains({1, -1, 0}));
  CHECK(s9.contains({1, 0, -1}));
  CHECK(s9.contains({0, 1, -1}));
  CHECK(s9.contains({-1, 1, 0}));  // canonicalized to (1,-1,0)
  CHECK_FALSE(s9.contains({1, 1, 0}));
  // 13 dual variables for this set.
  CHECK(2 * s9.half_size() - 1 == 13);
}

TEST_CASE("eval_poly matches closed forms") {
  const GridSpec grid{{4}};
  const IndexSet S = make_box_index_set({1});

  SUBCASE("constant polynomial") {
    const GridField f = eval_poly({S, {1.0, 0.0}}, grid);
    for (double v : f.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("2 + 2cos(theta) on N=4") {
    const GridField f = eval_poly({S, {2.0, 1.0}}, grid);
    REQUIRE(f.values.size() == 4);
    CHECK(f.values[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(f.values[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.values[2] == doctest::Approx(0.0).scale(1).epsilon(1e-14));
    CHECK(f.values[3] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("aliasing collision is a hard error") {
    const IndexSet wide = make_box_index_set({2});
    CHECK_THROWS_WITH_AS(eval_poly({wide, {1.0, 0.1, 0.1}}, grid),
                         doctest::Contains("aliasing collision"),
                         std::runtime_error);
  }
}

TEST_CASE("project_moments matches closed forms") {
  const GridSpec grid{{4}};
  const IndexSet S = make_box_index_set({2});
  const IndexSet narrow = make_box_index_set({1});

  SUBCASE("constant field") {
    const GridField f{grid, {1.0, 1.0, 1.0, 1.0}};
    const auto c = project_moments(f, narrow);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(0.0).scale(1).epsilon(1e-14));
  }
  SUBCASE("f = (4,2,0,2)") {
    const GridField f{grid, {4.0, 2.0, 0.0, 2.0}};
    const auto c = project_moments(f, S);
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c[2] == doctest::Approx(0.0).scale(1).epsilon(1e-14));
    const auto c0 = project_moments0(f, S);
    REQUIRE(c0.size() == 2);
    CHECK(c0[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("asymmetric field trips the residue check") {
    const GridField f{grid, {1.0, 2.0, 3.0, 4.0}};
    CHECK_THROWS_AS(project_moments(f, narrow), std::runtime_error);
  }
}

TEST_CASE("round trip and linearity properties") {
  std::mt19937_64 rng(42);
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> cases = {
      {{2}, {8}}, {{3}, {16}}, {{1, 2}, {6, 10}}, {{1, 1, 1}, {4, 6, 8}}};
  for (const auto& [n, sizes] : cases) {
    const IndexSet S = make_box_index_set(n);
    const GridSpec grid{sizes};
    for (int rep = 0; rep < 5; ++rep) {
      const SymTrigPoly poly = random_poly(S, rng);
      const GridField f = eval_poly(poly, grid);
      const auto back = project_moments(f, S);
      double coeff_scale = 0.0;
      for (double c : poly.coeffs) coeff_scale = std::max(coeff_scale, std::abs(c));
      for (std::size_t i = 0; i < back.size(); ++i)
        CHECK(std::abs(back[i] - poly.coeffs[i]) <= 1e-10 * std::max(1.0, coeff_scale));

      // Symmetry of the evaluated field.
      for (std::int64_t flat = 0; flat < grid.total(); ++flat) {
        auto l = oracle::grid_point(grid, flat);
        for (std::size_t j = 0; j < l.size(); ++j)
          l[j] = (grid.sizes[j] - l[j]) % grid.sizes[j];
        CHECK(f.values[static_cast<std::size_t>(flat)] ==
              doctest::Approx(f.values[static_cast<std::size_t>(grid.flatten(l))])
                  .epsilon(1e-12));
      }
    }

    // Linearity of the projection.
    const GridField f = oracle::random_symmetric_field(grid, rng);
    const GridField g = oracle::random_symmetric_field(grid, rng);
    GridField combo{grid, std::vector<double>(f.values.size())};
    for (std::size_t i = 0; i < f.values.size(); ++i)
      combo.values[i] = 2.5 * f.values[i] - 1.25 * g.values[i];
    const auto pf = project_moments(f, S);
    const auto pg = project_moments(g, S);
    const auto pc = project_moments(combo, S);
    for (std::size_t i = 0; i < pc.size(); ++i)
      CHECK(pc[i] == doctest::Approx(2.5 * pf[i] - 1.25 * pg[i]).epsilon(1e-12));
  }
}

TEST_CASE("eval_poly agrees with direct summation up to |N| = 4096") {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> cases = {
      {{3}, {4096}}, {{2, 2}, {64, 64}}, {{1, 1, 1}, {16, 16, 16}}};
  for (const auto& [n, sizes] : cases) {
    const IndexSet S = make_box_index_set(n);
    const GridSpec grid{sizes};
    const SymTrigPoly poly = random_poly(S, rng);
    const GridField fast = eval_poly(poly, grid);
    const GridField slow = oracle::eval_poly_direct(poly, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < fast.values.size(); ++i)
      worst = std::max(worst, std::abs(fast.values[i] - slow.values[i]));
    CHECK(worst <= 1e-10);
  }
}
