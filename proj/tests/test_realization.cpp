#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "specext/errors.hpp"
#include "specext/realization.hpp"

using namespace specext;

namespace {

ArmaModel section9_model(bool with_zero) {
  const double b3 = with_zero ? 0.5 : 0.4;
  return arma_from_polar({1.0, 0.3, 0.3, 0.3}, {0.0, 0.0, 0.0, 0.0},
                         {1.0, 0.2, 0.3, b3}, {0.0, 1.0, 1.0, 1.0}, 2);
}

// |c_0 - sum_j c_j e^{-i theta_j}|^2 evaluated pointwise.
double filter_power_direct(const std::vector<std::complex<double>>& coeffs,
                           const GridSpec& grid, std::int64_t flat) {
  const auto l = oracle::grid_point(grid, flat);
  std::complex<double> acc = coeffs[0];
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    const double arg = -2.0 * std::numbers::pi * l[j - 1] / grid.sizes[j - 1];
    acc -= coeffs[j] * std::complex<double>(std::cos(arg), std::sin(arg));
  }
  return std::norm(acc);
}

}  // namespace

TEST_CASE("arma_from_polar composes and normalizes") {
  const ArmaModel model = section9_model(false);
  CHECK(model.d == 3);
  CHECK(model.a[1].real() == doctest::Approx(0.3));
  CHECK(model.a[1].imag() == 0.0);
  // angle pi composes to an exactly real negative coefficient.
  CHECK(model.b[1].imag() == 0.0);
  CHECK(model.b[1].real() < 0.0);
  double norm = 0.0;
  for (const auto& v : model.b) norm += std::norm(v);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(arma_from_polar({2.0, 0.1}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, 2),
                  std::invalid_argument);  // a_0 != 1
}

TEST_CASE("poly_from_filter") {
  SUBCASE("pure delta gives the constant polynomial") {
    const IndexSet S = make_difference_index_set(
        {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const SymTrigPoly p =
        poly_from_filter({{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, S);
    CHECK(p.coeffs[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < p.coeffs.size(); ++i)
      CHECK(p.coeffs[i] == doctest::Approx(0.0).scale(1));
  }
  SUBCASE("d=1 closed form") {
    const double beta = 0.5;
    const double scale = std::sqrt(1.0 + beta * beta);
    const IndexSet S = make_box_index_set({1});
    const SymTrigPoly p =
        poly_from_filter({{1.0 / scale, 0.0}, {-beta / scale, 0.0}}, S);
    CHECK(p.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.coeffs[1] == doctest::Approx(beta / (1.0 + beta * beta)).epsilon(1e-14));
  }
  SUBCASE("section-9 numerator is strictly positive") {
    const ArmaModel model = section9_model(false);
    const SymTrigPoly p = poly_from_filter(model.b, model.index_set());
    CHECK(p.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    const GridField f = eval_poly(p, GridSpec{{20, 20, 20}});
    CHECK(f.min() > 0.0);
  }
  SUBCASE("complex residue is rejected") {
    const IndexSet S = make_box_index_set({1});
    CHECK_THROWS_AS(poly_from_filter({{1.0, 0.0}, {0.3, 0.4}}, S),
                    std::invalid_argument);
  }
  SUBCASE("agrees with the direct filter-power oracle") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(-0.4, 0.4);
    for (int d : {1, 2, 3}) {
      std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(d) + 1);
      coeffs[0] = 1.0;
      for (int j = 1; j <= d; ++j) coeffs[static_cast<std::size_t>(j)] = unif(rng);
      std::vector<MultiIndex> plus{MultiIndex(static_cast<std::size_t>(d), 0)};
      for (int j = 0; j < d; ++j) {
        MultiIndex e(static_cast<std::size_t>(d), 0);
        e[static_cast<std::size_t>(j)] = 1;
        plus.push_back(e);
      }
      const IndexSet S = make_difference_index_set(plus);
      const GridSpec grid{std::vector<int>(static_cast<std::size_t>(d), 8)};
      const GridField f = eval_poly(poly_from_filter(coeffs, S), grid);
      for (std::int64_t flat = 0; flat < grid.total(); ++flat)
        CHECK(f.values[static_cast<std::size_t>(flat)] ==
              doctest::Approx(filter_power_direct(coeffs, grid, flat))
                  .epsilon(1e-10));
    }
  }
}

TEST_CASE("true_spectrum") {
  SUBCASE("trivial model gives the flat spectrum") {
    const ArmaModel model = arma_from_polar({1.0, 0.0}, {0.0, 0.0},
                                            {1.0, 0.0}, {0.0, 0.0}, 2);
    const GridField phi = true_spectrum(model, GridSpec{{8}});
    for (double v : phi.values) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("spectral zero sits at (pi,pi,pi) on the scale of 1e-66") {
    const ArmaModel model = section9_model(true);
    const GridSpec grid{{20, 20, 20}};
    const GridField phi = true_spectrum(model, grid);
    const double at_zero =
        phi.values[static_cast<std::size_t>(grid.flatten({10, 10, 10}))];
    CHECK(at_zero < 1e-60);
    CHECK(at_zero >= 0.0);
    CHECK(phi.min() >= 0.0);
  }
  SUBCASE("d=1 pole model peaks at theta = 0") {
    const ArmaModel model = arma_from_polar({1.0, 0.3}, {0.0, 0.0},
                                            {1.0, 0.0}, {0.0, 0.0}, 2);
    const GridField phi = true_spectrum(model, GridSpec{{16}});
    for (double v : phi.values) CHECK(v <= phi.values[0] + 1e-12);
    CHECK(phi.values[0] > phi.values[8]);
  }
  SUBCASE("symmetry under l -> -l") {
    for (bool zero : {false, true}) {
      const GridSpec grid{{6, 6, 6}};
      const GridField phi = true_spectrum(section9_model(zero), grid);
      for (std::int64_t flat = 0; flat < grid.total(); ++flat) {
        auto l = oracle::grid_point(grid, flat);
        for (std::size_t j = 0; j < l.size(); ++j)
          l[j] = (grid.sizes[j] - l[j]) % grid.sizes[j];
        CHECK(phi.values[static_cast<std::size_t>(flat)] ==
              doctest::Approx(phi.values[static_cast<std::size_t>(grid.flatten(l))]));
      }
    }
  }
}

TEST_CASE("moment generation is deterministic") {
  const ArmaModel model = section9_model(true);
  const GridSpec grid{{8, 8, 8}};
  const MomentData a = model_moments(model, grid);
  const MomentData b = model_moments(model, grid);
  CHECK(std::memcmp(a.c.data(), b.c.data(), a.c.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.m.data(), b.m.data(), a.m.size() * sizeof(double)) == 0);
}

TEST_CASE("lambda sweep on a white-noise model") {
  const ArmaModel model = arma_from_polar({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0},
                                          {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 2);
  const GridSpec grid{{8, 8}};
  const ExperimentResult result =
      lambda_sweep(model, grid, {1e-6, 1e-2, 1.0});
  REQUIRE(result.lambdas.size() == 3);
  CHECK(result.lambdas[0] == 1.0);  // ordered by decreasing lambda
  for (std::size_t i = 0; i < result.lambdas.size(); ++i) {
    CHECK(result.converged[i]);
    CHECK(result.errors[i] < 1e-7);
  }
}

TEST_CASE("lambda sweep records cross sections through the zero") {
  const ArmaModel model = section9_model(true);
  const GridSpec grid{{8, 8, 8}};
  SolveOptions opts;
  const ExperimentResult result =
      lambda_sweep(model, grid, {1e-2, 1e-4}, opts, /*with_sections=*/true);
  REQUIRE(result.cross_sections.size() == 3);
  for (const auto& sec : result.cross_sections) {
    CHECK(sec.base == std::vector<int>{4, 4, 4});  // pi on an N=8 grid
    REQUIRE(sec.truth.size() == 8);
    REQUIRE(sec.reconstructed.size() == 2);
    // The smaller lambda approximates the near-zero dip better.
    CHECK(sec.reconstructed[1][4] < sec.reconstructed[0][4]);
  }
}

TEST_CASE("grid convergence") {
  SUBCASE("constant model: all solutions identical") {
    const ArmaModel model = arma_from_polar({1.0, 0.0}, {0.0, 0.0},
                                            {1.0, 0.0}, {0.0, 0.0}, 2);
    const auto rows = grid_convergence(model, {8, 12, 16}, 1e-3);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i].distance_to_prev < 1e-9);
  }
  SUBCASE("d=2 model: successive distances decrease") {
    const ArmaModel model = arma_from_polar({1.0, 0.25, 0.3}, {0.0, 0.0, 0.0},
                                            {1.0, 0.3, 0.25}, {0.0, 1.0, 1.0}, 2);
    SolveOptions opts;
    opts.grad_tol = 1e-11;
    const auto rows = grid_convergence(model, {8, 12, 16, 24}, 1e-4, opts);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].distance_to_prev > rows[2].distance_to_prev);
    CHECK(rows[2].distance_to_prev > rows[3].distance_to_prev);
  }
}

TEST_CASE("entropy curve") {
  SUBCASE("white noise: flat in lambda") {
    const IndexSet S = make_box_index_set({1});
    MomentData data;
    data.index_set = S;
    data.nu = 2;
    data.c = {2.0, 0.0};
    data.m = {0.0};
    const EntropyCurve curve =
        entropy_curve(data, GridSpec{{12}}, {1e-6, 1e-4, 1e-2});
    for (std::size_t i = 1; i < curve.entropies.size(); ++i)
      CHECK(curve.entropies[i] == doctest::Approx(curve.entropies[0]).epsilon(1e-9));
  }
  SUBCASE("large lambda drives P toward 1") {
    const ArmaModel model = section9_model(true);
    const GridSpec grid{{8, 8, 8}};
    MomentData data = model_moments(model, grid);
    const EntropyCurve curve = entropy_curve(data, grid, {1e2, 1e3});
    double norm_lo = 0.0, norm_hi = 0.0;
    for (double v : curve.solutions[0].p) norm_lo = std::max(norm_lo, std::abs(v));
    for (double v : curve.solutions[1].p) norm_hi = std::max(norm_hi, std::abs(v));
    CHECK(norm_hi < norm_lo);
    CHECK(norm_hi < 1e-2);
  }
}
