#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdpr/core.hpp"
#include "cdpr/scalar_min.hpp"
#include "helpers.hpp"

using namespace cdpr;
using cdpr::test::random_ensemble;
using cdpr::test::random_real;
using cdpr::test::scalar_ensemble;

namespace {

std::vector<double> sorted_roots(const CubicRoots& r) {
  return {r.roots().begin(), r.roots().end()};
}

QuarticCoeffs random_coercive(Rng& rng) {
  QuarticCoeffs c;
  c.d4 = rng.uniform(0.05, 2.0);
  c.d3 = 3.0 * rng.normal();
  c.d2 = 3.0 * rng.normal();
  c.d1 = 3.0 * rng.normal();
  c.d0 = rng.normal();
  return c;
}

// Bound on the magnitude of any real stationary point.
double cauchy_radius(const QuarticCoeffs& c) {
  const double lead = 4.0 * c.d4;
  return 1.0 + std::max({std::abs(3.0 * c.d3), std::abs(2.0 * c.d2), std::abs(c.d1)}) / lead;
}

double grid_min(const auto& fn, double lo, double hi, std::size_t points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points; ++k) {
    const double a = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    best = std::min(best, fn(a));
  }
  return best;
}

}  // namespace

TEST_SUITE("scalar_min") {

TEST_CASE("cubic root examples") {
  auto r = solve_cubic(4, 0, -4, 0);
  REQUIRE(r.count == 3);
  CHECK(r.values[0] == doctest::Approx(-1.0));
  CHECK(std::abs(r.values[1]) < 1e-14);
  CHECK(r.values[2] == doctest::Approx(1.0));

  r = solve_cubic(1, -6, 11, -6);
  REQUIRE(r.count == 3);
  CHECK(r.values[0] == doctest::Approx(1.0));
  CHECK(r.values[1] == doctest::Approx(2.0));
  CHECK(r.values[2] == doctest::Approx(3.0));

  r = solve_cubic(1, 0, 1, 0);
  REQUIRE(r.count == 1);
  CHECK(std::abs(r.values[0]) < 1e-14);
}

TEST_CASE("cubic degeneracies") {
  CHECK(solve_cubic(0, 0, 0, 0).identically_zero);
  const auto constant = solve_cubic(0, 0, 0, 3);
  CHECK_FALSE(constant.identically_zero);
  CHECK(constant.count == 0);
  CHECK(sorted_roots(solve_cubic(0, 0, 2, -1)) == std::vector<double>{0.5});
  const auto quad = solve_cubic(1e-20, 1, 0, -4);
  REQUIRE(quad.count == 2);
  CHECK(quad.values[0] == doctest::Approx(-2.0));
  CHECK(quad.values[1] == doctest::Approx(2.0));
  const auto none = solve_cubic(0, 1, 0, 1);
  CHECK(none.count == 0);
}

TEST_CASE("repeated roots are collapsed") {
  const auto r = solve_cubic(1, -3, 3, -1);  // (x-1)^3
  REQUIRE(r.count == 1);
  CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-5));
  const auto d = solve_cubic(1, 0, -3, 2);  // (x-1)^2 (x+2)
  REQUIRE(d.count == 2);
  CHECK(d.values[0] == doctest::Approx(-2.0));
  CHECK(d.values[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cubic root residuals") {
  Rng rng(17);
  for (int k = 0; k < 20000; ++k) {
    const double a3 = rng.normal(), a2 = 5 * rng.normal(), a1 = 5 * rng.normal(),
                 a0 = 5 * rng.normal();
    const auto r = solve_cubic(a3, a2, a1, a0);
    REQUIRE(r.count >= 1);
    for (double x : r.roots()) {
      const double p = ((a3 * x + a2) * x + a1) * x + a0;
      const double scale = std::abs(a3 * x * x * x) + std::abs(a2 * x * x) + std::abs(a1 * x) +
                           std::abs(a0);
      CHECK(std::abs(p) <= 1e-8 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("minimize_quartic examples") {
  auto m = minimize_quartic({1, 0, -2, 0, 0});
  CHECK(m.arg == doctest::Approx(-1.0));
  CHECK(m.value == doctest::Approx(-1.0));
  m = minimize_quartic({1, 4, 4, 0, 0});
  CHECK(m.arg == 0.0);
  CHECK(m.value == 0.0);
  m = minimize_quartic({0, 0, 2, -4, 1});
  CHECK(m.arg == doctest::Approx(1.0));
  CHECK(minimize_quartic({0, 0, 0, 0, 5}).arg == 0.0);
  CHECK_THROWS_AS(minimize_quartic({0, 0, -1, 1, 0}), std::domain_error);
  CHECK_THROWS_AS(minimize_quartic({0, 0, 0, 1, 0}), std::domain_error);
  CHECK_THROWS_AS(minimize_quartic({-1, 0, 0, 0, 0}), std::domain_error);
}

TEST_CASE("minimize_quartic beats grid search") {
  Rng rng(23);
  for (int k = 0; k < 1000; ++k) {
    const QuarticCoeffs c = random_coercive(rng);
    const ScalarMin m = minimize_quartic(c);
    const double r = cauchy_radius(c);
    CHECK(m.value <= grid_min(c, -r, r, 100000) + 1e-8);
    for (int p = 0; p < 1000; ++p) CHECK(m.value <= c(rng.uniform(-r, r)) + 1e-9);
  }
}

TEST_CASE("minimize_quartic_interval examples") {
  auto m = minimize_quartic_interval({1, 0, -2, 0, 0}, 0.0, 2.0);
  CHECK(m.arg == doctest::Approx(1.0));
  m = minimize_quartic_interval({1, 0, 0, 0, 0}, 1.0, 2.0);
  CHECK(m.arg == 1.0);
  m = minimize_quartic_interval({1, 0, 0, 0, 0}, -0.5, 0.5);
  CHECK(m.arg == 0.0);
  m = minimize_quartic_interval({0, 0, 0, 0, 2}, 3.0, 4.0);
  CHECK(m.arg == 3.0);
  CHECK_THROWS_AS(minimize_quartic_interval({1, 0, 0, 0, 0}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("minimize_quartic_interval beats grid search") {
  Rng rng(29);
  for (int k = 0; k < 1000; ++k) {
    QuarticCoeffs c = random_coercive(rng);
    if (k % 4 == 0) c.d4 = -c.d4;  // bounded intervals need no coercivity
    const double a = 4 * rng.normal(), b = 4 * rng.normal();
    const double lo = std::min(a, b), hi = std::max(a, b);
    const ScalarMin m = minimize_quartic_interval(c, lo, hi);
    CHECK(m.arg >= lo);
    CHECK(m.arg <= hi);
    CHECK(m.value <= grid_min(c, lo, hi, 100000) + 1e-8);
  }
}

TEST_CASE("fost examples") {
  CHECK(fost(0, 0, 1, -4, 2).arg == doctest::Approx(1.0));
  CHECK(fost(1, 0, 2, 1.5, 2).arg == 0.0);
  CHECK(fost(3, 0, 0.5, -0.7, 0.7).arg == 0.0);
  CHECK_THROWS_AS(fost(1, 0, 0, 0, -1), std::invalid_argument);
  CHECK_THROWS_AS(fost(-1, 0, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fost(0, 0, -1, 0, 1), std::domain_error);
}

TEST_CASE("fost degenerates to soft thresholding") {
  Rng rng(31);
  for (int k = 0; k < 1000; ++k) {
    const double u2 = rng.uniform(0.01, 5.0), u1 = 4 * rng.normal(), tau = rng.uniform(0.0, 4.0);
    const double center = -u1 / (2 * u2), thresh = tau / (2 * u2);
    const double st = std::copysign(std::max(std::abs(center) - thresh, 0.0), center);
    CHECK(std::abs(fost(0, 0, u2, u1, tau).arg - st) <= 1e-12 * std::max(1.0, std::abs(st)));
  }
}

TEST_CASE("fost with zero weight equals minimize_quartic") {
  Rng rng(37);
  for (int k = 0; k < 2000; ++k) {
    const QuarticCoeffs c = random_coercive(rng);
    const ScalarMin a = fost(c.d4, c.d3, c.d2, c.d1, 0.0);
    const ScalarMin b = minimize_quartic({c.d4, c.d3, c.d2, c.d1, 0.0});
    CHECK(a.arg == doctest::Approx(b.arg).epsilon(1e-9));
  }
}

TEST_CASE("fost beats grid search") {
  Rng rng(41);
  for (int k = 0; k < 1000; ++k) {
    const QuarticCoeffs c = random_coercive(rng);
    const double tau = rng.uniform(0.0, 6.0);
    const ScalarMin m = fost(c.d4, c.d3, c.d2, c.d1, tau);
    auto psi = [&](double b) { return (((c.d4 * b + c.d3) * b + c.d2) * b + c.d1) * b + tau * std::abs(b); };
    const double r = cauchy_radius(c) + tau / (4 * c.d4);
    CHECK(m.value == doctest::Approx(psi(m.arg)).epsilon(1e-12));
    CHECK(m.value <= grid_min(psi, -r, r, 100000) + 1e-8);
  }
}

TEST_CASE("coordinate coefficients on a scalar instance") {
  const auto ens = scalar_ensemble(1.0, 1.0);
  SolverState st = make_state(ens, RealVec{1, 0});
  const QuarticCoeffs c = coordinate_coeffs(ens, st, 0);
  CHECK(c.d4 == 1.0);
  CHECK(c.d3 == 4.0);
  CHECK(c.d2 == 4.0);
  CHECK(c.d1 == 0.0);
  CHECK(c.d0 == 0.0);
  CHECK_THROWS_AS(coordinate_coeffs(ens, st, 2), std::out_of_range);
}

TEST_CASE("odd coefficients vanish at the origin") {
  const auto ens = random_ensemble(6, 30, 3);
  SolverState st = make_state(ens, RealVec(12, 0.0));
  for (std::size_t i = 0; i < 12; ++i) {
    const QuarticCoeffs c = coordinate_coeffs(ens, st, i);
    CHECK(c.d3 == 0.0);
    CHECK(c.d1 == 0.0);
    CHECK(c.d4 > 0.0);
  }
}

TEST_CASE("coordinate coefficients match direct evaluation") {
  Rng rng(43);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(10), m = 1 + rng.below(40);
    const auto ens = random_ensemble(n, m, 500 + k, k % 2 ? std::optional<double>(10.0) : std::nullopt);
    const RealVec xr = random_real(2 * n, 600 + k);
    SolverState st = make_state(ens, xr);
    const std::size_t i = rng.below(2 * n);
    const QuarticCoeffs c = coordinate_coeffs(ens, st, i);
    for (int p = 0; p < 11; ++p) {
      const double alpha = -2.5 + 0.5 * p;
      RealVec moved = xr;
      moved[i] += alpha;
      const double direct = objective(ens, moved);
      CHECK(std::abs(c(alpha) - direct) <= 1e-9 * std::max(1.0, direct));
    }
  }
}

TEST_CASE("direction coefficients match direct evaluation") {
  const auto ens = random_ensemble(5, 25, 9);
  const ComplexVec x = cdpr::test::random_vector(5, 10);
  const ComplexVec d = cdpr::test::random_vector(5, 11);
  const ComplexVec z = ens.vectors().apply(x);
  const ComplexVec w = ens.vectors().apply(d);
  const QuarticCoeffs c = direction_coeffs(z, w, ens.intensities());
  for (double alpha : {-1.0, -0.3, 0.0, 0.25, 2.0}) {
    ComplexVec moved = x;
    for (std::size_t j = 0; j < 5; ++j) moved[j] += alpha * d[j];
    CHECK(c(alpha) == doctest::Approx(objective(ens, moved)).epsilon(1e-10));
  }
}

}  // TEST_SUITE
