#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "cdpr/core.hpp"
#include "cdpr/ensemble.hpp"

namespace cdpr {

/// phi(a) = d4 a^4 + d3 a^3 + d2 a^2 + d1 a + d0.
struct QuarticCoeffs {
  double d4 = 0.0, d3 = 0.0, d2 = 0.0, d1 = 0.0, d0 = 0.0;

  double operator()(double a) const { return (((d4 * a + d3) * a + d2) * a + d1) * a + d0; }
  double derivative(double a) const { return ((4.0 * d4 * a + 3.0 * d3) * a + 2.0 * d2) * a + d1; }
  // sum |d_k| |a|^k, the scale against which values at a are compared.
  double magnitude(double a) const;
};

/// Real roots of a cubic, ascending, repeated roots collapsed.
struct CubicRoots {
  std::array<double, 3> values{};
  std::size_t count = 0;
  bool identically_zero = false;

  std::span<const double> roots() const { return {values.data(), count}; }
};

/// Leading coefficients below this fraction of the coefficient inf-norm are
/// treated as zero and the polynomial is solved at lower degree.
inline constexpr double kDegeneracyRatio = 1e-12;

/// Real roots of a3 x^3 + a2 x^2 + a1 x + a0. Trigonometric form when all
/// three roots are real, Cardano otherwise, one Newton step per root.
/// An all-zero polynomial sets identically_zero; a nonzero constant yields
/// no roots.
CubicRoots solve_cubic(double a3, double a2, double a1, double a0);

struct ScalarMin {
  double arg = 0.0;
  double value = 0.0;
};

/// Global minimizer of a coercive quartic (d4 > 0, or d4 = 0 with d2 > 0,
/// d3 = 0). Ties go to the smaller |a|, then the smaller a. A quartic that
/// is constant yields a = 0. Throws std::domain_error when unbounded below.
ScalarMin minimize_quartic(const QuarticCoeffs& c);

/// Minimizer over [lo, hi]: best of interior stationary points and the two
/// endpoints. Throws std::invalid_argument when lo > hi.
ScalarMin minimize_quartic_interval(const QuarticCoeffs& c, double lo, double hi);

/// Fourth-order soft-thresholding: global minimizer of
/// u4 b^4 + u3 b^3 + u2 b^2 + u1 b + tau |b| over at most seven candidates.
/// Throws std::invalid_argument for tau < 0 or u4 < 0, std::domain_error when
/// unbounded below.
ScalarMin fost(double u4, double u3, double u2, double u1, double tau);

/// Coefficients of phi(a) = sum_m (|z_m + a w_m|^2 - b_m)^2.
QuarticCoeffs direction_coeffs(std::span<const cplx> z, std::span<const cplx> w,
                               std::span<const double> b);

struct CoordinateQuartic {
  QuarticCoeffs coeffs;
  // Bound on the floating-point error of coeffs.d0 as a value of f.
  double eval_error = 0.0;
};

/// phi(a) = f(x + a e_i) for real coordinate i in [0, 2N), built in one O(M)
/// pass over the cached products. Folds any staged shift into the cache.
/// Throws std::out_of_range for i >= 2N.
CoordinateQuartic assemble_coordinate(const MeasurementEnsemble& ens, SolverState& state,
                                      std::size_t i);

inline QuarticCoeffs coordinate_coeffs(const MeasurementEnsemble& ens, SolverState& state,
                                       std::size_t i) {
  return assemble_coordinate(ens, state, i).coeffs;
}

}  // namespace cdpr
