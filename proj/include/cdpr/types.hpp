#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cdpr {

using cplx = std::complex<double>;
using ComplexVec = std::vector<cplx>;
using RealVec = std::vector<double>;

/// Real embedding [Re(x); Im(x)] of a complex vector.
RealVec embed(std::span<const cplx> x);

/// Inverse of embed(). Throws std::invalid_argument on odd length.
ComplexVec unembed(std::span<const double> xr);

bool all_finite(std::span<const cplx> x);
bool all_finite(std::span<const double> x);

double squared_norm(std::span<const cplx> x);
double squared_norm(std::span<const double> x);

// x^H y
cplx inner(std::span<const cplx> x, std::span<const cplx> y);

}  // namespace cdpr
