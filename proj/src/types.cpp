#include "cdpr/types.hpp"

#include <cmath>
#include <stdexcept>

namespace cdpr {

RealVec embed(std::span<const cplx> x) {
  const std::size_t n = x.size();
  RealVec out(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = x[j].real();
    out[n + j] = x[j].imag();
  }
  return out;
}

ComplexVec unembed(std::span<const double> xr) {
  if (xr.size() % 2 != 0) {
    throw std::invalid_argument("unembed: real embedding must have even length");
  }
  const std::size_t n = xr.size() / 2;
  ComplexVec out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = {xr[j], xr[n + j]};
  return out;
}

bool all_finite(std::span<const cplx> x) {
  for (const auto& v : x) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double squared_norm(std::span<const cplx> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s;
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw std::invalid_argument("inner: length mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

}  // namespace cdpr
