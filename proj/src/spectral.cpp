#include "cdpr/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "cdpr/rng.hpp"

namespace cdpr {

namespace {

ComplexVec apply_weighted_covariance(const MeasurementEnsemble& ens, std::span<const cplx> v,
                                     double shift) {
  ComplexVec z = ens.vectors().apply(v);
  const auto b = ens.intensities();
  for (std::size_t m = 0; m < z.size(); ++m) z[m] *= b[m];
  ComplexVec y = ens.vectors().apply_adjoint(z);
  const double inv_m = 1.0 / static_cast<double>(ens.measurement_count());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = y[j] * inv_m + shift * v[j];
  return y;
}

void normalize(ComplexVec& v) {
  const double nrm = std::sqrt(squared_norm(v));
  for (auto& e : v) e /= nrm;
}

PowerIterationResult iterate(const MeasurementEnsemble& ens, const SpectralConfig& config,
                             double shift) {
  Rng rng(config.seed);
  ComplexVec v(ens.signal_length());
  for (auto& e : v) e = rng.complex_normal();
  normalize(v);

  PowerIterationResult out;
  out.shift = shift;
  for (std::size_t k = 0; k < config.power_iters; ++k) {
    ComplexVec y = apply_weighted_covariance(ens, v, shift);
    out.rayleigh.push_back(inner(v, y).real());
    const double nrm = std::sqrt(squared_norm(y));
    out.iterations = k + 1;
    if (!(nrm > 0.0)) break;  // v lies in the null space
    for (auto& e : y) e /= nrm;
    const double change = 1.0 - std::abs(inner(v, y));
    v = std::move(y);
    if (change < config.tol) break;
  }
  out.vector = std::move(v);
  out.eigenvalue = inner(out.vector, apply_weighted_covariance(ens, out.vector, 0.0)).real();
  return out;
}

}  // namespace

PowerIterationResult principal_eigenvector(const MeasurementEnsemble& ens,
                                           const SpectralConfig& config) {
  if (config.power_iters < 1) throw std::invalid_argument("SpectralConfig.power_iters must be >= 1");
  PowerIterationResult first = iterate(ens, config, 0.0);
  if (first.eigenvalue >= 0.0) return first;
  // Dominant eigenvalue is negative: shift it to zero so the largest
  // algebraic eigenvalue dominates.
  return iterate(ens, config, -first.eigenvalue);
}

ComplexVec spectral_init(const MeasurementEnsemble& ens, const SpectralConfig& config) {
  if (!(ens.intensity_l1() > 0.0)) {
    throw std::invalid_argument("spectral_init: all intensities are zero");
  }
  PowerIterationResult p = principal_eigenvector(ens, config);
  const double target = static_cast<double>(ens.signal_length()) * ens.intensity_l1() /
                        ens.frobenius_squared();
  const double scale = std::sqrt(target);
  for (auto& e : p.vector) e *= scale;
  return std::move(p.vector);
}

}  // namespace cdpr
