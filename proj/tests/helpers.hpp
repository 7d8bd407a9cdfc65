#pragma once

#include <cstdint>
#include <optional>

#include "cdpr/ensemble.hpp"
#include "cdpr/measurement.hpp"
#include "cdpr/rng.hpp"

namespace cdpr::test {

inline ComplexVec random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexVec x(n);
  for (auto& v : x) v = rng.complex_normal();
  return x;
}

inline RealVec random_real(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  RealVec x(n);
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

// Gaussian ensemble measuring a random signal, optionally with noise.
inline MeasurementEnsemble random_ensemble(std::size_t n, std::size_t m, std::uint64_t seed,
                                           std::optional<double> snr_db = std::nullopt) {
  SamplingMatrix a = gen_gaussian_vectors(n, m, derive_seed(seed, 0, Stream::kSampling));
  const ComplexVec x = gen_signal(n, derive_seed(seed, 0, Stream::kSignal));
  RealVec b = measure(a, x, snr_db, derive_seed(seed, 0, Stream::kNoise));
  return MeasurementEnsemble(std::move(a), std::move(b));
}

inline MeasurementEnsemble scalar_ensemble(cplx a, double b) {
  SamplingMatrix s(1, 1);
  s.at(0, 0) = a;
  return MeasurementEnsemble(std::move(s), RealVec{b});
}

}  // namespace cdpr::test
