#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cdpr/ensemble.hpp"
#include "cdpr/types.hpp"

namespace cdpr {

struct SpectralConfig {
  std::size_t power_iters = 200;
  double tol = 1e-8;  // stop when 1 - |<v_k, v_{k+1}>| drops below this
  std::uint64_t seed = 0;
};

struct PowerIterationResult {
  ComplexVec vector;                // unit norm
  double eigenvalue = 0.0;          // Rayleigh quotient of the unshifted operator
  std::vector<double> rayleigh;     // per iteration, of the operator actually iterated
  std::size_t iterations = 0;
  double shift = 0.0;               // non-zero when a negative dominant eigenvalue was shifted away
};

/// Principal eigenvector of Y = (1/M) sum_m b_m a_m a_m^H using only the
/// products Y v = (1/M) A^H (b .* (A v)). If the dominant eigenvalue is
/// negative the iteration is repeated on Y + |lambda| I to reach the largest
/// algebraic eigenvalue.
PowerIterationResult principal_eigenvector(const MeasurementEnsemble& ens,
                                           const SpectralConfig& config = {});

/// Spectral starting point: the principal eigenvector scaled to squared norm
/// N ||b||_1 / sum_m ||a_m||^2. Throws std::invalid_argument if b is all zero.
ComplexVec spectral_init(const MeasurementEnsemble& ens, const SpectralConfig& config = {});

}  // namespace cdpr
