#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "cdpr/ensemble.hpp"
#include "cdpr/types.hpp"

namespace cdpr {

struct GenConfig {
  std::size_t N = 64;
  std::size_t M = 384;
  std::optional<std::size_t> K;       // sparsity; dense signal when absent
  std::optional<double> snr_db;       // noiseless when absent
  std::uint64_t seed = 0;
};

/// M x N matrix of i.i.d. CN(0, 1) entries (E|a|^2 = 1).
SamplingMatrix gen_gaussian_vectors(std::size_t N, std::size_t M, std::uint64_t seed);

/// Length-N vector of i.i.d. CN(0, 1) entries.
ComplexVec gen_signal(std::size_t N, std::uint64_t seed);

/// K-sparse vector with uniformly drawn support. Real and imaginary parts of
/// each nonzero are uniform on [-2/sqrt2, -1/sqrt2] U [1/sqrt2, 2/sqrt2].
/// Throws std::invalid_argument unless 1 <= K <= N.
ComplexVec gen_sparse_signal(std::size_t N, std::size_t K, std::uint64_t seed);

/// b_m = |a_m^H x|^2 + nu_m. With snr_db set, nu_m ~ N(0, s2) where
/// s2 = ||b_clean||^2 / (M 10^{snr/10}).
RealVec measure(const SamplingMatrix& vectors, std::span<const cplx> x,
                std::optional<double> snr_db = std::nullopt, std::uint64_t noise_seed = 0);

/// Squares magnitude-only measurements into intensities.
RealVec magnitudes_to_intensities(std::span<const double> r);

/// Full synthetic instance. Streams for vectors, signal, support and noise
/// are derived from cfg.seed independently.
struct Instance {
  MeasurementEnsemble ensemble;
  ComplexVec truth;
};
Instance make_instance(const GenConfig& cfg);

}  // namespace cdpr
