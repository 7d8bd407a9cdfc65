#include "cdpr/measurement.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cdpr/rng.hpp"

namespace cdpr {

SamplingMatrix gen_gaussian_vectors(std::size_t N, std::size_t M, std::uint64_t seed) {
  Rng rng(seed);
  SamplingMatrix a(M, N);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t j = 0; j < N; ++j) a.at(m, j) = rng.complex_normal();
  }
  return a;
}

ComplexVec gen_signal(std::size_t N, std::uint64_t seed) {
  Rng rng(seed);
  ComplexVec x(N);
  for (auto& v : x) v = rng.complex_normal();
  return x;
}

ComplexVec gen_sparse_signal(std::size_t N, std::size_t K, std::uint64_t seed) {
  if (K < 1 || K > N) throw std::invalid_argument("gen_sparse_signal: need 1 <= K <= N");
  Rng rng(seed);
  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(N - k));
    std::swap(idx[k], idx[pick]);
  }
  constexpr double lo = 1.0 / std::numbers::sqrt2;
  constexpr double hi = 2.0 / std::numbers::sqrt2;
  auto part = [&] {
    const double mag = rng.uniform(lo, hi);
    return rng.uniform() < 0.5 ? -mag : mag;
  };
  ComplexVec x(N, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < K; ++k) {
    const double re = part();
    const double im = part();
    x[idx[k]] = {re, im};
  }
  return x;
}

RealVec measure(const SamplingMatrix& vectors, std::span<const cplx> x,
                std::optional<double> snr_db, std::uint64_t noise_seed) {
  if (x.size() != vectors.cols()) throw std::invalid_argument("measure: dimension mismatch");
  const ComplexVec z = vectors.apply(x);
  RealVec b(z.size());
  double energy = 0.0;
  for (std::size_t m = 0; m < z.size(); ++m) {
    b[m] = std::norm(z[m]);
    energy += b[m] * b[m];
  }
  if (snr_db) {
    const double variance =
        energy / (static_cast<double>(b.size()) * std::pow(10.0, *snr_db / 10.0));
    const double sigma = std::sqrt(variance);
    Rng rng(noise_seed);
    for (auto& v : b) v += sigma * rng.normal();
  }
  return b;
}

RealVec magnitudes_to_intensities(std::span<const double> r) {
  RealVec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] * r[i];
  return out;
}

Instance make_instance(const GenConfig& cfg) {
  if (cfg.N < 1 || cfg.M < 1) throw std::invalid_argument("make_instance: N and M must be >= 1");
  auto vectors = gen_gaussian_vectors(cfg.N, cfg.M, derive_seed(cfg.seed, 0, Stream::kSampling));
  ComplexVec truth = cfg.K ? gen_sparse_signal(cfg.N, *cfg.K, derive_seed(cfg.seed, 0, Stream::kSupport))
                           : gen_signal(cfg.N, derive_seed(cfg.seed, 0, Stream::kSignal));
  RealVec b = measure(vectors, truth, cfg.snr_db, derive_seed(cfg.seed, 0, Stream::kNoise));
  return Instance{MeasurementEnsemble(std::move(vectors), std::move(b)), std::move(truth)};
}

}  // namespace cdpr
