#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cdpr/cd_solvers.hpp"
#include "cdpr/ensemble.hpp"
#include "cdpr/spectral.hpp"
#include "cdpr/wf.hpp"

namespace cdpr {

/// Seven-tap FIR test channel.
inline const ComplexVec kTestChannel = {0.4, 1.0, -0.7, 0.6, 0.3, -0.4, 0.1};

/// i.i.d. symbols drawn uniformly from {1, -1, j, -j}.
ComplexVec gen_qpsk(std::size_t count, std::uint64_t seed);

/// Full linear convolution, length a.size() + b.size() - 1.
ComplexVec convolve(std::span<const cplx> a, std::span<const cplx> b);

/// r = s * h plus circular white Gaussian noise whose variance is set from
/// the realized mean power of s * h. Throws std::invalid_argument if h is all zero.
ComplexVec channel_output(std::span<const cplx> h, std::span<const cplx> s,
                          std::optional<double> snr_db = std::nullopt, std::uint64_t seed = 0);

/// E|s|^4 / E|s|^2 over equiprobable points. Throws on zero power.
double dispersion_constant(std::span<const cplx> symbols);

/// Rows r_n = [r(n), ..., r(n-P+1)] for every full window, all intensities
/// kappa. The constant-modulus cost sum_n (|w^H r_n|^2 - kappa)^2 is then the
/// phase-retrieval objective of this ensemble.
MeasurementEnsemble build_cma_ensemble(std::span<const cplx> received, std::size_t taps,
                                       double kappa);

/// (sum |v|^2 - max |v|^2) / max |v|^2. Throws for an all-zero response.
double isi_of_response(std::span<const cplx> v);

/// ISI of the combined response h * conj(w) of channel h and an equalizer
/// producing y(n) = w^H r_n.
double isi(std::span<const cplx> h, std::span<const cplx> w);

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

enum class EqualizerInit { kCenterTap, kSpectral };

using SolverChoice = std::variant<SolverConfig, WfConfig>;

struct EqualizerConfig {
  SolverChoice solver = SolverConfig{};
  EqualizerInit init = EqualizerInit::kCenterTap;
  std::uint64_t seed = 0;  // symbols, noise and spectral start derive from it
};

struct EqualizerResult {
  ComplexVec w;
  ComplexVec w0;
  double initial_isi = 0.0;
  std::vector<double> isi_trace;  // per cycle, starting at w0
  RunResult run;
};

/// e_c with c = ceil(P/2) - 1.
ComplexVec center_tap(std::size_t taps);

/// Symbols -> channel -> constant-modulus ensemble -> solver, tracking ISI.
EqualizerResult equalize_run(std::span<const cplx> channel, std::size_t n_symbols,
                             std::size_t taps, std::optional<double> snr_db,
                             const EqualizerConfig& config);

}  // namespace cdpr
