#include "cdpr/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdpr/rng.hpp"

namespace cdpr {

ComplexVec gen_qpsk(std::size_t count, std::uint64_t seed) {
  static constexpr cplx kPoints[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  Rng rng(seed);
  ComplexVec s(count);
  for (auto& v : s) v = kPoints[rng.below(4)];
  return s;
}

ComplexVec convolve(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  ComplexVec out(a.size() + b.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) out[i + k] += a[i] * b[k];
  }
  return out;
}

ComplexVec channel_output(std::span<const cplx> h, std::span<const cplx> s,
                          std::optional<double> snr_db, std::uint64_t seed) {
  if (squared_norm(h) == 0.0) throw std::invalid_argument("channel_output: all-zero channel");
  ComplexVec r = convolve(s, h);
  if (snr_db && !r.empty()) {
    const double power = squared_norm(r) / static_cast<double>(r.size());
    const double sigma = std::sqrt(power / std::pow(10.0, *snr_db / 10.0));
    Rng rng(seed);
    for (auto& v : r) v += sigma * rng.complex_normal();
  }
  return r;
}

double dispersion_constant(std::span<const cplx> symbols) {
  double m2 = 0.0, m4 = 0.0;
  for (const auto& s : symbols) {
    const double p = std::norm(s);
    m2 += p;
    m4 += p * p;
  }
  if (!(m2 > 0.0)) throw std::invalid_argument("dispersion_constant: zero-power symbol model");
  return m4 / m2;
}

MeasurementEnsemble build_cma_ensemble(std::span<const cplx> received, std::size_t taps,
                                       double kappa) {
  if (taps < 1) throw std::invalid_argument("build_cma_ensemble: need at least one tap");
  if (taps > received.size()) {
    throw std::invalid_argument("build_cma_ensemble: equalizer longer than the received block");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("build_cma_ensemble: kappa must be > 0");
  const std::size_t rows = received.size() - taps + 1;
  SamplingMatrix a(rows, taps);
  for (std::size_t m = 0; m < rows; ++m) {
    const std::size_t n = m + taps - 1;
    for (std::size_t i = 0; i < taps; ++i) a.at(m, i) = received[n - i];
  }
  return MeasurementEnsemble(std::move(a), RealVec(rows, kappa));
}

double isi_of_response(std::span<const cplx> v) {
  double total = 0.0, peak = 0.0;
  for (const auto& e : v) {
    const double p = std::norm(e);
    total += p;
    peak = std::max(peak, p);
  }
  if (!(peak > 0.0)) throw std::invalid_argument("isi: all-zero combined response");
  return (total - peak) / peak;
}

double isi(std::span<const cplx> h, std::span<const cplx> w) {
  ComplexVec wc(w.begin(), w.end());
  for (auto& e : wc) e = std::conj(e);
  return isi_of_response(convolve(h, wc));
}

ComplexVec center_tap(std::size_t taps) {
  if (taps < 1) throw std::invalid_argument("center_tap: need at least one tap");
  ComplexVec w(taps, cplx{0.0, 0.0});
  w[(taps + 1) / 2 - 1] = 1.0;
  return w;
}

EqualizerResult equalize_run(std::span<const cplx> channel, std::size_t n_symbols,
                             std::size_t taps, std::optional<double> snr_db,
                             const EqualizerConfig& config) {
  const ComplexVec symbols = gen_qpsk(n_symbols, derive_seed(config.seed, 0, Stream::kSymbols));
  const ComplexVec received =
      channel_output(channel, symbols, snr_db, derive_seed(config.seed, 0, Stream::kChannelNoise));
  static constexpr cplx kQpsk[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  const double kappa = dispersion_constant(kQpsk);
  const MeasurementEnsemble ens = build_cma_ensemble(received, taps, kappa);

  EqualizerResult out;
  if (config.init == EqualizerInit::kSpectral) {
    SpectralConfig sc;
    sc.seed = derive_seed(config.seed, 0, Stream::kInit);
    out.w0 = spectral_init(ens, sc);
  } else {
    out.w0 = center_tap(taps);
  }
  out.initial_isi = isi(channel, out.w0);

  RunObserver observer;
  const ComplexVec h(channel.begin(), channel.end());
  observer.isi = [h](std::span<const cplx> w) { return isi(h, w); };

  if (const auto* cd = std::get_if<SolverConfig>(&config.solver)) {
    out.run = run(ens, out.w0, *cd, observer);
  } else {
    out.run = wf_run(ens, out.w0, std::get<WfConfig>(config.solver), observer).run;
  }
  out.w = out.run.x;
  for (const auto& rec : out.run.trace.records) out.isi_trace.push_back(rec.isi);
  return out;
}

}  // namespace cdpr
