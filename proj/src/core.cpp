#include "cdpr/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdpr {

namespace {

void require_length(const MeasurementEnsemble& ens, std::size_t real_length) {
  if (real_length != 2 * ens.signal_length()) {
    throw std::invalid_argument("dimension mismatch between iterate and ensemble");
  }
}

void count_dense_pass(const MeasurementEnsemble& ens, WorkCounter& work) {
  work.row_touches += ens.measurement_count();
  work.entry_touches += ens.measurement_count() * ens.signal_length();
}

// Direction of z induced by a unit step along real coordinate i:
// conj(a_mj) for the real half, j * conj(a_mj) for the imaginary half.
inline cplx coordinate_direction(cplx a, bool imaginary_half) {
  const cplx c = std::conj(a);
  return imaginary_half ? cplx{-c.imag(), c.real()} : c;
}

void apply_shift_to_cache(const MeasurementEnsemble& ens, SolverState& state, std::size_t index,
                          double delta) {
  const std::size_t n = ens.signal_length();
  const bool imag = index >= n;
  const auto col = ens.vectors().column(imag ? index - n : index);
  for (std::size_t m = 0; m < col.size(); ++m) {
    state.z[m] += delta * coordinate_direction(col[m], imag);
  }
  state.work.row_touches += col.size();
  state.work.entry_touches += col.size();
  ++state.updates_since_refresh;
}

}  // namespace

double objective_from_products(std::span<const cplx> z, std::span<const double> b) {
  if (z.size() != b.size()) throw std::invalid_argument("objective: length mismatch");
  double f = 0.0;
  for (std::size_t m = 0; m < z.size(); ++m) {
    const double r = std::norm(z[m]) - b[m];
    f += r * r;
  }
  return f;
}

double objective(const MeasurementEnsemble& ens, std::span<const cplx> x) {
  if (x.size() != ens.signal_length()) {
    throw std::invalid_argument("objective: dimension mismatch");
  }
  return objective_from_products(ens.vectors().apply(x), ens.intensities());
}

double objective(const MeasurementEnsemble& ens, std::span<const double> xr) {
  require_length(ens, xr.size());
  return objective(ens, unembed(xr));
}

namespace {

RealVec gradient_from_products(const MeasurementEnsemble& ens, std::span<const cplx> z) {
  const auto b = ens.intensities();
  ComplexVec weighted(z.size());
  for (std::size_t m = 0; m < z.size(); ++m) weighted[m] = (std::norm(z[m]) - b[m]) * z[m];
  const ComplexVec s = ens.vectors().apply_adjoint(weighted);
  const std::size_t n = ens.signal_length();
  RealVec g(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = 4.0 * s[j].real();
    g[n + j] = 4.0 * s[j].imag();
  }
  return g;
}

}  // namespace

RealVec gradient(const MeasurementEnsemble& ens, std::span<const double> xr) {
  require_length(ens, xr.size());
  return gradient_from_products(ens, ens.vectors().apply(unembed(xr)));
}

RealVec gradient(const MeasurementEnsemble& ens, SolverState& state) {
  flush(ens, state);
  count_dense_pass(ens, state.work);
  return gradient_from_products(ens, state.z);
}

SolverState make_state(const MeasurementEnsemble& ens, std::span<const double> xr) {
  require_length(ens, xr.size());
  if (!all_finite(xr)) throw std::invalid_argument("make_state: non-finite iterate");
  SolverState state;
  state.x.assign(xr.begin(), xr.end());
  refresh_full(ens, state);
  return state;
}

void refresh_full(const MeasurementEnsemble& ens, SolverState& state) {
  state.pending.reset();
  state.z = ens.vectors().apply(unembed(state.x));
  state.objective = objective_from_products(state.z, ens.intensities());
  state.updates_since_refresh = 0;
  count_dense_pass(ens, state.work);
  ++state.work.full_refreshes;
}

void shift_coordinate(const MeasurementEnsemble& ens, SolverState& state, std::size_t index,
                      double delta) {
  if (index >= state.x.size()) throw std::out_of_range("shift_coordinate: index out of range");
  flush(ens, state);
  if (delta == 0.0) return;
  state.x[index] += delta;
  apply_shift_to_cache(ens, state, index, delta);
}

void stage_shift(const MeasurementEnsemble& ens, SolverState& state, std::size_t index,
                 double delta) {
  if (index >= state.x.size()) throw std::out_of_range("stage_shift: index out of range");
  flush(ens, state);
  if (delta == 0.0) return;
  state.x[index] += delta;
  state.pending = SolverState::PendingShift{index, delta};
}

void flush(const MeasurementEnsemble& ens, SolverState& state) {
  if (!state.pending) return;
  const auto p = *state.pending;
  state.pending.reset();
  apply_shift_to_cache(ens, state, p.index, p.delta);
}

double cache_deviation(const MeasurementEnsemble& ens, const SolverState& state) {
  SolverState copy = state;
  flush(ens, copy);
  const ComplexVec fresh = ens.vectors().apply(unembed(copy.x));
  double scale = 0.0;
  for (const auto& v : fresh) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t m = 0; m < fresh.size(); ++m) {
    worst = std::max(worst, std::abs(fresh[m] - copy.z[m]));
  }
  return scale > 0.0 ? worst / scale : worst;
}

double orbit_phase(std::span<const cplx> z, std::span<const cplx> x_ref) {
  if (z.size() != x_ref.size()) throw std::invalid_argument("orbit_phase: length mismatch");
  const cplx c = inner(x_ref, z);
  return c == cplx{0.0, 0.0} ? 0.0 : std::arg(c);
}

double dist_to_orbit(std::span<const cplx> z, std::span<const cplx> x_ref) {
  if (z.size() != x_ref.size()) throw std::invalid_argument("dist_to_orbit: length mismatch");
  const cplx rot = std::polar(1.0, orbit_phase(z, x_ref));
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - rot * x_ref[i]);
  return std::sqrt(s);
}

double relative_recovery_error(std::span<const cplx> z, std::span<const cplx> x_ref) {
  const double ref = squared_norm(x_ref);
  if (!(ref > 0.0)) throw std::invalid_argument("relative_recovery_error: zero reference");
  const double d = dist_to_orbit(z, x_ref);
  return d * d / ref;
}

}  // namespace cdpr
