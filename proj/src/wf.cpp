#include "cdpr/wf.hpp"

#include <stdexcept>

#include "cdpr/scalar_min.hpp"
#include "detail/driver.hpp"

namespace cdpr {

double default_fixed_step(const MeasurementEnsemble& ens, std::span<const cplx> x0) {
  const double nrm = squared_norm(x0);
  if (!(nrm > 0.0)) throw std::invalid_argument("default_fixed_step: zero initial point");
  return 0.05 / (static_cast<double>(ens.measurement_count()) * nrm);
}

WfStepResult wf_step(const MeasurementEnsemble& ens, SolverState& state, const StepPolicy& policy) {
  const RealVec g = gradient(ens, state);
  if (!all_finite(g)) throw std::runtime_error("wf_step: non-finite gradient");

  WfStepResult out;
  out.value_before = state.objective;
  out.value_after = state.objective;

  ComplexVec direction = unembed(g);
  bool zero = true;
  for (auto& d : direction) {
    d = -d;
    if (d != cplx{0.0, 0.0}) zero = false;
  }
  if (zero) return out;

  const ComplexVec w = ens.vectors().apply(direction);
  state.work.row_touches += ens.measurement_count();
  state.work.entry_touches += ens.measurement_count() * ens.signal_length();

  double step = 0.0;
  if (const auto* fixed = std::get_if<FixedStep>(&policy)) {
    step = fixed->mu;
  } else {
    const QuarticCoeffs c = direction_coeffs(state.z, w, ens.intensities());
    const ScalarMin best = minimize_quartic(c);
    if (best.value < c.d0) step = best.arg;
  }
  if (step == 0.0) return out;

  const std::size_t n = ens.signal_length();
  for (std::size_t j = 0; j < n; ++j) {
    state.x[j] += step * direction[j].real();
    state.x[n + j] += step * direction[j].imag();
  }
  for (std::size_t m = 0; m < w.size(); ++m) state.z[m] += step * w[m];
  ++state.updates_since_refresh;
  state.objective = objective_from_products(state.z, ens.intensities());
  out.step = step;
  out.value_after = state.objective;
  return out;
}

WfResult wf_run(const MeasurementEnsemble& ens, std::span<const cplx> x0, const WfConfig& config,
                const RunObserver& observer) {
  if (config.max_iters < 1) throw std::invalid_argument("WfConfig.max_iters must be >= 1");
  if (config.trace_every < 1) throw std::invalid_argument("WfConfig.trace_every must be >= 1");
  if (config.tol && !(*config.tol > 0.0)) throw std::invalid_argument("WfConfig.tol must be > 0");
  if (x0.size() != ens.signal_length()) throw std::invalid_argument("wf_run: dimension mismatch");
  if (!all_finite(x0)) throw std::invalid_argument("wf_run: non-finite initial point");

  SolverState state = make_state(ens, embed(x0));
  WfResult out;
  RunResult& r = out.run;
  const double tol = config.tol ? *config.tol : default_tolerance(state.objective);
  r.trace.records.push_back(detail::make_record(0, state.objective, 0, state, observer));

  std::size_t rising = 0;
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    if (state.updates_since_refresh >= kRefreshInterval) refresh_full(ens, state);
    const WfStepResult s = wf_step(ens, state, config.policy);
    r.cycles = it;
    r.iterations = it;
    if (s.value_after > s.value_before) {
      ++r.ascents;
      ++rising;
    } else {
      rising = 0;
    }
    // An overflowing iterate ends the run before the next gradient would throw.
    const bool diverged = rising >= 10 || !std::isfinite(s.value_after);
    const bool done =
        !diverged && s.value_after <= s.value_before && s.value_before - s.value_after < tol;
    if (done || diverged || it == config.max_iters || it % config.trace_every == 0) {
      r.trace.records.push_back(detail::make_record(it, state.objective, it, state, observer));
    }
    if (diverged) {
      out.status = WfStatus::kDiverged;
      break;
    }
    if (done) {
      out.status = WfStatus::kConverged;
      r.converged = true;
      break;
    }
  }
  r.objective = state.objective;
  r.x = unembed(state.x);
  r.work = state.work;
  return out;
}

}  // namespace cdpr
