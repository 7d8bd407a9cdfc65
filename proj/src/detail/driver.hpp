#pragma once

#include <cmath>
#include <limits>

#include "cdpr/cd_solvers.hpp"

namespace cdpr::detail {

struct DriverLimits {
  std::optional<double> tol;
  std::size_t max_cycles;
  std::size_t trace_every;
};

inline TraceRecord make_record(std::size_t cycle, double value, std::uint64_t updates,
                               const SolverState& state, const RunObserver& observer) {
  TraceRecord rec;
  rec.cycle = cycle;
  rec.objective = value;
  rec.updates = updates;
  if (!observer.reference.empty() || observer.isi) {
    const ComplexVec x = unembed(state.x);
    if (!observer.reference.empty()) rec.rel_error = relative_recovery_error(x, observer.reference);
    if (observer.isi) rec.isi = observer.isi(x);
  }
  return rec;
}

/// Shared cycle loop for the coordinate-descent family.
///   pick(k)       -> coordinate for iteration k
///   step(i)       -> StepResult in terms of the traced objective
///   traced(state) -> traced objective after a full cache refresh
template <class Pick, class Step, class Traced>
RunResult drive(const MeasurementEnsemble& ens, SolverState& state, std::size_t cycle_length,
                const DriverLimits& limits, const RunObserver& observer, Pick pick, Step step,
                Traced traced) {
  RunResult result;
  double value = traced(state);
  const double tol = limits.tol ? *limits.tol : default_tolerance(value);
  result.trace.records.push_back(make_record(0, value, 0, state, observer));

  double last_before = std::numeric_limits<double>::quiet_NaN();
  double last_error = 0.0;
  std::uint64_t k = 0;
  for (std::size_t cycle = 1; cycle <= limits.max_cycles; ++cycle) {
    const double cycle_start = value;
    for (std::size_t it = 0; it < cycle_length; ++it, ++k) {
      if (state.updates_since_refresh >= kRefreshInterval) refresh_full(ens, state);
      const StepResult s = step(pick(k));
      if (!std::isnan(last_before) && s.value_before > last_before + last_error + s.eval_error) {
        ++result.ascents;
      }
      last_before = s.value_before;
      last_error = s.eval_error;
    }
    refresh_full(ens, state);
    value = traced(state);
    result.cycles = cycle;
    const bool done = cycle_start - value < tol;
    if (done || cycle == limits.max_cycles || cycle % limits.trace_every == 0) {
      result.trace.records.push_back(make_record(cycle, value, k, state, observer));
    }
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.iterations = k;
  result.objective = value;
  result.x = unembed(state.x);
  result.work = state.work;
  return result;
}

}  // namespace cdpr::detail
