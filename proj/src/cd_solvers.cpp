#include "cdpr/cd_solvers.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cdpr/scalar_min.hpp"
#include "detail/driver.hpp"

namespace cdpr {

std::string to_string(IndexRule rule) {
  switch (rule) {
    case IndexRule::kCyclic: return "cyclic";
    case IndexRule::kRandom: return "random";
    case IndexRule::kGreedy: return "greedy";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("SolverConfig.tol must be > 0");
  if (max_cycles < 1) throw std::invalid_argument("SolverConfig.max_cycles must be >= 1");
  if (trace_every < 1) throw std::invalid_argument("SolverConfig.trace_every must be >= 1");
  if (step_bound_eta && !(*step_bound_eta > 0.0)) {
    throw std::invalid_argument("SolverConfig.step_bound_eta must be > 0");
  }
}

std::size_t select_index(IndexRule rule, std::uint64_t k, const MeasurementEnsemble& ens,
                         SolverState& state, Rng& rng) {
  const std::size_t dim = 2 * ens.signal_length();
  switch (rule) {
    case IndexRule::kCyclic:
      return static_cast<std::size_t>(k % dim);
    case IndexRule::kRandom:
      return static_cast<std::size_t>(rng.below(dim));
    case IndexRule::kGreedy: {
      const RealVec g = gradient(ens, state);
      std::size_t best = 0;
      for (std::size_t i = 1; i < g.size(); ++i) {
        if (std::abs(g[i]) > std::abs(g[best])) best = i;
      }
      return best;
    }
  }
  throw std::logic_error("select_index: unknown rule");
}

IndexSelector::IndexSelector(IndexRule rule, std::size_t dimension, std::uint64_t seed)
    : rule_(rule), dimension_(dimension), rng_(seed) {}

std::size_t IndexSelector::next(std::uint64_t k, const MeasurementEnsemble& ens,
                                SolverState& state) {
  return select_index(rule_, k, ens, state, rng_);
}

StepResult cd_step(const MeasurementEnsemble& ens, SolverState& state, std::size_t i,
                   std::optional<double> step_bound_eta) {
  const CoordinateQuartic q = assemble_coordinate(ens, state, i);
  const QuarticCoeffs& c = q.coeffs;
  ScalarMin best;
  if (step_bound_eta) {
    // d1 = phi'(0) is the partial derivative along coordinate i.
    const double bound = 2.0 * *step_bound_eta * std::abs(c.d1);
    best = minimize_quartic_interval(c, -bound, bound);
  } else {
    best = minimize_quartic(c);
  }
  StepResult out;
  out.value_before = c.d0;
  out.eval_error = q.eval_error;
  if (best.arg != 0.0 && best.value < c.d0) {
    out.alpha = best.arg;
    out.value_after = best.value;
    stage_shift(ens, state, i, best.arg);
  } else {
    out.value_after = c.d0;
  }
  state.objective = out.value_after;
  return out;
}

namespace {

RunResult run_impl(const MeasurementEnsemble& ens, std::span<const cplx> x0,
                   std::span<const std::size_t> coordinates, IndexRule rule,
                   const SolverConfig& config, const RunObserver& observer) {
  config.validate();
  if (x0.size() != ens.signal_length()) throw std::invalid_argument("run: dimension mismatch");
  if (!all_finite(x0)) throw std::invalid_argument("run: non-finite initial point");
  SolverState state = make_state(ens, embed(x0));
  Rng rng(config.seed);

  const detail::DriverLimits limits{config.tol, config.max_cycles, config.trace_every};
  auto step = [&](std::size_t i) { return cd_step(ens, state, i, config.step_bound_eta); };
  auto traced = [](const SolverState& s) { return s.objective; };

  if (coordinates.empty()) {
    auto pick = [&](std::uint64_t k) { return select_index(rule, k, ens, state, rng); };
    return detail::drive(ens, state, 2 * ens.signal_length(), limits, observer, pick, step,
                         traced);
  }
  for (std::size_t i : coordinates) {
    if (i >= 2 * ens.signal_length()) throw std::out_of_range("run: coordinate out of range");
  }
  auto pick = [&](std::uint64_t k) { return coordinates[k % coordinates.size()]; };
  return detail::drive(ens, state, coordinates.size(), limits, observer, pick, step, traced);
}

}  // namespace

RunResult run(const MeasurementEnsemble& ens, std::span<const cplx> x0, const SolverConfig& config,
              const RunObserver& observer) {
  return run_impl(ens, x0, {}, config.rule, config, observer);
}

RunResult run_on_coordinates(const MeasurementEnsemble& ens, std::span<const cplx> x0,
                             std::span<const std::size_t> coordinates, const SolverConfig& config,
                             const RunObserver& observer) {
  if (coordinates.empty()) {
    config.validate();
    RunResult r;
    SolverState state = make_state(ens, embed(x0));
    r.x.assign(x0.begin(), x0.end());
    r.objective = state.objective;
    r.trace.records.push_back(detail::make_record(0, state.objective, 0, state, observer));
    r.converged = true;
    return r;
  }
  return run_impl(ens, x0, coordinates, IndexRule::kCyclic, config, observer);
}

}  // namespace cdpr
