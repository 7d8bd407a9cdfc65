#include "cdpr/sparse_cd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdpr/scalar_min.hpp"
#include "detail/driver.hpp"

namespace cdpr {

namespace {

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

StepResult l1_step_with_norm(const MeasurementEnsemble& ens, SolverState& state, std::size_t i,
                             double tau, double& norm) {
  const CoordinateQuartic q = assemble_coordinate(ens, state, i);
  const QuarticCoeffs& d = q.coeffs;
  const double xi = state.x[i];
  // Shift to beta = xi + alpha.
  const double u4 = d.d4;
  const double u3 = d.d3 - 4.0 * xi * d.d4;
  const double u2 = d.d2 - 3.0 * xi * d.d3 + 6.0 * xi * xi * d.d4;
  const double u1 = d.d1 - 2.0 * xi * d.d2 + 3.0 * xi * xi * d.d3 - 4.0 * xi * xi * xi * d.d4;
  const double beta = fost(u4, u3, u2, u1, tau).arg;

  StepResult out;
  out.value_before = d.d0 + tau * norm;
  out.eval_error = q.eval_error + 4.0 * std::numeric_limits<double>::epsilon() * tau * norm;
  const double alpha = beta - xi;
  const double f_new = d(alpha);
  const double old_term = d.d0 + tau * std::abs(xi);
  const double new_term = f_new + tau * std::abs(beta);
  if (alpha != 0.0 && new_term < old_term) {
    out.alpha = alpha;
    norm += std::abs(beta) - std::abs(xi);
    stage_shift(ens, state, i, alpha);
    state.objective = f_new;
  } else {
    state.objective = d.d0;
  }
  out.value_after = state.objective + tau * norm;
  return out;
}

}  // namespace

void L1Config::validate() const {
  if (rule == IndexRule::kGreedy) {
    throw std::invalid_argument(
        "L1Config.rule: greedy selection needs a gradient and the l1 objective is non-smooth");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("L1Config.tau must be > 0");
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("L1Config.tol must be > 0");
  if (max_cycles < 1) throw std::invalid_argument("L1Config.max_cycles must be >= 1");
  if (trace_every < 1) throw std::invalid_argument("L1Config.trace_every must be >= 1");
  if (!(support_threshold >= 0.0)) {
    throw std::invalid_argument("L1Config.support_threshold must be >= 0");
  }
}

double l1_objective(const MeasurementEnsemble& ens, std::span<const double> xr, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("l1_objective: tau must be >= 0");
  return objective(ens, xr) + tau * l1_norm(xr);
}

StepResult l1_cd_step(const MeasurementEnsemble& ens, SolverState& state, std::size_t i,
                      double tau) {
  double norm = l1_norm(state.x);
  return l1_step_with_norm(ens, state, i, tau, norm);
}

std::vector<std::size_t> support_of(std::span<const double> xr, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < xr.size(); ++i) {
    if (std::abs(xr[i]) > threshold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> entry_support_coordinates(std::span<const cplx> x, double threshold) {
  const std::size_t n = x.size();
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(x[j].real()) > threshold || std::abs(x[j].imag()) > threshold) out.push_back(j);
  }
  const std::size_t entries = out.size();
  for (std::size_t k = 0; k < entries; ++k) out.push_back(out[k] + n);
  return out;
}

L1Result l1_run(const MeasurementEnsemble& ens, std::span<const cplx> x0, const L1Config& config,
                const RunObserver& observer) {
  config.validate();
  if (x0.size() != ens.signal_length()) throw std::invalid_argument("l1_run: dimension mismatch");
  if (!all_finite(x0)) throw std::invalid_argument("l1_run: non-finite initial point");

  SolverState state = make_state(ens, embed(x0));
  Rng rng(config.seed);
  double norm = l1_norm(state.x);
  const double tau = config.tau;

  auto pick = [&](std::uint64_t k) { return select_index(config.rule, k, ens, state, rng); };
  auto step = [&](std::size_t i) { return l1_step_with_norm(ens, state, i, tau, norm); };
  auto traced = [&](const SolverState& s) {
    norm = l1_norm(s.x);
    return s.objective + tau * norm;
  };
  const detail::DriverLimits limits{config.tol, config.max_cycles, config.trace_every};

  L1Result out;
  out.run = detail::drive(ens, state, 2 * ens.signal_length(), limits, observer, pick, step, traced);
  if (config.debias) {
    const auto support = entry_support_coordinates(out.run.x, config.support_threshold);
    SolverConfig refit;
    refit.max_cycles = config.max_cycles;
    refit.trace_every = config.trace_every;
    out.debias = run_on_coordinates(ens, out.run.x, support, refit, observer);
  }
  return out;
}

}  // namespace cdpr
