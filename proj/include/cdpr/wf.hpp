#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>

#include "cdpr/cd_solvers.hpp"
#include "cdpr/core.hpp"

namespace cdpr {

/// x <- x - mu grad f(x).
struct FixedStep {
  double mu = 0.0;
};
/// x <- x + a* d with d = -grad f(x) and a* the exact minimizer of the
/// quartic f(x + a d).
struct ExactLineSearch {};

using StepPolicy = std::variant<FixedStep, ExactLineSearch>;

/// Fixed step used when none is configured: 0.05 / (M ||x0||^2). With the
/// real-embedding gradient this matches a Wirtinger-flow step of 0.2.
double default_fixed_step(const MeasurementEnsemble& ens, std::span<const cplx> x0);

struct WfStepResult {
  double step = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
};

/// One full-gradient iteration, Theta(MN). Throws std::runtime_error on a
/// non-finite gradient.
WfStepResult wf_step(const MeasurementEnsemble& ens, SolverState& state, const StepPolicy& policy);

enum class WfStatus { kConverged, kMaxIterations, kDiverged };

struct WfConfig {
  StepPolicy policy = ExactLineSearch{};
  std::optional<double> tol;  // default_tolerance(f(x0)) when unset
  std::size_t max_iters = 1000;
  std::size_t trace_every = 1;
};

struct WfResult {
  RunResult run;  // cycles counts iterations
  WfStatus status = WfStatus::kMaxIterations;
};

/// Iterates until the per-iteration decrease drops below tol. A fixed step
/// that raises f for 10 consecutive iterations, or overflows it, aborts with
/// kDiverged.
WfResult wf_run(const MeasurementEnsemble& ens, std::span<const cplx> x0, const WfConfig& config,
                const RunObserver& observer = {});

}  // namespace cdpr
