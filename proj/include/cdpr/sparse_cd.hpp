#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "cdpr/cd_solvers.hpp"

namespace cdpr {

/// Regularization weight used for sparse recovery experiments.
inline double default_tau(std::size_t measurement_count) {
  return 2.35 * static_cast<double>(measurement_count);
}

struct L1Config {
  IndexRule rule = IndexRule::kCyclic;  // cyclic or random; greedy is rejected
  double tau = 0.0;
  std::optional<double> tol;  // default_tolerance(g(x0)) when unset
  std::size_t max_cycles = 1000;
  std::uint64_t seed = 0;
  std::size_t trace_every = 1;
  // Refit by plain cyclic descent on the recovered support after the run.
  // The support is taken per complex entry (both halves of an entry whose
  // real or imaginary part survives), since the l1 term is not invariant to
  // the global phase and may zero one half of a true nonzero.
  bool debias = false;
  double support_threshold = 1e-6;

  void validate() const;
};

/// g(x) = f(x) + tau ||x||_1 over the real embedding.
double l1_objective(const MeasurementEnsemble& ens, std::span<const double> xr, double tau);

/// Sets x_i to the fourth-order soft-threshold of the coordinate quartic.
/// Never increases g. Values in the result are values of g.
StepResult l1_cd_step(const MeasurementEnsemble& ens, SolverState& state, std::size_t i,
                      double tau);

struct L1Result {
  RunResult run;                   // traced objective is g
  std::optional<RunResult> debias; // present when L1Config.debias is set

  const ComplexVec& estimate() const { return debias ? debias->x : run.x; }
};

L1Result l1_run(const MeasurementEnsemble& ens, std::span<const cplx> x0, const L1Config& config,
                const RunObserver& observer = {});

/// Real coordinates with |x_i| above threshold.
std::vector<std::size_t> support_of(std::span<const double> xr, double threshold);

/// Real coordinates {j, j + N} of every complex entry j with a part above threshold.
std::vector<std::size_t> entry_support_coordinates(std::span<const cplx> x, double threshold);

}  // namespace cdpr
