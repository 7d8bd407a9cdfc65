#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdpr/core.hpp"
#include "cdpr/ensemble.hpp"
#include "cdpr/rng.hpp"

namespace cdpr {

enum class IndexRule { kCyclic, kRandom, kGreedy };

std::string to_string(IndexRule rule);

struct SolverConfig {
  IndexRule rule = IndexRule::kCyclic;
  // Stop once the objective decreases by less than this over one cycle.
  // Unset means default_tolerance(f(x0)).
  std::optional<double> tol;
  std::size_t max_cycles = 1000;
  std::uint64_t seed = 0;  // random index stream
  // When set, each step is restricted to |a| <= 2 eta |d f / d x_i|.
  std::optional<double> step_bound_eta;
  std::size_t trace_every = 1;

  /// Throws std::invalid_argument listing the first violated field.
  void validate() const;
};

inline double default_tolerance(double f0) { return 1e-14 * (f0 > 1.0 ? f0 : 1.0); }

/// Optional per-cycle metrics written into the trace.
struct RunObserver {
  ComplexVec reference;  // relative recovery error against this when non-empty
  std::function<double(std::span<const cplx>)> isi;
};

struct RunResult {
  ComplexVec x;
  RunTrace trace;
  double objective = 0.0;  // final traced objective (f, or g for l1 runs)
  std::size_t cycles = 0;
  std::uint64_t iterations = 0;
  bool converged = false;
  // Iterations where the objective rose by more than its evaluation error.
  std::uint64_t ascents = 0;
  WorkCounter work;
};

/// Chooses coordinates by rule. The cyclic rule visits 0..2N-1 in order,
/// the random rule draws uniformly, the greedy rule takes the largest
/// |partial derivative| (lowest index on ties).
class IndexSelector {
 public:
  IndexSelector(IndexRule rule, std::size_t dimension, std::uint64_t seed);

  std::size_t next(std::uint64_t k, const MeasurementEnsemble& ens, SolverState& state);

 private:
  IndexRule rule_;
  std::size_t dimension_;
  Rng rng_;
};

std::size_t select_index(IndexRule rule, std::uint64_t k, const MeasurementEnsemble& ens,
                         SolverState& state, Rng& rng);

struct StepResult {
  double alpha = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
  double eval_error = 0.0;
};

/// Exact minimization of f along coordinate i, optionally restricted to the
/// interval |a| <= 2 eta |grad_i|. Never increases f.
StepResult cd_step(const MeasurementEnsemble& ens, SolverState& state, std::size_t i,
                   std::optional<double> step_bound_eta = std::nullopt);

/// Coordinate descent from x0. One cycle is 2N iterations.
RunResult run(const MeasurementEnsemble& ens, std::span<const cplx> x0, const SolverConfig& config,
              const RunObserver& observer = {});

/// Cyclic-rule descent restricted to the listed real coordinates; one cycle
/// visits each of them once.
RunResult run_on_coordinates(const MeasurementEnsemble& ens, std::span<const cplx> x0,
                             std::span<const std::size_t> coordinates, const SolverConfig& config,
                             const RunObserver& observer = {});

}  // namespace cdpr
