#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cdpr/ensemble.hpp"
#include "cdpr/types.hpp"

namespace cdpr {

/// Work instrumentation. Row touches count visits to a measurement row m
/// (reading one or more entries of a_m); entry touches count reads of
/// individual a_m entries.
struct WorkCounter {
  std::uint64_t row_touches = 0;
  std::uint64_t entry_touches = 0;
  std::uint64_t full_refreshes = 0;

  WorkCounter& operator+=(const WorkCounter& o) {
    row_touches += o.row_touches;
    entry_touches += o.entry_touches;
    full_refreshes += o.full_refreshes;
    return *this;
  }
};

/// Iterate in real-embedded form plus the cached products z_m = a_m^H x.
///
/// A coordinate change can be staged: x is updated at once while the O(M)
/// update of z is deferred and folded into the next coefficient pass, so a
/// coordinate-descent iteration reads the ensemble rows exactly once.
struct SolverState {
  RealVec x;
  ComplexVec z;
  double objective = 0.0;

  struct PendingShift {
    std::size_t index;
    double delta;
  };
  std::optional<PendingShift> pending;
  std::size_t updates_since_refresh = 0;
  WorkCounter work;

  std::size_t signal_length() const { return x.size() / 2; }
};

/// Full recomputations of the cache happen at least this often.
inline constexpr std::size_t kRefreshInterval = 10000;

double objective(const MeasurementEnsemble& ens, std::span<const double> xr);
double objective(const MeasurementEnsemble& ens, std::span<const cplx> x);
/// sum_m (|z_m|^2 - b_m)^2 for precomputed products.
double objective_from_products(std::span<const cplx> z, std::span<const double> b);

/// Euclidean gradient of f over R^{2N}; equals 2 [Re; Im] of the Wirtinger
/// gradient 2 sum_m (|a_m^H x|^2 - b_m) a_m a_m^H x.
RealVec gradient(const MeasurementEnsemble& ens, std::span<const double> xr);
/// Same, from a consistent cache. Counts one dense pass.
RealVec gradient(const MeasurementEnsemble& ens, SolverState& state);

SolverState make_state(const MeasurementEnsemble& ens, std::span<const double> xr);
void refresh_full(const MeasurementEnsemble& ens, SolverState& state);

/// Applies x[i] += delta and the matching O(M) update of z immediately.
/// Throws std::out_of_range for i >= 2N.
void shift_coordinate(const MeasurementEnsemble& ens, SolverState& state, std::size_t index,
                      double delta);
/// Applies x[i] += delta and defers the update of z.
void stage_shift(const MeasurementEnsemble& ens, SolverState& state, std::size_t index,
                 double delta);
/// Applies any deferred update to z.
void flush(const MeasurementEnsemble& ens, SolverState& state);

/// Largest relative deviation of the cache from a fresh recomputation.
double cache_deviation(const MeasurementEnsemble& ens, const SolverState& state);

/// min over phi of ||z - e^{j phi} x_ref||. Throws on length mismatch.
double dist_to_orbit(std::span<const cplx> z, std::span<const cplx> x_ref);
/// Phase phi attaining the minimum above.
double orbit_phase(std::span<const cplx> z, std::span<const cplx> x_ref);
/// dist^2 / ||x_ref||^2. Throws std::invalid_argument for a zero reference.
double relative_recovery_error(std::span<const cplx> z, std::span<const cplx> x_ref);

inline constexpr double kSuccessThreshold = 1e-5;
inline bool is_success(double rel_error) { return rel_error < kSuccessThreshold; }

inline constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

struct TraceRecord {
  std::size_t cycle = 0;
  double objective = 0.0;
  double rel_error = kNotRecorded;
  double isi = kNotRecorded;
  std::uint64_t updates = 0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
};

}  // namespace cdpr
