#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdpr/core.hpp"
#include "cdpr/measurement.hpp"
#include "cdpr/rng.hpp"

namespace cdpr {

enum class ExperimentKind { kRecover, kSparse, kEqualize, kSuccessCurve, kNmseCurve };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(const std::string& name);

/// Known solver names: ccd, rcd, gcd, wf, wf-fixed, l1-ccd, l1-rcd.
bool is_known_solver(const std::string& name);
bool is_l1_solver(const std::string& name);

struct SolverSpec {
  std::string name = "ccd";
  std::optional<double> tol;
  std::size_t max_iterations = 1000;  // cycles for CD, iterations for WF
  std::optional<double> tau;          // l1 only; default_tau(M) when unset
  bool debias = false;                // l1 only
  std::optional<double> step;         // wf-fixed only; default_fixed_step when unset
};

struct EqualizerSetup {
  std::vector<double> channel = {0.4, 1.0, -0.7, 0.6, 0.3, -0.4, 0.1};
  std::size_t taps = 16;
  std::size_t symbols = 2000;
  std::optional<double> snr_db = 25.0;
  std::string init = "center-tap";  // or "spectral"
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kRecover;
  GenConfig generation;  // seed is ignored; trials are seeded from base_seed
  std::vector<SolverSpec> solvers;
  std::size_t trials = 50;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  std::string out_dir;  // nothing is written when empty
  std::vector<double> ratios;     // success-curve: M = ratio * N
  std::vector<double> snrs_db;    // nmse-curve
  EqualizerSetup equalizer;
};

/// Defaults for each experiment kind, sized for a desk run.
ExperimentSpec default_spec(ExperimentKind kind);

/// Every violated field, one message each. Empty means valid.
std::vector<std::string> validate(const ExperimentSpec& spec);

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

nlohmann::json to_json(const ExperimentSpec& spec);

/// Fields absent from j keep the values of base. Type errors and unknown
/// keys are collected and thrown together as SpecError.
ExperimentSpec spec_from_json(const nlohmann::json& j, const ExperimentSpec& base);

struct SummaryRecord {
  std::string solver;
  std::size_t point = 0;       // index into ratios / snrs_db; 0 otherwise
  double point_value = kNotRecorded;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t cycles = 0;
  double objective = 0.0;
  double rel_error = kNotRecorded;
  bool success = false;  // rel_error < kSuccessThreshold
  double wall_seconds = 0.0;
  double isi = kNotRecorded;
  std::filesystem::path trace_file;  // relative to out_dir
};

struct MetricsRow {
  std::string solver;
  std::size_t point = 0;
  double point_value = kNotRecorded;
  std::size_t trials = 0;
  double success_probability = 0.0;
  double nmse = kNotRecorded;  // mean relative recovery error
  double mean_cycles = 0.0;
  double mean_wall_seconds = 0.0;
  double mean_isi = kNotRecorded;
};

/// Groups by (solver, point) in order of first appearance. Throws
/// std::invalid_argument on empty input.
std::vector<MetricsRow> aggregate(const std::vector<SummaryRecord>& records);

struct ExperimentResult {
  std::vector<SummaryRecord> records;  // sorted by point, trial, solver order
  std::vector<MetricsRow> metrics;
  nlohmann::json summary;
};

/// Seed of trial i.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
  return derive_seed(base_seed, trial);
}

/// Runs every solver on every trial, writing one trace CSV per (solver,
/// point, trial) and summary.json under out_dir when it is set. Throws
/// SpecError for an invalid spec and std::runtime_error on I/O failure.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Header and rows `cycle,objective,rel_error,isi`, 17 significant digits,
/// unrecorded values left blank.
std::string trace_csv(const RunTrace& trace);

}  // namespace cdpr
