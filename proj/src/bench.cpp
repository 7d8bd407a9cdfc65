#include "cdpr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "cdpr/cd_solvers.hpp"
#include "cdpr/equalizer.hpp"
#include "cdpr/sparse_cd.hpp"
#include "cdpr/spectral.hpp"
#include "cdpr/wf.hpp"

namespace cdpr {

namespace {

using nlohmann::json;

constexpr const char* kSolverNames[] = {"ccd", "rcd", "gcd", "wf", "wf-fixed", "l1-ccd", "l1-rcd"};

IndexRule rule_of(const std::string& name) {
  if (name == "rcd" || name == "l1-rcd") return IndexRule::kRandom;
  if (name == "gcd") return IndexRule::kGreedy;
  return IndexRule::kCyclic;
}

bool is_wf(const std::string& name) { return name == "wf" || name == "wf-fixed"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::vector<SolverSpec> solvers_named(std::initializer_list<const char*> names) {
  std::vector<SolverSpec> out;
  for (const char* n : names) {
    SolverSpec s;
    s.name = n;
    out.push_back(s);
  }
  return out;
}

// Reads j[key] into out when present, recording a violation on type errors.
template <class T>
void read_field(const json& j, const char* key, T& out, const std::string& where,
                std::vector<std::string>& errors) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    errors.push_back(where + key + ": wrong type");
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where,
                   std::vector<std::string>& errors) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_null()) {
    out.reset();
    return;
  }
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    errors.push_back(where + key + ": wrong type");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where, std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!ok) errors.push_back(where + it.key() + ": unknown field");
  }
}

SolverSpec solver_from_json(const json& j, std::size_t index, std::vector<std::string>& errors) {
  SolverSpec s;
  const std::string where = "solvers[" + std::to_string(index) + "].";
  if (j.is_string()) {
    s.name = j.get<std::string>();
    return s;
  }
  if (!j.is_object()) {
    errors.push_back(where.substr(0, where.size() - 1) + ": expected a name or an object");
    return s;
  }
  reject_unknown(j, {"name", "tol", "max_iterations", "tau", "debias", "step"}, where, errors);
  read_field(j, "name", s.name, where, errors);
  read_optional(j, "tol", s.tol, where, errors);
  read_field(j, "max_iterations", s.max_iterations, where, errors);
  read_optional(j, "tau", s.tau, where, errors);
  read_field(j, "debias", s.debias, where, errors);
  read_optional(j, "step", s.step, where, errors);
  return s;
}

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct SolverOutcome {
  RunResult run;
  double isi = kNotRecorded;
};

SolverOutcome solve_recovery(const SolverSpec& s, const MeasurementEnsemble& ens,
                             std::span<const cplx> x0, const RunObserver& observer,
                             std::uint64_t seed) {
  SolverOutcome out;
  const std::uint64_t index_seed = derive_seed(seed, 0, Stream::kIndex);
  if (is_wf(s.name)) {
    WfConfig c;
    c.tol = s.tol;
    c.max_iters = s.max_iterations;
    if (s.name == "wf-fixed") c.policy = FixedStep{s.step ? *s.step : default_fixed_step(ens, x0)};
    out.run = wf_run(ens, x0, c, observer).run;
  } else if (is_l1_solver(s.name)) {
    L1Config c;
    c.rule = rule_of(s.name);
    c.tau = s.tau ? *s.tau : default_tau(ens.measurement_count());
    c.tol = s.tol;
    c.max_cycles = s.max_iterations;
    c.seed = index_seed;
    c.debias = s.debias;
    L1Result r = l1_run(ens, x0, c, observer);
    out.run = std::move(r.run);
    if (r.debias) {
      // Refit records continue the cycle count; their objective is f.
      const std::size_t offset = out.run.cycles;
      for (const auto& rec : r.debias->trace.records) {
        if (rec.cycle == 0) continue;
        TraceRecord shifted = rec;
        shifted.cycle += offset;
        out.run.trace.records.push_back(shifted);
      }
      out.run.cycles += r.debias->cycles;
      out.run.iterations += r.debias->iterations;
      out.run.objective = r.debias->objective;
      out.run.x = r.debias->x;
      out.run.ascents += r.debias->ascents;
    }
  } else {
    SolverConfig c;
    c.rule = rule_of(s.name);
    c.tol = s.tol;
    c.max_cycles = s.max_iterations;
    c.seed = index_seed;
    out.run = run(ens, x0, c, observer);
  }
  return out;
}

SolverOutcome solve_equalizer(const SolverSpec& s, const EqualizerSetup& eq, std::uint64_t seed) {
  EqualizerConfig ec;
  ec.seed = seed;
  ec.init = eq.init == "spectral" ? EqualizerInit::kSpectral : EqualizerInit::kCenterTap;
  if (is_wf(s.name)) {
    WfConfig c;
    c.tol = s.tol;
    c.max_iters = s.max_iterations;
    if (s.name == "wf-fixed") c.policy = FixedStep{*s.step};
    ec.solver = c;
  } else {
    SolverConfig c;
    c.rule = rule_of(s.name);
    c.tol = s.tol;
    c.max_cycles = s.max_iterations;
    c.seed = derive_seed(seed, 0, Stream::kIndex);
    ec.solver = c;
  }
  ComplexVec channel(eq.channel.begin(), eq.channel.end());
  EqualizerResult r = equalize_run(channel, eq.symbols, eq.taps, eq.snr_db, ec);
  SolverOutcome out;
  out.isi = r.isi_trace.empty() ? kNotRecorded : r.isi_trace.back();
  out.run = std::move(r.run);
  return out;
}

struct Job {
  std::size_t point;
  double point_value;
  std::size_t trial;
};

struct JobOutput {
  std::vector<SummaryRecord> records;
  std::vector<RunTrace> traces;
};

JobOutput run_job(const ExperimentSpec& spec, const Job& job) {
  JobOutput out;
  const std::uint64_t seed = trial_seed(spec.base_seed, job.trial);

  std::optional<MeasurementEnsemble> ens;
  ComplexVec x0;
  RunObserver observer;
  if (spec.kind != ExperimentKind::kEqualize) {
    GenConfig g = spec.generation;
    g.seed = seed;
    if (spec.kind == ExperimentKind::kSuccessCurve) {
      g.M = static_cast<std::size_t>(std::llround(job.point_value * static_cast<double>(g.N)));
    } else if (spec.kind == ExperimentKind::kNmseCurve) {
      g.snr_db = job.point_value;
    }
    Instance inst = make_instance(g);
    SpectralConfig sc;
    sc.seed = derive_seed(seed, 0, Stream::kInit);
    x0 = spectral_init(inst.ensemble, sc);
    observer.reference = std::move(inst.truth);
    ens.emplace(std::move(inst.ensemble));
  }

  for (const SolverSpec& s : spec.solvers) {
    const auto start = std::chrono::steady_clock::now();
    SolverOutcome o = spec.kind == ExperimentKind::kEqualize
                          ? solve_equalizer(s, spec.equalizer, seed)
                          : solve_recovery(s, *ens, x0, observer, seed);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    SummaryRecord rec;
    rec.solver = s.name;
    rec.point = job.point;
    rec.point_value = job.point_value;
    rec.trial = job.trial;
    rec.seed = seed;
    rec.cycles = o.run.cycles;
    rec.wall_seconds = wall;
    if (!o.run.trace.records.empty()) {
      const TraceRecord& last = o.run.trace.records.back();
      rec.objective = last.objective;
      rec.rel_error = last.rel_error;
      rec.isi = last.isi;
    } else {
      rec.objective = o.run.objective;
      rec.isi = o.isi;
    }
    rec.success = !std::isnan(rec.rel_error) && is_success(rec.rel_error);
    out.records.push_back(std::move(rec));
    out.traces.push_back(std::move(o.run.trace));
  }
  return out;
}

std::vector<Job> jobs_of(const ExperimentSpec& spec) {
  std::vector<double> points;
  if (spec.kind == ExperimentKind::kSuccessCurve) {
    points = spec.ratios;
  } else if (spec.kind == ExperimentKind::kNmseCurve) {
    points = spec.snrs_db;
  } else {
    points = {kNotRecorded};
  }
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t t = 0; t < spec.trials; ++t) jobs.push_back({p, points[p], t});
  }
  return jobs;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

json record_json(const SummaryRecord& r) {
  json j;
  j["solver"] = r.solver;
  j["point"] = r.point;
  j["point_value"] = number_or_null(r.point_value);
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["cycles"] = r.cycles;
  j["objective"] = number_or_null(r.objective);
  j["rel_error"] = number_or_null(r.rel_error);
  j["success"] = r.success;
  j["wall_seconds"] = r.wall_seconds;
  j["isi"] = number_or_null(r.isi);
  j["trace_file"] = r.trace_file.generic_string();
  return j;
}

json metrics_json(const MetricsRow& m) {
  json j;
  j["solver"] = m.solver;
  j["point"] = m.point;
  j["point_value"] = number_or_null(m.point_value);
  j["trials"] = m.trials;
  j["success_probability"] = m.success_probability;
  j["nmse"] = number_or_null(m.nmse);
  j["mean_cycles"] = m.mean_cycles;
  j["mean_wall_seconds"] = m.mean_wall_seconds;
  j["mean_isi"] = number_or_null(m.mean_isi);
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kRecover: return "recover";
    case ExperimentKind::kSparse: return "sparse";
    case ExperimentKind::kEqualize: return "equalize";
    case ExperimentKind::kSuccessCurve: return "success-curve";
    case ExperimentKind::kNmseCurve: return "nmse-curve";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::kRecover, ExperimentKind::kSparse, ExperimentKind::kEqualize,
                 ExperimentKind::kSuccessCurve, ExperimentKind::kNmseCurve}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_known_solver(const std::string& name) {
  return std::any_of(std::begin(kSolverNames), std::end(kSolverNames),
                     [&](const char* n) { return name == n; });
}

bool is_l1_solver(const std::string& name) { return name == "l1-ccd" || name == "l1-rcd"; }

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.generation.N = 32;
  s.generation.M = 192;
  switch (kind) {
    case ExperimentKind::kRecover:
      s.solvers = solvers_named({"ccd", "rcd", "gcd", "wf"});
      break;
    case ExperimentKind::kSparse:
      s.generation.N = 64;
      s.generation.M = 128;
      s.generation.K = 5;
      s.solvers = solvers_named({"l1-ccd", "l1-rcd", "ccd"});
      break;
    case ExperimentKind::kEqualize:
      s.trials = 20;
      s.solvers = solvers_named({"ccd", "rcd", "gcd", "wf"});
      break;
    case ExperimentKind::kSuccessCurve:
      s.ratios = {2, 3, 4, 5, 6};
      s.solvers = solvers_named({"ccd", "rcd", "gcd", "wf"});
      break;
    case ExperimentKind::kNmseCurve:
      s.snrs_db = {6, 10, 14, 18, 22, 26, 30};
      s.solvers = solvers_named({"ccd", "rcd", "gcd", "wf"});
      break;
  }
  return s;
}

SpecError::SpecError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid experiment spec:";
        for (const auto& v : violations) msg += " " + v + ";";
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<std::string> validate(const ExperimentSpec& spec) {
  std::vector<std::string> errors;
  const bool equalize = spec.kind == ExperimentKind::kEqualize;
  if (spec.trials < 1) errors.push_back("trials: must be >= 1");
  if (spec.workers < 1) errors.push_back("workers: must be >= 1");
  if (spec.solvers.empty()) errors.push_back("solvers: must not be empty");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < spec.solvers.size(); ++i) {
    const SolverSpec& s = spec.solvers[i];
    const std::string where = "solvers[" + std::to_string(i) + "].";
    if (!is_known_solver(s.name)) {
      errors.push_back(where + "name: unknown solver '" + s.name + "'");
      continue;
    }
    if (!seen.insert(s.name).second) errors.push_back(where + "name: duplicate '" + s.name + "'");
    if (s.tol && !(*s.tol > 0.0)) errors.push_back(where + "tol: must be > 0");
    if (s.max_iterations < 1) errors.push_back(where + "max_iterations: must be >= 1");
    if (s.tau && !is_l1_solver(s.name)) errors.push_back(where + "tau: only for l1 solvers");
    if (s.tau && !(*s.tau > 0.0 && std::isfinite(*s.tau))) {
      errors.push_back(where + "tau: must be positive and finite");
    }
    if (s.debias && !is_l1_solver(s.name)) errors.push_back(where + "debias: only for l1 solvers");
    if (s.step && !is_wf(s.name)) errors.push_back(where + "step: only for wf solvers");
    if (s.step && !(*s.step > 0.0 && std::isfinite(*s.step))) {
      errors.push_back(where + "step: must be positive and finite");
    }
    if (equalize && is_l1_solver(s.name)) {
      errors.push_back(where + "name: l1 solvers do not apply to equalize");
    }
    if (equalize && s.name == "wf-fixed" && !s.step) {
      errors.push_back(where + "step: required for wf-fixed in equalize");
    }
  }

  if (equalize) {
    const EqualizerSetup& eq = spec.equalizer;
    if (eq.channel.empty()) errors.push_back("equalizer.channel: must not be empty");
    if (!eq.channel.empty() &&
        std::all_of(eq.channel.begin(), eq.channel.end(), [](double v) { return v == 0.0; })) {
      errors.push_back("equalizer.channel: must have a nonzero tap");
    }
    if (eq.taps < 1) errors.push_back("equalizer.taps: must be >= 1");
    if (eq.symbols < 1) errors.push_back("equalizer.symbols: must be >= 1");
    if (eq.taps >= 1 && eq.symbols >= 1 && eq.taps > eq.symbols + eq.channel.size() - 1) {
      errors.push_back("equalizer.taps: exceeds the received length");
    }
    if (eq.init != "center-tap" && eq.init != "spectral") {
      errors.push_back("equalizer.init: must be 'center-tap' or 'spectral'");
    }
    return errors;
  }

  const GenConfig& g = spec.generation;
  if (g.N < 1) errors.push_back("generation.N: must be >= 1");
  if (spec.kind != ExperimentKind::kSuccessCurve && g.M < 1) {
    errors.push_back("generation.M: must be >= 1");
  }
  if (g.K && (*g.K < 1 || *g.K > g.N)) errors.push_back("generation.K: must be in [1, N]");
  if (spec.kind == ExperimentKind::kSparse && !g.K) {
    errors.push_back("generation.K: required for sparse experiments");
  }
  if (g.snr_db && !std::isfinite(*g.snr_db)) errors.push_back("generation.snr_db: must be finite");
  if (spec.kind == ExperimentKind::kSuccessCurve) {
    if (spec.ratios.empty()) errors.push_back("ratios: must not be empty");
    for (std::size_t i = 0; i < spec.ratios.size(); ++i) {
      if (!(spec.ratios[i] > 0.0) ||
          std::llround(spec.ratios[i] * static_cast<double>(g.N)) < 1) {
        errors.push_back("ratios[" + std::to_string(i) + "]: must give M >= 1");
      }
    }
  }
  if (spec.kind == ExperimentKind::kNmseCurve) {
    if (spec.snrs_db.empty()) errors.push_back("snrs_db: must not be empty");
    for (std::size_t i = 0; i < spec.snrs_db.size(); ++i) {
      if (!std::isfinite(spec.snrs_db[i])) {
        errors.push_back("snrs_db[" + std::to_string(i) + "]: must be finite");
      }
    }
  }
  return errors;
}

json to_json(const ExperimentSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["trials"] = spec.trials;
  j["base_seed"] = spec.base_seed;
  j["workers"] = spec.workers;
  j["out_dir"] = spec.out_dir;
  j["generation"] = {{"N", spec.generation.N},
                     {"M", spec.generation.M},
                     {"K", spec.generation.K ? json(*spec.generation.K) : json(nullptr)},
                     {"snr_db", optional_json(spec.generation.snr_db)}};
  json solvers = json::array();
  for (const SolverSpec& s : spec.solvers) {
    solvers.push_back({{"name", s.name},
                       {"tol", optional_json(s.tol)},
                       {"max_iterations", s.max_iterations},
                       {"tau", optional_json(s.tau)},
                       {"debias", s.debias},
                       {"step", optional_json(s.step)}});
  }
  j["solvers"] = solvers;
  j["ratios"] = spec.ratios;
  j["snrs_db"] = spec.snrs_db;
  j["equalizer"] = {{"channel", spec.equalizer.channel},
                    {"taps", spec.equalizer.taps},
                    {"symbols", spec.equalizer.symbols},
                    {"snr_db", optional_json(spec.equalizer.snr_db)},
                    {"init", spec.equalizer.init}};
  return j;
}

ExperimentSpec spec_from_json(const json& j, const ExperimentSpec& base) {
  std::vector<std::string> errors;
  ExperimentSpec s = base;
  if (!j.is_object()) throw SpecError({"<root>: expected an object"});
  reject_unknown(j,
                 {"kind", "trials", "base_seed", "workers", "out_dir", "generation", "solvers",
                  "ratios", "snrs_db", "equalizer"},
                 "", errors);

  if (auto it = j.find("kind"); it != j.end()) {
    const auto kind = it->is_string() ? parse_kind(it->get<std::string>()) : std::nullopt;
    if (kind) {
      s.kind = *kind;
    } else {
      errors.push_back("kind: expected one of recover, sparse, equalize, success-curve, nmse-curve");
    }
  }
  read_field(j, "trials", s.trials, "", errors);
  read_field(j, "base_seed", s.base_seed, "", errors);
  read_field(j, "workers", s.workers, "", errors);
  read_field(j, "out_dir", s.out_dir, "", errors);
  read_field(j, "ratios", s.ratios, "", errors);
  read_field(j, "snrs_db", s.snrs_db, "", errors);

  if (auto it = j.find("generation"); it != j.end()) {
    if (!it->is_object()) {
      errors.push_back("generation: expected an object");
    } else {
      reject_unknown(*it, {"N", "M", "K", "snr_db"}, "generation.", errors);
      read_field(*it, "N", s.generation.N, "generation.", errors);
      read_field(*it, "M", s.generation.M, "generation.", errors);
      read_optional(*it, "K", s.generation.K, "generation.", errors);
      read_optional(*it, "snr_db", s.generation.snr_db, "generation.", errors);
    }
  }
  if (auto it = j.find("solvers"); it != j.end()) {
    if (!it->is_array()) {
      errors.push_back("solvers: expected an array");
    } else {
      s.solvers.clear();
      for (std::size_t i = 0; i < it->size(); ++i) {
        s.solvers.push_back(solver_from_json((*it)[i], i, errors));
      }
    }
  }
  if (auto it = j.find("equalizer"); it != j.end()) {
    if (!it->is_object()) {
      errors.push_back("equalizer: expected an object");
    } else {
      EqualizerSetup& eq = s.equalizer;
      reject_unknown(*it, {"channel", "taps", "symbols", "snr_db", "init"}, "equalizer.", errors);
      read_field(*it, "channel", eq.channel, "equalizer.", errors);
      read_field(*it, "taps", eq.taps, "equalizer.", errors);
      read_field(*it, "symbols", eq.symbols, "equalizer.", errors);
      read_optional(*it, "snr_db", eq.snr_db, "equalizer.", errors);
      read_field(*it, "init", eq.init, "equalizer.", errors);
    }
  }
  if (!errors.empty()) throw SpecError(std::move(errors));
  return s;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "cycle,objective,rel_error,isi\n";
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.cycle);
    out += ',';
    out += format_double(r.objective);
    out += ',';
    out += format_double(r.rel_error);
    out += ',';
    out += format_double(r.isi);
    out += '\n';
  }
  return out;
}

std::vector<MetricsRow> aggregate(const std::vector<SummaryRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  struct Acc {
    MetricsRow row;
    std::size_t successes = 0;
    double err_sum = 0.0;
    std::size_t err_count = 0;
    double cycles_sum = 0.0;
    double wall_sum = 0.0;
    double isi_sum = 0.0;
    std::size_t isi_count = 0;
  };
  std::vector<Acc> groups;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  for (const SummaryRecord& r : records) {
    auto [it, inserted] = index.try_emplace({r.solver, r.point}, groups.size());
    if (inserted) {
      Acc a;
      a.row.solver = r.solver;
      a.row.point = r.point;
      a.row.point_value = r.point_value;
      groups.push_back(a);
    }
    Acc& a = groups[it->second];
    ++a.row.trials;
    a.successes += r.success ? 1 : 0;
    if (!std::isnan(r.rel_error)) {
      a.err_sum += r.rel_error;
      ++a.err_count;
    }
    a.cycles_sum += static_cast<double>(r.cycles);
    a.wall_sum += r.wall_seconds;
    if (!std::isnan(r.isi)) {
      a.isi_sum += r.isi;
      ++a.isi_count;
    }
  }
  std::vector<MetricsRow> out;
  for (Acc& a : groups) {
    const double n = static_cast<double>(a.row.trials);
    a.row.success_probability = static_cast<double>(a.successes) / n;
    if (a.err_count > 0) a.row.nmse = a.err_sum / static_cast<double>(a.err_count);
    a.row.mean_cycles = a.cycles_sum / n;
    a.row.mean_wall_seconds = a.wall_sum / n;
    if (a.isi_count > 0) a.row.mean_isi = a.isi_sum / static_cast<double>(a.isi_count);
    out.push_back(a.row);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (auto errors = validate(spec); !errors.empty()) throw SpecError(std::move(errors));

  const std::vector<Job> jobs = jobs_of(spec);
  std::vector<JobOutput> outputs(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      try {
        outputs[k] = run_job(spec, jobs[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };
  const std::size_t n_workers = std::min(spec.workers, jobs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  const bool write = !spec.out_dir.empty();
  const std::filesystem::path root(spec.out_dir);
  const bool curve =
      spec.kind == ExperimentKind::kSuccessCurve || spec.kind == ExperimentKind::kNmseCurve;
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(root / "traces", ec);
    if (ec) throw std::runtime_error("cannot create " + (root / "traces").string() + ": " + ec.message());
  }

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    for (std::size_t s = 0; s < outputs[k].records.size(); ++s) {
      SummaryRecord rec = outputs[k].records[s];
      char name[128];
      if (curve) {
        std::snprintf(name, sizeof(name), "%s_p%02zu_t%04zu.csv", rec.solver.c_str(), rec.point,
                      rec.trial);
      } else {
        std::snprintf(name, sizeof(name), "%s_t%04zu.csv", rec.solver.c_str(), rec.trial);
      }
      rec.trace_file = std::filesystem::path("traces") / name;
      if (write) write_file(root / rec.trace_file, trace_csv(outputs[k].traces[s]));
      result.records.push_back(std::move(rec));
    }
  }
  result.metrics = aggregate(result.records);

  json& summary = result.summary;
  summary["kind"] = to_string(spec.kind);
  summary["spec"] = to_json(spec);
  summary["success_threshold"] = kSuccessThreshold;
  json recs = json::array();
  for (const auto& r : result.records) recs.push_back(record_json(r));
  summary["records"] = recs;
  json metrics = json::array();
  for (const auto& m : result.metrics) metrics.push_back(metrics_json(m));
  summary["metrics"] = metrics;
  if (write) write_file(root / "summary.json", summary.dump(2) + "\n");
  return result;
}

}  // namespace cdpr
