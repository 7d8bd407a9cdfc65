#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "cdpr/bench.hpp"
#include "cdpr/cd_solvers.hpp"
#include "cdpr/equalizer.hpp"
#include "cdpr/measurement.hpp"
#include "cdpr/scalar_min.hpp"
#include "cdpr/sparse_cd.hpp"
#include "cdpr/spectral.hpp"
#include "cdpr/wf.hpp"

namespace py = pybind11;
using namespace cdpr;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ComplexVec to_complex(const CArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d complex array");
  return ComplexVec(a.data(), a.data() + a.size());
}

RealVec to_real(const RArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d real array");
  return RealVec(a.data(), a.data() + a.size());
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

MeasurementEnsemble ensemble_from(const CArray& a, const RArray& b) {
  if (a.ndim() != 2) throw std::invalid_argument("A must be an M x N array");
  const std::size_t m = a.shape(0), n = a.shape(1);
  SamplingMatrix s(m, n);
  auto view = a.unchecked<2>();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) s.at(i, j) = view(i, j);
  }
  return MeasurementEnsemble(std::move(s), to_real(b));
}

CArray matrix_of(const MeasurementEnsemble& ens) {
  const std::size_t m = ens.measurement_count(), n = ens.signal_length();
  CArray out({m, n});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) view(i, j) = ens.vectors().at(i, j);
  }
  return out;
}

IndexRule parse_rule(const std::string& name) {
  if (name == "cyclic") return IndexRule::kCyclic;
  if (name == "random") return IndexRule::kRandom;
  if (name == "greedy") return IndexRule::kGreedy;
  throw std::invalid_argument("rule must be cyclic, random or greedy, got '" + name + "'");
}

RunObserver observer_for(const std::optional<CArray>& reference) {
  RunObserver o;
  if (reference) o.reference = to_complex(*reference);
  return o;
}

py::dict result_dict(const RunResult& r) {
  std::vector<double> cycles, objective, rel_error, isi;
  for (const TraceRecord& t : r.trace.records) {
    cycles.push_back(static_cast<double>(t.cycle));
    objective.push_back(t.objective);
    rel_error.push_back(t.rel_error);
    isi.push_back(t.isi);
  }
  py::dict trace;
  trace["cycle"] = to_array(cycles);
  trace["objective"] = to_array(objective);
  trace["rel_error"] = to_array(rel_error);
  trace["isi"] = to_array(isi);
  py::dict d;
  d["x"] = to_array(r.x);
  d["objective"] = r.objective;
  d["cycles"] = r.cycles;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["ascents"] = r.ascents;
  d["row_touches"] = r.work.row_touches;
  d["trace"] = trace;
  return d;
}

std::string status_name(WfStatus s) {
  switch (s) {
    case WfStatus::kConverged: return "converged";
    case WfStatus::kMaxIterations: return "max_iterations";
    case WfStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_cdpr, m) {
  m.doc() = "Coordinate-descent phase retrieval";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);

  py::class_<MeasurementEnsemble>(m, "Ensemble")
      .def(py::init(&ensemble_from), py::arg("A"), py::arg("b"),
           "Rows of A are the sampling vectors; b holds the intensities |a_m^H x|^2.")
      .def_property_readonly("N", &MeasurementEnsemble::signal_length)
      .def_property_readonly("M", &MeasurementEnsemble::measurement_count)
      .def_property_readonly("A", &matrix_of)
      .def_property_readonly("b", [](const MeasurementEnsemble& e) {
        return to_array(RealVec(e.intensities().begin(), e.intensities().end()));
      });

  m.def(
      "make_instance",
      [](std::size_t n, std::size_t mm, std::optional<std::size_t> k, std::optional<double> snr,
         std::uint64_t seed) {
        GenConfig g;
        g.N = n;
        g.M = mm;
        g.K = k;
        g.snr_db = snr;
        g.seed = seed;
        Instance inst = make_instance(g);
        return py::make_tuple(std::move(inst.ensemble), to_array(inst.truth));
      },
      py::arg("N"), py::arg("M"), py::arg("K") = py::none(), py::arg("snr_db") = py::none(),
      py::arg("seed") = 0, "Gaussian instance; returns (ensemble, truth).");

  m.def(
      "objective",
      [](const MeasurementEnsemble& e, const CArray& x) { return objective(e, to_complex(x)); },
      py::arg("ensemble"), py::arg("x"));
  m.def(
      "gradient",
      [](const MeasurementEnsemble& e, const CArray& x) {
        return to_array(gradient(e, embed(to_complex(x))));
      },
      py::arg("ensemble"), py::arg("x"), "Gradient over the real embedding [Re x; Im x].");
  m.def(
      "l1_objective",
      [](const MeasurementEnsemble& e, const CArray& x, double tau) {
        return l1_objective(e, embed(to_complex(x)), tau);
      },
      py::arg("ensemble"), py::arg("x"), py::arg("tau"));

  m.def(
      "relative_error",
      [](const CArray& z, const CArray& x) {
        return relative_recovery_error(to_complex(z), to_complex(x));
      },
      py::arg("z"), py::arg("x"), "min over phi of ||z - e^{j phi} x|| / ||x||.");

  m.def(
      "spectral_init",
      [](const MeasurementEnsemble& e, std::uint64_t seed, std::size_t iters, double tol) {
        SpectralConfig c;
        c.seed = seed;
        c.power_iters = iters;
        c.tol = tol;
        return to_array(spectral_init(e, c));
      },
      py::arg("ensemble"), py::arg("seed") = 0, py::arg("power_iters") = 200,
      py::arg("tol") = 1e-8);

  m.def(
      "solve",
      [](const MeasurementEnsemble& e, const CArray& x0, const std::string& rule,
         std::optional<double> tol, std::size_t max_cycles, std::uint64_t seed,
         std::optional<double> eta, std::optional<CArray> reference) {
        SolverConfig c;
        c.rule = parse_rule(rule);
        c.tol = tol;
        c.max_cycles = max_cycles;
        c.seed = seed;
        c.step_bound_eta = eta;
        const ComplexVec x = to_complex(x0);
        const RunObserver o = observer_for(reference);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(e, x, c, o);
        }
        return result_dict(r);
      },
      py::arg("ensemble"), py::arg("x0"), py::arg("rule") = "cyclic", py::arg("tol") = py::none(),
      py::arg("max_cycles") = 1000, py::arg("seed") = 0, py::arg("step_bound_eta") = py::none(),
      py::arg("reference") = py::none());

  m.def(
      "wirtinger_flow",
      [](const MeasurementEnsemble& e, const CArray& x0, std::optional<double> step,
         std::optional<double> tol, std::size_t max_iters, std::optional<CArray> reference) {
        WfConfig c;
        if (step) c.policy = FixedStep{*step};
        c.tol = tol;
        c.max_iters = max_iters;
        const ComplexVec x = to_complex(x0);
        const RunObserver o = observer_for(reference);
        WfResult r;
        {
          py::gil_scoped_release release;
          r = wf_run(e, x, c, o);
        }
        py::dict d = result_dict(r.run);
        d["status"] = status_name(r.status);
        return d;
      },
      py::arg("ensemble"), py::arg("x0"), py::arg("step") = py::none(), py::arg("tol") = py::none(),
      py::arg("max_iters") = 1000, py::arg("reference") = py::none(),
      "Exact line search when step is None, else a fixed step.");

  m.def(
      "l1_solve",
      [](const MeasurementEnsemble& e, const CArray& x0, std::optional<double> tau,
         const std::string& rule, std::optional<double> tol, std::size_t max_cycles,
         std::uint64_t seed, bool debias, std::optional<CArray> reference) {
        L1Config c;
        c.rule = parse_rule(rule);
        c.tau = tau ? *tau : default_tau(e.measurement_count());
        c.tol = tol;
        c.max_cycles = max_cycles;
        c.seed = seed;
        c.debias = debias;
        const ComplexVec x = to_complex(x0);
        const RunObserver o = observer_for(reference);
        L1Result r;
        {
          py::gil_scoped_release release;
          r = l1_run(e, x, c, o);
        }
        py::dict d = result_dict(r.run);
        d["estimate"] = to_array(r.estimate());
        if (r.debias) d["debias"] = result_dict(*r.debias);
        return d;
      },
      py::arg("ensemble"), py::arg("x0"), py::arg("tau") = py::none(), py::arg("rule") = "cyclic",
      py::arg("tol") = py::none(), py::arg("max_cycles") = 1000, py::arg("seed") = 0,
      py::arg("debias") = false, py::arg("reference") = py::none(),
      "tau defaults to 2.35 M.");

  m.def(
      "solve_cubic",
      [](double a3, double a2, double a1, double a0) {
        const CubicRoots r = solve_cubic(a3, a2, a1, a0);
        return std::vector<double>(r.roots().begin(), r.roots().end());
      },
      py::arg("a3"), py::arg("a2"), py::arg("a1"), py::arg("a0"));
  m.def(
      "minimize_quartic",
      [](double d4, double d3, double d2, double d1, double d0) {
        const ScalarMin r = minimize_quartic(QuarticCoeffs{d4, d3, d2, d1, d0});
        return py::make_tuple(r.arg, r.value);
      },
      py::arg("d4"), py::arg("d3"), py::arg("d2"), py::arg("d1"), py::arg("d0") = 0.0,
      "Returns (argmin, min).");
  m.def(
      "fost",
      [](double u4, double u3, double u2, double u1, double tau) {
        const ScalarMin r = fost(u4, u3, u2, u1, tau);
        return py::make_tuple(r.arg, r.value);
      },
      py::arg("u4"), py::arg("u3"), py::arg("u2"), py::arg("u1"), py::arg("tau"),
      "Fourth-order soft-threshold; returns (argmin, min).");

  m.attr("TEST_CHANNEL") = to_array(kTestChannel);
  m.def(
      "gen_qpsk", [](std::size_t n, std::uint64_t seed) { return to_array(gen_qpsk(n, seed)); },
      py::arg("count"), py::arg("seed") = 0);
  m.def(
      "isi",
      [](const CArray& h, const CArray& w) { return isi(to_complex(h), to_complex(w)); },
      py::arg("h"), py::arg("w"), "ISI of the combined response h * conj(w).");
  m.def(
      "equalize",
      [](const CArray& channel, std::size_t symbols, std::size_t taps, std::optional<double> snr,
         const std::string& solver, const std::string& init, std::uint64_t seed) {
        EqualizerConfig c;
        c.seed = seed;
        if (init == "center-tap") {
          c.init = EqualizerInit::kCenterTap;
        } else if (init == "spectral") {
          c.init = EqualizerInit::kSpectral;
        } else {
          throw std::invalid_argument("init must be center-tap or spectral");
        }
        if (solver == "wf") {
          c.solver = WfConfig{};
        } else {
          SolverConfig s;
          const std::string rule = solver == "ccd" ? "cyclic" : solver == "rcd" ? "random"
                                                  : solver == "gcd"             ? "greedy"
                                                                                : solver;
          s.rule = parse_rule(rule);
          c.solver = s;
        }
        const ComplexVec h = to_complex(channel);
        EqualizerResult r;
        {
          py::gil_scoped_release release;
          r = equalize_run(h, symbols, taps, snr, c);
        }
        py::dict d;
        d["w"] = to_array(r.w);
        d["w0"] = to_array(r.w0);
        d["initial_isi"] = r.initial_isi;
        d["isi_trace"] = to_array(r.isi_trace);
        d["cycles"] = r.run.cycles;
        return d;
      },
      py::arg("channel"), py::arg("symbols") = 2000, py::arg("taps") = 16,
      py::arg("snr_db") = 25.0, py::arg("solver") = "ccd", py::arg("init") = "center-tap",
      py::arg("seed") = 0);

  m.def(
      "default_spec",
      [](const std::string& kind) {
        const auto k = parse_kind(kind);
        if (!k) throw std::invalid_argument("unknown experiment kind '" + kind + "'");
        return to_json(default_spec(*k)).dump();
      },
      py::arg("kind"), "Default experiment spec as a JSON string.");
  m.def(
      "run_experiment",
      [](const std::string& kind, const std::string& overrides) {
        const auto k = parse_kind(kind);
        if (!k) throw std::invalid_argument("unknown experiment kind '" + kind + "'");
        const ExperimentSpec spec =
            spec_from_json(nlohmann::json::parse(overrides.empty() ? "{}" : overrides), default_spec(*k));
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(spec);
        }
        return r.summary.dump();
      },
      py::arg("kind"), py::arg("overrides") = "{}",
      "Runs an experiment; overrides is a JSON object merged over the defaults. Returns the summary JSON.");
}
