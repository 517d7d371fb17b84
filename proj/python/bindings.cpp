#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "grenzero/concave_majorant.hpp"
#include "grenzero/errors.hpp"
#include "grenzero/experiments.hpp"
#include "grenzero/families.hpp"
#include "grenzero/grenander.hpp"
#include "grenzero/limit_laws.hpp"
#include "grenzero/mixture.hpp"

namespace py = pybind11;
using namespace grenzero;

namespace {

Side parse_side(const std::string& side) {
  if (side == "left") return Side::left;
  if (side == "right") return Side::right;
  throw ArgumentError("side must be 'left' or 'right'");
}

py::list vertex_list(std::span<const Vertex> vertices) {
  py::list out;
  for (const Vertex& v : vertices) out.append(py::make_tuple(v.x, v.y));
  return out;
}

RandomStream make_stream(std::uint64_t seed, std::uint32_t tag, std::uint32_t cell,
                         std::uint32_t replicate) {
  return RandomStream(seed, tag, cell, replicate);
}

py::dict summary_dict(const ExperimentSummary& s) {
  py::list cells;
  for (const SummaryCell& c : s.cells) {
    py::dict d;
    d["key"] = c.key;
    d["estimate"] = c.estimate;
    d["stderr"] = c.stderr_estimate ? py::object(py::float_(*c.stderr_estimate)) : py::none();
    d["replicates"] = c.replicates;
    d["paper_target"] = c.paper_target ? py::object(py::float_(*c.paper_target)) : py::none();
    d["stream"] = py::make_tuple(c.stream.seed, c.stream.tag, c.stream.cell);
    cells.append(d);
  }
  py::dict out;
  out["experiment"] = s.experiment;
  out["seed"] = s.seed;
  out["threads"] = s.threads;
  out["wall_clock_seconds"] = s.wall_clock_seconds;
  out["params"] = s.params;
  out["cells"] = cells;
  std::vector<std::string> files;
  for (const auto& f : s.files) files.push_back(f.string());
  out["files"] = files;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monotone density estimation near the origin: core routines";
  m.attr("__version__") = std::string(library_version());

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  // Concave majorant and switching.
  m.def(
      "lcm",
      [](std::vector<double> knots, std::vector<double> values, double origin) {
        const Majorant mj = lcm(StepFunction(std::move(knots), std::move(values), origin));
        return py::make_tuple(vertex_list(mj.vertices()),
                              std::vector<double>(mj.slopes().begin(), mj.slopes().end()));
      },
      py::arg("knots"), py::arg("values"), py::arg("origin") = 0.0,
      "Hull vertices and segment slopes of the least concave majorant of a step path.");
  m.def(
      "argmax_affine",
      [](std::vector<double> knots, std::vector<double> values, double y,
         const std::string& side) {
        return argmax_affine(StepFunction(std::move(knots), std::move(values)), y,
                             parse_side(side));
      },
      py::arg("knots"), py::arg("values"), py::arg("y"), py::arg("side") = "right");
  m.def(
      "verify_switching",
      [](const std::vector<double>& sample, const std::vector<double>& xs,
         const std::vector<double>& ys) {
        const SwitchingReport r = verify_switching(ecdf(sample), xs, ys);
        py::list naive;
        for (const auto& w : r.naive_failures) naive.append(py::make_tuple(w.x, w.y));
        py::dict d;
        d["pairs_checked"] = r.pairs_checked;
        d["strict_violations"] = r.strict_violations;
        d["weak_violations"] = r.weak_violations;
        d["naive_failures"] = naive;
        return d;
      },
      py::arg("sample"), py::arg("x_grid"), py::arg("y_grid"),
      "Checks both switching identities on the ecdf of `sample` over a grid.");

  // Grenander estimator.
  py::class_<GrenanderEstimate>(m, "GrenanderEstimate")
      .def_property_readonly("sample_size", &GrenanderEstimate::sample_size)
      .def_property_readonly("values",
                             [](const GrenanderEstimate& e) {
                               return std::vector<double>(e.values().begin(),
                                                          e.values().end());
                             })
      .def_property_readonly("vertices",
                             [](const GrenanderEstimate& e) {
                               return vertex_list(e.majorant().vertices());
                             })
      .def("eval",
           [](const GrenanderEstimate& e, double x, const std::string& side) {
             return e.eval(x, parse_side(side));
           },
           py::arg("x"), py::arg("side") = "right")
      .def("at_zero", &GrenanderEstimate::at_zero)
      .def("total_mass", &GrenanderEstimate::total_mass);
  m.def("fit", [](const std::vector<double>& sample) { return fit(sample); },
        py::arg("sample"));
  m.def(
      "sup_relative_error",
      [](const GrenanderEstimate& e, const std::string& family, double c_upper) {
        return sup_relative_error(e, parse_family(family), c_upper);
      },
      py::arg("estimate"), py::arg("family"), py::arg("c_upper"));

  // Limit laws.
  py::class_<YGammaCdfResult>(m, "YGammaCdfResult")
      .def_readonly("x", &YGammaCdfResult::x)
      .def_readonly("gamma", &YGammaCdfResult::gamma)
      .def_readonly("cdf", &YGammaCdfResult::cdf)
      .def_readonly("terms", &YGammaCdfResult::terms)
      .def_readonly("tail_bound", &YGammaCdfResult::tail_bound)
      .def_readonly("closed_form", &YGammaCdfResult::closed_form);
  m.def("ygamma_cdf", &ygamma_cdf, py::arg("x"), py::arg("gamma"),
        py::arg("tol") = 1e-10);
  m.def(
      "ygamma_bounds",
      [](double x, double gamma) {
        const CdfBounds b = ygamma_bounds(x, gamma);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("x"), py::arg("gamma"));
  m.def("log_poisson_pmf", &log_poisson_pmf, py::arg("m"), py::arg("k"));

  py::class_<HGammaRealization>(m, "HGammaRealization")
      .def_readonly("gamma", &HGammaRealization::gamma)
      .def_readonly("c", &HGammaRealization::c)
      .def_readonly("jumps", &HGammaRealization::jumps)
      .def_readonly("breaks", &HGammaRealization::breaks)
      .def_readonly("levels", &HGammaRealization::levels)
      .def_readonly("y_gamma", &HGammaRealization::y_gamma)
      .def_readonly("horizon", &HGammaRealization::horizon)
      .def_readonly("arrivals", &HGammaRealization::arrivals)
      .def_readonly("doublings", &HGammaRealization::doublings)
      .def_property_readonly("sup", [](const HGammaRealization& h) { return h.sup.value; })
      .def_property_readonly("sup_location",
                             [](const HGammaRealization& h) { return h.sup.location; })
      .def("h", &HGammaRealization::h, py::arg("t"));
  m.def(
      "simulate_hgamma",
      [](double gamma, double c, std::uint64_t seed, std::uint32_t replicate) {
        RandomStream rng = make_stream(seed, 0, 0, replicate);
        return simulate_hgamma(gamma, c, rng);
      },
      py::arg("gamma"), py::arg("c"), py::arg("seed") = 0, py::arg("replicate") = 0);
  m.def(
      "sup_statistic",
      [](const std::vector<double>& breaks, const std::vector<double>& levels,
         double gamma, double c) {
        const SupStatistic s = sup_statistic(breaks, levels, gamma, c);
        return py::make_tuple(s.value, s.location);
      },
      py::arg("breaks"), py::arg("levels"), py::arg("gamma"), py::arg("c"));

  // Families, addressed by spec strings such as "beta:a=0.5".
  m.def("density", [](const std::string& f, double x) { return density(parse_family(f), x); },
        py::arg("family"), py::arg("x"));
  m.def("cdf", [](const std::string& f, double x) { return cdf(parse_family(f), x); },
        py::arg("family"), py::arg("x"));
  m.def("quantile", [](const std::string& f, double u) { return quantile(parse_family(f), u); },
        py::arg("family"), py::arg("u"));
  m.def(
      "sample",
      [](const std::string& f, std::size_t n, std::uint64_t seed, std::uint32_t replicate) {
        RandomStream rng = make_stream(seed, 0, 0, replicate);
        return sample(parse_family(f), n, rng);
      },
      py::arg("family"), py::arg("n"), py::arg("seed") = 0, py::arg("replicate") = 0);
  m.def(
      "tail_profile",
      [](const std::string& f) {
        const TailProfile p = tail_profile(parse_family(f));
        py::dict d;
        d["gamma"] = p.gamma;
        d["growth"] = std::string(to_string(p.growth));
        d["alpha"] = p.alpha;
        d["beta"] = p.beta;
        d["c1"] = p.c1;
        d["c2"] = p.c2;
        d["c2_tilde"] = p.c2_tilde;
        d["normalizing_rule"] = p.normalizing_rule;
        return d;
      },
      py::arg("family"));
  m.def(
      "normalizing_sequence",
      [](const std::string& f, double n) { return normalizing_sequence(parse_family(f), n); },
      py::arg("family"), py::arg("n"));
  m.def(
      "validate_gnedenko",
      [](const std::string& f, double n, const std::vector<double>& grid) {
        return validate_gnedenko(parse_family(f), n, grid);
      },
      py::arg("family"), py::arg("n"), py::arg("x_grid"));

  // Mixture estimation.
  m.def("estimate_epsilon",
        [](const std::vector<double>& sample) { return estimate_epsilon(sample); },
        py::arg("sample"));
  m.def(
      "contamination_density",
      [](const std::vector<double>& sample, const std::vector<double>& ys) {
        const ContaminationEstimate est = contamination_estimate(sample);
        py::list out;
        for (double y : ys) {
          const auto d = est.density(y);
          out.append(d ? py::object(py::float_(*d)) : py::none());
        }
        return py::make_tuple(est.epsilon_hat(), out);
      },
      py::arg("sample"), py::arg("y"),
      "(epsilon_hat, [density(y) or None]) for data on (0, 1].");

  // Experiments.
  m.def("experiment_names", [] {
    std::vector<std::string> out;
    for (auto n : experiment_names()) out.emplace_back(n);
    return out;
  });
  m.def(
      "run_experiment",
      [](const std::string& experiment, std::vector<double> gammas, std::vector<double> cs,
         std::vector<std::size_t> ns, std::size_t reps, std::uint64_t seed,
         const std::string& family, const std::string& out_dir, unsigned threads,
         double xmax) {
        ExperimentConfig c;
        c.experiment = experiment;
        c.gammas = std::move(gammas);
        c.cs = std::move(cs);
        c.ns = std::move(ns);
        c.replicates = reps;
        c.seed = seed;
        c.family = family;
        c.out_dir = out_dir;
        c.threads = threads;
        c.xmax = xmax;
        ExperimentSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(c);
        }
        return summary_dict(s);
      },
      py::arg("experiment"), py::arg("gamma") = std::vector<double>{},
      py::arg("c") = std::vector<double>{}, py::arg("n") = std::vector<std::size_t>{},
      py::arg("reps") = 0, py::arg("seed") = 20240101, py::arg("family") = "",
      py::arg("out") = ".", py::arg("threads") = 0, py::arg("xmax") = 20.0,
      "Runs an experiment, writes its CSV files and summary.json, returns the summary.");
}
