#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "emhd/certify.hpp"
#include "emhd/config.hpp"
#include "emhd/dyadic.hpp"
#include "emhd/psdo.hpp"
#include "emhd/rays.hpp"
#include "emhd/report.hpp"
#include "emhd/smoothing.hpp"
#include "emhd/solver.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

emhd::Vec3 vec3(const std::vector<double>& v) {
  if (v.size() != 3) throw std::invalid_argument("expected 3 components");
  return {v[0], v[1], v[2]};
}

json field_spec(const std::string& spec) {
  json user = json::parse(spec);
  return emhd::resolve_config("norms", json{{"field", user}})["field"];
}

Array to_array(const emhd::RealVectorField& f) {
  const auto n = py::ssize_t(f.grid.n);
  Array out({py::ssize_t(3), n, n, n});
  auto* p = out.mutable_data();
  for (int a = 0; a < 3; ++a) std::copy(f.c[a].begin(), f.c[a].end(), p + a * f.grid.size());
  return out;
}

emhd::SpectralVectorField from_array(const Array& a, double lambda) {
  if (a.ndim() != 4 || a.shape(0) != 3 || a.shape(1) != a.shape(2) || a.shape(2) != a.shape(3))
    throw std::invalid_argument("expected an array of shape (3, n, n, n)");
  emhd::RealVectorField f(emhd::Grid3(int(a.shape(1)), lambda));
  const double* p = a.data();
  for (int c = 0; c < 3; ++c) std::copy(p + c * f.grid.size(), p + (c + 1) * f.grid.size(), f.c[c].begin());
  return emhd::fft_forward(f);
}

emhd::CertificateTargets targets_from(const py::dict& d) {
  emhd::CertificateTargets t;
  for (auto item : d) {
    const std::string k = py::str(item.first);
    const double v = item.second.cast<double>();
    if (k == "M") t.M = v;
    else if (k == "mu") t.mu = v;
    else if (k == "A") t.A = v;
    else if (k == "R") t.R = v;
    else if (k == "L") t.L = v;
    else if (k == "eps") t.eps = v;
    else throw std::invalid_argument("unknown target '" + k + "'");
  }
  return t;
}

}  // namespace

PYBIND11_MODULE(_emhd, m) {
  m.doc() = "Ray tracing, dyadic norms and solvers for electron MHD around a uniform field";

  m.def("version", &emhd::version_string);
  m.def("cone_half_angle", &emhd::cone_half_angle);
  m.def("principal_symbol", [](const std::vector<double>& B, const std::vector<double>& xi) {
    return emhd::principal_symbol(vec3(B), vec3(xi));
  });
  m.def("group_velocity", [](int sign, const std::vector<double>& xi) {
    const emhd::Vec3 v = emhd::group_velocity(sign, vec3(xi));
    return std::vector<double>(v.begin(), v.end());
  }, py::arg("sign"), py::arg("xi"));

  m.def("resolve_config", [](const std::string& command, const std::string& text) {
    return emhd::resolve_config(command, emhd::parse_config_text(text)).dump();
  }, py::arg("command"), py::arg("config") = "{}");

  m.def("sample_field", [](const std::string& spec, int n, double lambda) {
    const emhd::Grid3 g(n, lambda);
    return to_array(emhd::fft_inverse(emhd::make_spectral(field_spec(spec), g)));
  }, py::arg("spec"), py::arg("n"), py::arg("lambda_"));

  m.def("propagate_constant", [](const Array& b, double lambda, double t) {
    return to_array(emhd::fft_inverse(emhd::propagate_constant(emhd::leray_project(from_array(b, lambda)), t)));
  }, py::arg("field"), py::arg("lambda_"), py::arg("t"));

  m.def("solve", [](const std::string& mode, const Array& initial, double lambda, double T, double dt) {
    const emhd::SpectralVectorField u0 = emhd::leray_project(from_array(initial, lambda));
    emhd::SolverState s = emhd::make_state(emhd::solver_mode_from_string(mode), u0);
    emhd::SolveOptions opt;
    opt.T = T;
    opt.dt = dt;
    {
      py::gil_scoped_release release;
      emhd::solve(s, opt);
    }
    py::list energy;
    for (const auto& d : s.history) energy.append(py::make_tuple(d.t, d.energy, d.max_divergence));
    return py::make_tuple(to_array(emhd::fft_inverse(s.field())), energy);
  }, py::arg("mode"), py::arg("initial"), py::arg("lambda_"), py::arg("T"), py::arg("dt") = 0.0);

  m.def("trace_ray", [](const std::string& spec, const std::vector<double>& x, const std::vector<double>& xi,
                        double t_max, double exit_height, double output_dt, int sign, int n, double lambda) {
    const emhd::FieldPtr f = emhd::make_field(field_spec(spec), emhd::Grid3(n, lambda));
    emhd::RayOptions opt;
    opt.t_max = t_max;
    opt.exit_height = exit_height;
    opt.output_dt = output_dt;
    const emhd::RayTrajectory tr = emhd::integrate_ray(*f, sign, emhd::PhasePoint(vec3(x), vec3(xi)), opt);
    Array out({py::ssize_t(tr.samples.size()), py::ssize_t(7)});
    auto r = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      const auto& s = tr.samples[i];
      r(i, 0) = s.t;
      for (int a = 0; a < 3; ++a) {
        r(i, 1 + a) = s.x[a];
        r(i, 4 + a) = s.xi[a];
      }
    }
    std::vector<std::pair<std::string, double>> events;
    for (const auto& e : tr.events) events.emplace_back(emhd::to_string(e.kind), e.t);
    return py::make_tuple(out, events, emhd::cone_angle(tr, *f).max_angle);
  }, py::arg("spec"), py::arg("x"), py::arg("xi"), py::arg("t_max") = 50.0, py::arg("exit_height") = 4.0,
     py::arg("output_dt") = 0.0, py::arg("sign") = 1, py::arg("n") = 32, py::arg("lambda_") = 2.0);

  m.def("certify", [](const std::string& spec, int n, double lambda, double s, const py::dict& targets) {
    const emhd::Grid3 g(n, lambda);
    const emhd::FieldPtr f = emhd::make_field(field_spec(spec), g);
    std::string out;
    {
      py::gil_scoped_release release;
      out = emhd::certificate_json(emhd::certify(s, *f, g, targets_from(targets)));
    }
    return out;
  }, py::arg("spec"), py::arg("n") = 32, py::arg("lambda_") = 2.0, py::arg("s") = 2.0,
     py::arg("targets") = py::dict());

  m.def("shell_norms", [](const Array& b, double lambda) {
    const emhd::SpectralVectorField f = from_array(b, lambda);
    std::vector<double> out;
    for (int k = 0; k <= emhd::lp_top_shell(f.grid); ++k) out.push_back(emhd::l2_norm(emhd::lp_project(k, f)));
    return out;
  }, py::arg("field"), py::arg("lambda_"));

  m.def("ell1_hs_norm", [](const Array& b, double lambda, double s) {
    return emhd::ell1_hs_norm(s, from_array(b, lambda));
  }, py::arg("field"), py::arg("lambda_"), py::arg("s"));

  m.def("measure_smoothing", [](const std::string& background, int n, double lambda, const std::vector<int>& ks,
                                double T, int frames) {
    const emhd::Grid3 g(n, lambda);
    const json spec = field_spec(background);
    emhd::SmoothingOptions opt;
    opt.frames = frames;
    std::string out;
    {
      py::gil_scoped_release release;
      out = emhd::smoothing_json(emhd::measure_smoothing(emhd::make_spectral(spec, g), emhd::field_id(spec), ks, T, opt));
    }
    return out;
  }, py::arg("background"), py::arg("n"), py::arg("lambda_"), py::arg("ks"), py::arg("T"), py::arg("frames") = 65);

  m.def("hf_cv_check", [](int n, double lambda, double M, const std::vector<int>& shells, int max_order) {
    const emhd::CvReport rep = emhd::hf_cv_check(emhd::Lattice(1, n, lambda), M, shells, max_order);
    py::list rows;
    for (const auto& r : rep.rows) {
      py::dict d;
      d["shell"] = r.shell;
      d["op_norm"] = r.op_norm;
      d["ratio"] = r.ratio;
      d["threshold"] = r.threshold;
      d["above_threshold"] = r.above_threshold;
      rows.append(d);
    }
    return rows;
  }, py::arg("n"), py::arg("lambda_"), py::arg("M"), py::arg("shells"), py::arg("max_order") = 4);

  m.def("fit_slope", &emhd::fit_slope);
}
