#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "emhd/certify.hpp"
#include "emhd/config.hpp"
#include "emhd/dyadic.hpp"
#include "emhd/parallel.hpp"
#include "emhd/psdo.hpp"
#include "emhd/rays.hpp"
#include "emhd/report.hpp"
#include "emhd/smoothing.hpp"
#include "emhd/solver.hpp"

namespace emhd::cli {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

Vec3 vec3(const json& a) { return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}; }

ojson vec_json(const Vec3& v) { return ojson::array({v[0], v[1], v[2]}); }

std::string path_in(const CommandContext& ctx, const std::string& name) { return ctx.out + "/" + name; }

void write_json(const CommandContext& ctx, const std::string& name, ojson body) {
  ojson doc;
  doc["provenance"] = provenance(ctx.command, ctx.hash);
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  write_text(path_in(ctx, name), doc.dump(2) + "\n");
}

void write_csv(const CommandContext& ctx, const std::string& name, const std::string& body) {
  write_text(path_in(ctx, name), csv_provenance(ctx.command, ctx.hash) + body);
}

CertificateTargets targets_from(const json& t) {
  CertificateTargets r;
  r.M = t["M"];
  r.mu = t["mu"];
  r.A = t["A"];
  r.R = t["R"];
  r.L = t["L"];
  r.eps = t["eps"];
  return r;
}

RaySampleSpec ray_spec_from(const json& j) {
  RaySampleSpec s;
  s.x3_per_R = j["x3_per_R"];
  s.transverse = j["transverse"].get<std::vector<double>>();
  s.center = vec3(j["center"]);
  s.refine_levels = j["refine_levels"];
  s.refine_angle = j["refine_angle"];
  s.t_max = j["t_max"];
  s.tol = j["tol"];
  return s;
}

double finite_or_throw(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError(what + " is not finite");
  return v;
}

}  // namespace

int cmd_trace(const CommandContext& ctx) {
  const json& c = ctx.config;
  const Grid3 g = grid_from(c["grid"]);
  const FieldPtr field = make_field(c["field"], g);
  RayOptions opt;
  opt.t_max = c["t_max"];
  opt.exit_height = c["exit_height"];
  opt.tol = c["tol"];
  opt.output_dt = c["output_dt"];
  const bool two_sided = c["two_sided"];

  const std::size_t count = c["rays"].size();
  std::vector<RayTrajectory> rays(count);
  parallel_for(count, [&](std::size_t i) {
    const json& r = c["rays"][i];
    const PhasePoint start(vec3(r["x"]), vec3(r["xi"]));
    const int sign = r["sign"];
    rays[i] = two_sided ? integrate_ray_two_sided(*field, sign, start, opt) : integrate_ray(*field, sign, start, opt);
  });

  ojson summary;
  summary["field"] = field_id(c["field"]);
  ojson list = ojson::array();
  for (std::size_t i = 0; i < count; ++i) {
    const RayTrajectory& t = rays[i];
    for (const auto& s : t.samples)
      for (int a = 0; a < 3; ++a)
        if (!std::isfinite(s.x[a]) || !std::isfinite(s.xi[a])) throw NumericalError("ray " + std::to_string(i) + " is not finite");
    char name[32];
    std::snprintf(name, sizeof name, "rays/ray_%04zu.csv", i);
    write_csv(ctx, name, trajectory_csv(t, *field));
    const ConeReport cone = cone_angle(t, *field);
    ojson r;
    r["index"] = i;
    r["file"] = name;
    r["escaped"] = t.escaped();
    r["accepted_steps"] = t.accepted;
    r["max_cone_angle"] = cone.max_angle;
    r["hamiltonian_drift"] = hamiltonian_drift(t, *field);
    ojson events = ojson::array();
    for (const auto& e : t.events) events.push_back({{"kind", to_string(e.kind)}, {"t", e.t}});
    r["events"] = events;
    list.push_back(r);
  }
  summary["rays"] = list;

  const int nsphere = c["sphere_directions"];
  ojson sphere;
  sphere["count"] = nsphere;
  sphere["cone_half_angle"] = cone_half_angle();
  if (nsphere > 0) {
    const FieldSample s0 = field->eval({0.0, 0.0, 0.0}, 1);
    double worst = 0.0;
    Vec3 arg{0, 0, 1};
    for (const Vec3& xi : sphere_directions(nsphere)) {
      const double a = angle_between(symbol_dxi(s0, xi), s0.B);
      if (a > worst) {
        worst = a;
        arg = xi;
      }
    }
    sphere["max_cone_angle"] = finite_or_throw(worst, "cone angle");
    sphere["argmax_xi"] = vec_json(arg);
  }
  summary["sphere"] = sphere;
  write_json(ctx, "summary.json", summary);
  return kOk;
}

int cmd_certify(const CommandContext& ctx) {
  const json& c = ctx.config;
  const Grid3 g = grid_from(c["grid"]);
  const FieldPtr field = make_field(c["field"], g);
  CertificateReport r = certify(c["s"].get<double>(), *field, g, targets_from(c["targets"]), ray_spec_from(c["rays"]));
  r.provenance["field"] = field_id(c["field"]);
  for (double v : {r.M, r.eps})
    if (!std::isfinite(v)) throw NumericalError("certificate parameter is not finite");
  ojson body;
  body["certificate"] = ojson::parse(certificate_json(r));
  write_json(ctx, "certificate.json", body);
  std::cout << "certificate " << (r.all_ok ? "passed" : "failed") << " for " << field_id(c["field"]) << '\n';
  return (ctx.strict && !r.all_ok) ? kCertificateFailure : kOk;
}

std::string diagnostics_csv(const std::vector<Diagnostic>& history) {
  std::ostringstream csv;
  csv.precision(17);
  csv << "t,energy,fluct_energy,max_divergence,l2,h1\n";
  for (const auto& d : history)
    csv << d.t << ',' << d.energy << ',' << d.fluct_energy << ',' << d.max_divergence << ',' << d.l2 << ',' << d.h1
        << '\n';
  return csv.str();
}

int cmd_solve_2p5d(const CommandContext& ctx) {
  const json& c = ctx.config;
  const Grid3 g = grid_from(c["grid"]);
  TwoPointFiveDState r;
  try {
    r = reduce_2p5d(make_spectral(c["background"], g) + make_spectral(c["initial"], g));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/initial", e.what());
  }
  const auto diagnose = [&r] {
    Diagnostic d = make_state(SolverMode::Nonlinear, lift_2p5d(r)).history.front();
    d.t = r.t;
    return d;
  };
  const double cfl = cfl_bound(make_state(SolverMode::Nonlinear, lift_2p5d(r)));
  const double T = c["T"];
  const double dt_req = c["dt"].get<double>() > 0.0 ? c["dt"].get<double>() : 0.5 * cfl;
  const int steps = std::max(1, int(std::ceil(T / dt_req - 1e-12)));
  const double dt = T / steps;
  if (dt > cfl && c["enforce_cfl"].get<bool>()) throw ConfigError("/dt", "time step exceeds the CFL bound");
  const int every = c["diag_every"];
  const double psi0 = integral_2p5d(r, r.psi), phi0 = integral_2p5d(r, r.phi);
  std::vector<Diagnostic> history{diagnose()};
  for (int i = 0; i < steps; ++i) {
    step_2p5d(r, dt);
    r.t = (i + 1) * dt;
    if (every > 0 && ((i + 1) % every == 0 || i + 1 == steps)) history.push_back(diagnose());
  }
  write_csv(ctx, "diagnostics.csv", diagnostics_csv(history));

  double max_div = 0.0, e_min = INFINITY, e_max = -INFINITY;
  for (const auto& d : history) {
    max_div = std::max(max_div, d.max_divergence);
    e_min = std::min(e_min, d.fluct_energy);
    e_max = std::max(e_max, d.fluct_energy);
  }
  ojson summary;
  summary["mode"] = "2p5d";
  summary["background"] = field_id(c["background"]);
  summary["initial"] = field_id(c["initial"]);
  summary["n"] = g.n;
  summary["lambda"] = g.lambda;
  summary["T"] = r.t;
  summary["steps"] = steps;
  summary["dt"] = dt;
  summary["cfl_bound"] = cfl;
  summary["cfl_ok"] = dt <= cfl;
  summary["max_divergence"] = max_div;
  const double e0 = history.front().fluct_energy;
  summary["fluct_energy_relative_drift"] = e0 > 0.0 ? (e_max - e_min) / e0 : 0.0;
  summary["psi_integral_drift"] = std::abs(integral_2p5d(r, r.psi) - psi0);
  summary["phi_integral_drift"] = std::abs(integral_2p5d(r, r.phi) - phi0);
  write_json(ctx, "summary.json", summary);
  const RealVectorField final_field = fft_inverse(lift_2p5d(r));
  if (c["save_field"].get<bool>()) write_field(path_in(ctx, "final.field"), final_field);
  if (!final_field.all_finite()) throw NumericalError("solution is not finite");
  return kOk;
}

int cmd_solve(const CommandContext& ctx) {
  const json& c = ctx.config;
  if (c["mode"] == "2p5d") return cmd_solve_2p5d(ctx);
  const Grid3 g = grid_from(c["grid"]);
  const SolverMode mode = solver_mode_from_string(c["mode"]);
  const SpectralVectorField background = make_spectral(c["background"], g);
  const SpectralVectorField initial = make_spectral(c["initial"], g);
  SolverState s = mode == SolverMode::Nonlinear ? make_state(mode, background + initial)
                                               : make_state(mode, initial, background);
  SolveOptions opt;
  opt.T = c["T"];
  opt.dt = c["dt"];
  opt.enforce_cfl = c["enforce_cfl"];
  opt.diag_every = c["diag_every"];
  SolveResult res;
  try {
    res = solve(s, opt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/dt", e.what());
  }

  double max_div = 0.0, e_min = INFINITY, e_max = -INFINITY;
  for (const auto& d : s.history) {
    max_div = std::max(max_div, d.max_divergence);
    e_min = std::min(e_min, d.fluct_energy);
    e_max = std::max(e_max, d.fluct_energy);
  }
  write_csv(ctx, "diagnostics.csv", diagnostics_csv(s.history));

  ojson summary;
  summary["mode"] = to_string(mode);
  summary["background"] = field_id(c["background"]);
  summary["initial"] = field_id(c["initial"]);
  summary["n"] = g.n;
  summary["lambda"] = g.lambda;
  summary["T"] = s.t;
  summary["steps"] = res.steps;
  summary["dt"] = res.dt;
  summary["cfl_bound"] = cfl_bound(s);
  summary["cfl_ok"] = res.cfl_ok;
  summary["blown_up"] = s.blown_up;
  summary["max_divergence"] = max_div;
  const double e0 = s.history.empty() ? 0.0 : s.history.front().fluct_energy;
  summary["fluct_energy_relative_drift"] = e0 > 0.0 ? (e_max - e_min) / e0 : 0.0;
  if (mode != SolverMode::Nonlinear && c["background"]["type"] == "e3") {
    const SpectralVectorField exact = propagate_constant(initial, s.t);
    summary["exact_relative_error"] = l2_norm(s.field() - exact) / l2_norm(exact);
  }
  write_json(ctx, "summary.json", summary);
  if (c["save_field"].get<bool>()) write_field(path_in(ctx, "final.field"), fft_inverse(s.field()));
  if (s.blown_up) throw NumericalError("solver blow-up flag raised");
  if (!fft_inverse(s.field()).all_finite()) throw NumericalError("solution is not finite");
  return kOk;
}

int cmd_norms(const CommandContext& ctx) {
  const json& c = ctx.config;
  const Grid3 g = grid_from(c["grid"]);
  const SpectralVectorField B = make_spectral(c["field"], g);
  const double s = c["s"];
  const double R = c["R"];
  SpectralVectorField fluct = B;
  const Vec3 m = mean(B);
  add_constant(fluct, {-m[0], -m[1], -m[2]});

  ojson body;
  body["field"] = field_id(c["field"]);
  body["n"] = g.n;
  body["lambda"] = g.lambda;
  body["s"] = s;
  body["mean"] = vec_json(m);
  body["l2_fluctuation"] = l2_norm(fluct);
  body["hs_fluctuation"] = hs_norm(fluct, s);
  body["ell1_hs_fluctuation"] = finite_or_throw(ell1_hs_norm(s, fluct), "ell1 H^s norm");
  body["size_bound"] = size_bound(s, B);
  body["asymptotic_uniformity"] = asymptotic_uniformity(s, B, R);
  body["ell1_report"] = ojson::parse(ell1_report_json(s, ell1_hs_report(s, fluct)));
  write_json(ctx, "norms.json", body);

  std::ostringstream csv;
  csv.precision(17);
  csv << "k,l2,partial\n";
  for (int k = 0; k <= lp_top_shell(g); ++k) {
    bool partial = false;
    const double v = l2_norm(lp_project(k, fluct, &partial));
    csv << k << ',' << v << ',' << (partial ? 1 : 0) << '\n';
  }
  write_csv(ctx, "shells.csv", csv.str());
  return kOk;
}

int cmd_smooth(const CommandContext& ctx) {
  const json& c = ctx.config;
  const Grid3 g = grid_from(c["grid"]);
  const SpectralVectorField B = make_spectral(c["background"], g);
  SmoothingOptions opt;
  const std::string method = c["method"];
  opt.method = method == "exact" ? SmoothingMethod::Exact
               : method == "linearized" ? SmoothingMethod::Linearized
                                        : SmoothingMethod::Auto;
  opt.frames = c["frames"];
  opt.center = c["center"];
  opt.width = c["width"];
  opt.box_fraction = c["box_fraction"];
  opt.seed = c["seed"].get<std::uint64_t>();
  ojson cert = nullptr;
  if (c["certify"].get<bool>()) {
    const Grid3 cg = grid_from(c["certify_grid"]);
    const CertificateReport r = certify(c["s"].get<double>(), *make_field(c["background"], cg), cg,
                                        targets_from(c["targets"]));
    opt.certified = r.all_ok;
    cert = ojson::parse(certificate_json(r));
  } else {
    opt.certified = false;
  }
  SmoothingReport rep;
  try {
    rep = measure_smoothing(B, field_id(c["background"]), c["ks"].get<std::vector<int>>(), c["T"].get<double>(), opt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  write_csv(ctx, "smoothing.csv", smoothing_csv(rep));
  ojson body;
  body["smoothing"] = ojson::parse(smoothing_json(rep));
  body["certificate"] = cert;
  write_json(ctx, "smoothing.json", body);
  for (const auto& row : rep.rows)
    if (!(row.le_ratio > 0.0) || !std::isfinite(row.le_ratio) || !std::isfinite(row.linf_ratio))
      throw NumericalError("smoothing ratio is not finite and positive");
  if (rep.blown_up) throw NumericalError("solver blow-up flag raised");
  return kOk;
}

int cmd_psdo_check(const CommandContext& ctx) {
  const json& c = ctx.config;
  const json& cv = c["cv"];
  const Lattice L1(1, cv["n"].get<int>(), cv["lambda"].get<double>());
  const CvReport rep = hf_cv_check(L1, cv["M"].get<double>(), cv["shells"].get<std::vector<int>>(), cv["max_order"]);
  ojson cvj;
  cvj["c00"] = rep.c00;
  cvj["max_order"] = rep.max_order;
  ojson rows = ojson::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"shell", r.shell},
                    {"lambda", r.lambda},
                    {"op_norm", finite_or_throw(r.op_norm, "operator norm")},
                    {"ratio", r.ratio},
                    {"threshold", r.threshold},
                    {"above_threshold", r.above_threshold},
                    {"rescaled_sup", r.rescaled_sup}});
  cvj["rows"] = rows;

  const json& cp = c["composition"];
  const Lattice L2(1, cp["n"].get<int>(), cp["lambda"].get<double>());
  const CompositionPair pair = half_order_pair(L2, cp["coefficient_mode"], cp["amplitude"]);
  const CompositionReport comp = composition_residual(L2, pair.a, pair.b, pair.ab, pair.correction,
                                                      cp["shells"].get<std::vector<int>>());
  ojson cj;
  ojson crow = ojson::array();
  for (const auto& r : comp.rows) crow.push_back({{"shell", r.shell}, {"first", r.first}, {"second", r.second}});
  cj["rows"] = crow;
  cj["first_slope"] = finite_or_throw(comp.first_slope, "composition slope");
  cj["second_slope"] = comp.second_slope;
  cj["expected_first_slope"] = -0.5;
  cj["expected_second_slope"] = -1.5;

  ojson body;
  body["cv"] = cvj;
  body["composition"] = cj;
  write_json(ctx, "psdo.json", body);
  return kOk;
}

int run(const std::string& command, const std::string& config_path, const std::string& out_override,
        int threads_override, bool strict, bool print_config) {
  try {
    json user = json::object();
    if (!config_path.empty()) {
      std::string text;
      try {
        text = read_text(config_path);
      } catch (const std::runtime_error& e) {
        throw ConfigError("", e.what());
      }
      user = parse_config_text(text);
    }
    CommandContext ctx;
    ctx.command = command;
    ctx.config = resolve_config(command, user);
    if (threads_override > 0) ctx.config["threads"] = threads_override;
    ctx.hash = config_hash(ctx.config);
    ctx.out = out_override.empty() ? ctx.config["out"].get<std::string>() : out_override;
    ctx.strict = strict;
    if (print_config) {
      std::cout << ctx.config.dump(2) << '\n';
      return kOk;
    }
    set_thread_count(ctx.config["threads"]);
    if (command == "trace") return cmd_trace(ctx);
    if (command == "certify") return cmd_certify(ctx);
    if (command == "solve") return cmd_solve(ctx);
    if (command == "norms") return cmd_norms(ctx);
    if (command == "smooth") return cmd_smooth(ctx);
    if (command == "psdo-check") return cmd_psdo_check(ctx);
    throw ConfigError("", "unknown command " + command);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace emhd::cli
