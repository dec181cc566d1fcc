#include "emhd/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emhd/cutoffs.hpp"
#include "emhd/dyadic.hpp"
#include "emhd/parallel.hpp"

namespace emhd {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double frobenius(const Mat3& m) {
  double s = 0.0;
  for (const auto& r : m)
    for (double v : r) s += v * v;
  return std::sqrt(s);
}

SpectralVectorField minus_e3(const SpectralVectorField& B0) {
  SpectralVectorField d = B0;
  add_constant(d, {0.0, 0.0, -1.0});
  return d;
}

/// |grad B|_F at every grid point
std::vector<double> gradient_magnitude(const SpectralVectorField& B) {
  const Grid3& g = B.grid;
  std::vector<double> acc(g.size(), 0.0);
  std::vector<cplx> spec(g.size()), phys(g.size());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          for (int l = 0; l < g.n; ++l) {
            const double k = a == 0 ? g.k_eff(i) : (a == 1 ? g.k_eff(j) : g.k_eff(l));
            const std::size_t idx = g.index(i, j, l);
            spec[idx] = cplx(0.0, k) * B.c[b][idx];
          }
      fft_raw(3, g.n, spec.data(), phys.data(), false);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += phys[i].real() * phys[i].real();
    }
  for (double& v : acc) v = std::sqrt(v);
  return acc;
}

Vec3 rotate_about(const Vec3& axis, const Vec3& v, double angle) {
  const Vec3 k = axis;
  const double c = std::cos(angle), s = std::sin(angle);
  const Vec3 kxv = cross3(k, v);
  const double kv = dot3(k, v);
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = v[i] * c + kxv[i] * s + k[i] * kv * (1.0 - c);
  return out;
}

/// directions at angle theta around xi, count azimuths
std::vector<Vec3> ring(const Vec3& xi, double theta, int count) {
  const double n = norm3(xi);
  const Vec3 e{xi[0] / n, xi[1] / n, xi[2] / n};
  Vec3 t = std::abs(e[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = cross3(e, t);
  const double un = norm3(u);
  for (double& x : u) x /= un;
  std::vector<Vec3> out;
  for (int m = 0; m < count; ++m) {
    const Vec3 axis = rotate_about(e, u, 2.0 * M_PI * m / count);
    out.push_back(rotate_about(axis, e, theta));
  }
  return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (b == a) return 0.0;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double interp_table(double z0, double dz, const std::vector<double>& v, double z) {
  if (v.empty()) return 0.0;
  const double u = (z - z0) / dz;
  if (u <= 0.0) return v.front();
  const double last = double(v.size() - 1);
  if (u >= last) return v.back();
  const std::size_t i = std::size_t(u);
  const double w = u - double(i);
  return (1.0 - w) * v[i] + w * v[i + 1];
}

}  // namespace

// ---------------------------------------------------------------- measured parameters

double size_bound(double s, const SpectralVectorField& B0) { return ell1_hs_norm(s, minus_e3(B0)); }

NondegeneracyReport nondegeneracy_report(const FieldEvaluator& B0, const Grid3& g) {
  NondegeneracyReport r;
  r.grid_min = kInf;
  double grad_max = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l) {
        const FieldSample s = B0.eval({g.coord(i), g.coord(j), g.coord(l)}, 1);
        r.grid_min = std::min(r.grid_min, norm3(s.B));
        grad_max = std::max(grad_max, frobenius(s.dB));
      }
  r.margin = 0.5 * std::sqrt(3.0) * g.spacing() * grad_max;
  r.mu = r.grid_min - r.margin;
  return r;
}

double nondegeneracy(const FieldEvaluator& B0, const Grid3& g) { return nondegeneracy_report(B0, g).mu; }

double asymptotic_uniformity(double s, const SpectralVectorField& B0, double R) {
  return ell1_hs_norm(s, multiply_x3(minus_e3(B0), [R](double z) { return chi_gt(R, z); }));
}

std::vector<Vec3> cube_directions() {
  std::vector<Vec3> out;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const double n = std::sqrt(double(a * a + b * b + c * c));
        out.push_back({a / n, b / n, c / n});
      }
  return out;
}

RayQuadrature ray_quadrature(const FieldEvaluator& B0, double R, const PhasePoint& start, double t_max, double tol) {
  RayOptions opt;
  opt.t_max = t_max;
  opt.exit_height = std::max(4.0 * R, std::abs(start.x[2]) + R);
  opt.tol = tol;
  opt.watch_heights = {2.0 * R};
  opt.integrands = {
      [](const Vec3&, const Vec3& xi, const Vec3&, const FieldSample& s) { return frobenius(s.dB) * norm3(xi); },
      [](const Vec3&, const Vec3&, const Vec3& xd, const FieldSample&) { return norm3(xd); }};
  const RayTrajectory tr = integrate_ray_two_sided(B0, 1, start, opt);
  RayQuadrature q;
  int exits = 0;
  for (const auto& e : tr.events)
    if (e.kind == RayEventKind::SlabExitTop || e.kind == RayEventKind::SlabExitBottom) ++exits;
  q.escaped = exits >= 2;
  if (tr.samples.empty()) return q;
  q.A = tr.samples.back().q[0];
  const double xi0 = norm3(start.xi);
  for (const auto& s : tr.samples) q.max_frequency_ratio = std::max(q.max_frequency_ratio, norm3(s.xi) / xi0);
  auto crossings = tr.crossings;
  std::sort(crossings.begin(), crossings.end(), [](const PlaneCrossing& a, const PlaneCrossing& b) { return a.t < b.t; });
  bool inside = std::abs(tr.samples.front().x[2]) < 2.0 * R;
  double prev = tr.samples.front().q[1];
  for (const auto& c : crossings) {
    if (inside) q.L += c.q[1] - prev;
    prev = c.q[1];
    inside = !inside;
  }
  if (inside) q.L += tr.samples.back().q[1] - prev;
  return q;
}

RaySweep ray_sweep(const FieldEvaluator& B0, double R, const RaySampleSpec& spec) {
  std::vector<PhasePoint> starts;
  const std::vector<Vec3> dirs = cube_directions();
  const int nz = 4 * spec.x3_per_R;
  for (int j = 0; j < nz; ++j) {
    const double z = spec.center[2] - 2.0 * R + (j + 0.5) * R / spec.x3_per_R;
    for (double a : spec.transverse)
      for (double b : spec.transverse)
        for (const Vec3& d : dirs)
          starts.push_back(PhasePoint({spec.center[0] + a * R, spec.center[1] + b * R, z}, d));
  }
  RaySweep sw;
  auto run_batch = [&](const std::vector<PhasePoint>& batch) {
    std::vector<RayQuadrature> res(batch.size());
    parallel_for(batch.size(), [&](std::size_t i) { res[i] = ray_quadrature(B0, R, batch[i], spec.t_max, spec.tol); });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++sw.rays;
      if (!res[i].escaped) {
        ++sw.unbounded;
        continue;
      }
      if (res[i].A > sw.A) {
        sw.A = res[i].A;
        sw.argmax_A = batch[i];
      }
      if (res[i].L > sw.L) {
        sw.L = res[i].L;
        sw.argmax_L = batch[i];
      }
      sw.max_log_frequency_gap = std::max(sw.max_log_frequency_gap, std::log(res[i].max_frequency_ratio) - res[i].A);
    }
  };
  run_batch(starts);
  double angle = spec.refine_angle;
  for (int level = 0; level < spec.refine_levels; ++level, angle *= 0.5) {
    std::vector<PhasePoint> batch;
    for (const PhasePoint& p : {sw.argmax_A, sw.argmax_L})
      for (const Vec3& d : ring(p.xi, angle, 8)) batch.push_back(PhasePoint(p.x, d));
    run_batch(batch);
  }
  if (sw.unbounded > 0) {
    sw.A = kInf;
    sw.L = kInf;
  }
  return sw;
}

double mizohata_constant(const FieldEvaluator& B0, double R, const RaySampleSpec& spec) {
  return ray_sweep(B0, R, spec).A;
}

double nontrapping_length(const FieldEvaluator& B0, double R, const RaySampleSpec& spec) {
  return ray_sweep(B0, R, spec).L;
}

// ---------------------------------------------------------------- certificates

CertificateReport certify(double s, const FieldEvaluator& B0, const Grid3& g, const CertificateTargets& targets,
                          const RaySampleSpec& spec) {
  CertificateReport r;
  r.s = s;
  r.targets = targets;
  r.spec = spec;
  r.grid = g;
  const SpectralVectorField Bg = fft_forward(sample_field(B0, g));
  std::ostringstream grid_desc;
  grid_desc << "grid n=" << g.n << " lambda=" << g.lambda;
  r.M = size_bound(s, Bg);
  r.provenance["M"] = "l1_I H^s norm of B0 - e3 from samples on " + grid_desc.str();
  r.eps = asymptotic_uniformity(s, Bg, targets.R);
  r.provenance["eps"] = "l1_I H^s norm of chi_{>R}(|x3|)(B0 - e3) on " + grid_desc.str();
  r.nondeg = nondegeneracy_report(B0, g);
  r.mu = r.nondeg.mu;
  r.provenance["mu"] = "grid minimum of |B0| minus half-diagonal Lipschitz margin on " + grid_desc.str();
  if (r.mu > 0.0) {
    const RaySweep sw = ray_sweep(B0, targets.R, spec);
    r.A = sw.A;
    r.L = sw.L;
    r.rays = sw.rays;
    r.unbounded = sw.unbounded;
    std::ostringstream rd;
    rd << "sampled lower bound over " << sw.rays << " two-sided rays (x3 step R/" << spec.x3_per_R << ", "
       << spec.transverse.size() << "x" << spec.transverse.size() << " transverse stations, 26 directions, "
       << spec.refine_levels << " refinement levels)";
    r.provenance["A"] = rd.str();
    r.provenance["L"] = rd.str();
  } else {
    r.rays_skipped = true;
    r.A = kInf;
    r.L = kInf;
    r.provenance["A"] = "not traced: |B0| not bounded below on the grid";
    r.provenance["L"] = r.provenance["A"];
  }
  r.size_ok = r.M < targets.M;
  r.nondegenerate_ok = r.mu > targets.mu;
  r.mizohata_ok = r.A < targets.A;
  r.uniformity_ok = r.eps < targets.eps;
  r.nontrapping_ok = r.L < targets.L;
  r.all_ok = r.size_ok && r.nondegenerate_ok && r.mizohata_ok && r.uniformity_ok && r.nontrapping_ok;
  return r;
}

std::string certificate_json(const CertificateReport& r) {
  nlohmann::ordered_json j;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return "inf";
  };
  j["s"] = r.s;
  j["measured"] = {{"M", num(r.M)}, {"mu", num(r.mu)}, {"A", num(r.A)}, {"R", r.targets.R}, {"L", num(r.L)},
                   {"eps", num(r.eps)}};
  j["targets"] = {{"M", r.targets.M}, {"mu", r.targets.mu}, {"A", r.targets.A}, {"R", r.targets.R},
                  {"L", r.targets.L}, {"eps", r.targets.eps}};
  j["pass"] = {{"size", r.size_ok}, {"nondegeneracy", r.nondegenerate_ok}, {"mizohata", r.mizohata_ok},
               {"uniformity", r.uniformity_ok}, {"nontrapping", r.nontrapping_ok}, {"all", r.all_ok}};
  j["nondegeneracy"] = {{"grid_min", r.nondeg.grid_min}, {"margin", r.nondeg.margin}};
  j["sampling"] = {{"rays", r.rays},
                   {"unbounded", r.unbounded},
                   {"rays_skipped", r.rays_skipped},
                   {"x3_per_R", r.spec.x3_per_R},
                   {"transverse", r.spec.transverse},
                   {"center", r.spec.center},
                   {"directions", 26},
                   {"refine_levels", r.spec.refine_levels},
                   {"refine_angle", r.spec.refine_angle},
                   {"t_max", r.spec.t_max},
                   {"tol", r.spec.tol},
                   {"grid_n", r.grid.n},
                   {"grid_lambda", r.grid.lambda},
                   {"sup_quantities", "sampled lower bounds"}};
  nlohmann::ordered_json prov;
  for (const auto& [k, v] : r.provenance) prov[k] = v;
  j["provenance"] = prov;
  return j.dump(2);
}

// ---------------------------------------------------------------- multiplier symbols

double Envelope::operator()(double z) const {
  if (values.empty()) return 0.0;
  const double u = (z - z0) / dz;
  if (u < 0.0 || u > double(values.size() - 1)) return 0.0;
  return interp_table(z0, dz, values, z);
}

double Envelope::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * dz;
}

Envelope envelope(const SpectralVectorField& B, int k0, int refine) {
  const Grid3& g = B.grid;
  Envelope F;
  F.k0 = k0;
  const std::vector<double> mag = gradient_magnitude(B);
  F.plane_z.resize(g.n);
  F.plane_sup.assign(g.n, 0.0);
  for (int l = 0; l < g.n; ++l) F.plane_z[l] = g.coord(l);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l) F.plane_sup[l] = std::max(F.plane_sup[l], mag[g.index(i, j, l)]);
  const double scale = std::ldexp(1.0, k0);
  const double width = 1.0 / scale;
  const double h = g.spacing();
  F.dz = std::min(h, width) / std::max(1, refine);
  const double pad = 8.0 * width;
  const double zlo = F.plane_z.front() - pad, zhi = F.plane_z.back() + pad;
  const std::size_t count = std::size_t(std::ceil((zhi - zlo) / F.dz)) + 1;
  F.z0 = zlo;
  auto g_at = [&](double z) {
    const double u = (z - F.plane_z.front()) / h;
    if (u < 0.0 || u > double(g.n - 1)) return 0.0;
    const std::size_t i = std::min<std::size_t>(std::size_t(u), std::size_t(g.n - 2));
    const double w = u - double(i);
    return (1.0 - w) * F.plane_sup[i] + w * F.plane_sup[i + 1];
  };
  std::vector<double> gz(count);
  for (std::size_t i = 0; i < count; ++i) gz[i] = g_at(zlo + i * F.dz);
  const long reach = long(std::ceil(6.0 * width / F.dz));
  std::vector<double> kernel(2 * reach + 1);
  for (long m = -reach; m <= reach; ++m) {
    const double v = scale * m * F.dz;
    kernel[m + reach] = scale * std::pow(1.0 + v * v, -50.0);
  }
  F.values.assign(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    double acc = 0.0;
    for (long m = -reach; m <= reach; ++m) {
      const long j = long(i) - m;
      if (j < 0 || j >= long(count)) continue;
      acc += kernel[m + reach] * gz[j];
    }
    F.values[i] = acc * F.dz;
  }
  return F;
}

double envelope_domination(const Envelope& F) {
  double worst = 0.0;
  for (std::size_t l = 0; l < F.plane_z.size(); ++l) {
    if (F.plane_sup[l] <= 0.0) continue;
    const double f = F(F.plane_z[l]);
    if (f <= 0.0) return kInf;
    worst = std::max(worst, F.plane_sup[l] / f);
  }
  return worst;
}

double gradient_l1_linf(const Envelope& F) {
  double s = 0.0;
  for (std::size_t l = 0; l < F.plane_sup.size(); ++l) s += F.plane_sup[l];
  const double h = F.plane_z.size() > 1 ? F.plane_z[1] - F.plane_z[0] : 1.0;
  return s * h;
}

double OuterMultiplier::operator()(double z) const { return interp_table(z0, dz, values, z); }

double OuterMultiplier::derivative(double z) const {
  return 12.0 * c.C_f * (1.0 - chi_lt(R0, z)) * F(z) + 12.0 * c.C_med / R0 * (chi_lt(8.0 * R0, z) - chi_lt(R0, z));
}

OuterMultiplier f_out(const Envelope& F, double R0, const MultiplierConstants& c, double half_extent) {
  OuterMultiplier f;
  f.F = F;
  f.R0 = R0;
  f.c = c;
  double H = std::max(half_extent, 17.0 * R0);
  if (!F.values.empty()) H = std::max({H, std::abs(F.z0), std::abs(F.z0 + F.dz * double(F.values.size() - 1))});
  f.dz = std::min(R0 / 64.0, F.values.empty() ? R0 / 64.0 : F.dz);
  f.z0 = -H;
  const std::size_t count = std::size_t(std::ceil(2.0 * H / f.dz)) + 1;
  f.values.assign(count, 0.0);
  double prev = f.derivative(f.z0);
  for (std::size_t i = 1; i < count; ++i) {
    const double cur = f.derivative(f.z0 + i * f.dz);
    f.values[i] = f.values[i - 1] + 0.5 * (prev + cur) * f.dz;
    prev = cur;
  }
  return f;
}

double doi_multiplier(const FieldEvaluator& B, double R0, const PhasePoint& p, bool* truncated, double t_max) {
  RayOptions opt;
  opt.backward = true;
  opt.t_max = t_max;
  opt.exit_height = std::max(4.0 * R0, std::abs(p.x[2])) + R0;
  opt.integrands = {[R0](const Vec3& x, const Vec3& xi, const Vec3&, const FieldSample&) {
    return chi_lt(2.0 * R0, x[2]) * norm3(xi);
  }};
  const RayTrajectory tr = integrate_ray(B, 1, p, opt);
  if (truncated) *truncated = !tr.escaped();
  if (tr.samples.empty()) return 0.0;
  return tr.samples.front().q[0];
}

double commutator_symbol(const FieldSample& s, double sigma, const Vec3& xi) {
  double acc = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) acc += s.dB[a][b] * xi[a] * xi[b];
  const double n2 = dot3(xi, xi);
  return -sigma * acc * std::sqrt(n2) / (1.0 + n2);
}

double renorm_q(double R, double z) {
  const double u = std::min(std::abs(z) / (8.0 * R), 4.0);
  const double v = 8.0 * simpson([](double t) { return chi_window12(t); }, 0.0, u, 2000);
  return z >= 0.0 ? v : -v;
}

RenormValue renorm_psi(const FieldEvaluator& B, double sigma, double R, int sign, const PhasePoint& p, double C0,
                       double A, double t_max) {
  RayOptions opt;
  opt.t_max = t_max;
  opt.exit_height = std::max(32.0 * R, std::abs(p.x[2])) + R;
  opt.integrands = {[R, sigma](const Vec3& x, const Vec3& xi, const Vec3&, const FieldSample& s) {
    return chi_lt(16.0 * R, x[2]) * commutator_symbol(s, sigma, xi);
  }};
  RayOptions bo = opt;
  bo.backward = true;
  const RayTrajectory f = integrate_ray(B, 1, p, opt);
  const RayTrajectory b = integrate_ray(B, 1, p, bo);
  RenormValue v;
  v.truncated = !f.escaped() || !b.escaped();
  const double back = b.samples.empty() ? 0.0 : b.samples.front().q[0];
  const double fwd = f.samples.empty() ? 0.0 : f.samples.back().q[0];
  v.psi_tilde = 0.5 * back - 0.5 * fwd;
  const double sg = sign >= 0 ? 1.0 : -1.0;
  v.psi = chi_gt1(norm3(p.xi)) * (chi_lt(16.0 * R, p.x[2]) * v.psi_tilde + sg * sigma * C0 * A * renorm_q(R, p.x[2]));
  return v;
}

PositivityReport positivity_probe(const FieldEvaluator& B, const SpectralVectorField& Bgrid, double R0,
                                  MultiplierConstants c, int ray_count, double tolerance) {
  PositivityReport rep;
  const Envelope F = envelope(Bgrid, lp_top_shell(Bgrid.grid));
  const std::vector<Vec3> dirs = sphere_directions(ray_count);
  RayOptions opt;
  opt.t_max = 400.0;
  opt.exit_height = 16.0 * R0;
  opt.integrands = {[R0](const Vec3& x, const Vec3& xi, const Vec3&, const FieldSample&) {
    return chi_lt(2.0 * R0, x[2]) * norm3(xi);
  }};
  std::vector<RayTrajectory> rays(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    const double z = -8.0 * R0 + 16.0 * R0 * (double(i) + 0.5) / double(dirs.size());
    rays[i] = integrate_ray_two_sided(B, 1, PhasePoint({0.0, 0.0, z}, dirs[i]), opt);
  });
  for (const auto& r : rays)
    for (const auto& s : r.samples) rep.max_f_in = std::max(rep.max_f_in, s.q[0]);
  if (c.C_med <= 0.0) {
    double dmax = 0.0;
    for (int i = 0; i <= 4000; ++i) dmax = std::max(dmax, std::abs(chi_lt1_prime(1.0 + i / 4000.0)));
    c.C_med = c.C_f * c.M * dmax * rep.max_f_in / 24.0;
  }
  rep.C_med = c.C_med;
  const OuterMultiplier fo = f_out(F, R0, c);
  rep.rays = int(rays.size());
  rep.min_rate = kInf;
  for (const auto& r : rays)
    for (const auto& s : r.samples) {
      if (std::abs(s.x[2]) > 8.0 * R0) continue;
      const FieldSample fs = B.eval(s.x, 1);
      const Vec3 xd = symbol_dxi(fs, s.xi);
      const double xin = norm3(s.xi);
      const double z = s.x[2];
      const double dchi = chi_lt1_prime(z / (4.0 * R0)) / (4.0 * R0);
      const double d = fo.derivative(z) * xd[2] +
                       c.C_f * c.M * (dchi * xd[2] * s.q[0] + chi_lt(4.0 * R0, z) * chi_lt(2.0 * R0, z) * xin);
      const double rate = d / xin;
      ++rep.samples;
      rep.min_rate = std::min(rep.min_rate, rate);
      if (rate < -tolerance) ++rep.violations;
    }
  if (rep.samples == 0) rep.min_rate = 0.0;
  return rep;
}

}  // namespace emhd
