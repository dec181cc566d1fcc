#include "emhd/rays.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace emhd {

std::string to_string(RayEventKind k) {
  switch (k) {
    case RayEventKind::SlabExitTop: return "slab-exit-top";
    case RayEventKind::SlabExitBottom: return "slab-exit-bottom";
    case RayEventKind::TimeLimit: return "time-limit";
    case RayEventKind::FrequencyBlowup: return "frequency-blowup";
  }
  return "unknown";
}

bool RayTrajectory::escaped() const {
  for (const auto& e : events)
    if (e.kind == RayEventKind::SlabExitTop || e.kind == RayEventKind::SlabExitBottom) return true;
  return false;
}

std::pair<Vec3, Vec3> hamiltonian_rhs(const FieldSample& s, int sign, const Vec3& xi) {
  const double sg = sign >= 0 ? 1.0 : -1.0;
  Vec3 xd = symbol_dxi(s, xi), kd = symbol_dx(s, xi);
  for (int a = 0; a < 3; ++a) {
    xd[a] *= sg;
    kd[a] *= -sg;
  }
  return {xd, kd};
}

std::pair<Vec3, Vec3> hamiltonian_rhs(const FieldEvaluator& B, int sign, const PhasePoint& p) {
  return hamiltonian_rhs(B.eval(p.x, 1), sign, p.xi);
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using Vec = std::vector<double>;

struct RaySystem {
  const FieldEvaluator& B;
  double sg;        // sign of the Hamiltonian
  double dir;       // +1 forward, -1 backward
  int nq;           // number of quadratures
  bool jac;         // carry the 6x6 Jacobian
  const std::vector<RayIntegrand>& integrands;

  int dim() const { return 6 + nq + (jac ? 36 : 0); }

  void operator()(const double* y, double* dy) const {
    const Vec3 x{y[0], y[1], y[2]}, xi{y[3], y[4], y[5]};
    const FieldSample s = B.eval(x, jac ? 2 : 1);
    auto [xd, kd] = hamiltonian_rhs(s, int(sg), xi);
    for (int a = 0; a < 3; ++a) {
      dy[a] = dir * xd[a];
      dy[3 + a] = dir * kd[a];
    }
    for (int j = 0; j < nq; ++j) dy[6 + j] = integrands[j](x, xi, xd, s);
    if (!jac) return;
    const double r = norm3(xi);
    const double bx = dot3(s.B, xi);
    double dBxi[3];
    for (int g = 0; g < 3; ++g) dBxi[g] = dot3(s.dB[g], xi);
    double A[3][3], Hxx[3][3], Hkk[3][3];
    for (int a = 0; a < 3; ++a)
      for (int g = 0; g < 3; ++g) {
        A[a][g] = s.dB[g][a] * r + dBxi[g] * xi[a] / r;
        Hxx[a][g] = dot3(s.d2B[a][g], xi) * r;
        Hkk[a][g] = (s.B[a] * xi[g] + s.B[g] * xi[a]) / r + bx * ((a == g ? 1.0 : 0.0) / r - xi[a] * xi[g] / (r * r * r));
      }
    double M[6][6];
    for (int a = 0; a < 3; ++a)
      for (int g = 0; g < 3; ++g) {
        M[a][g] = sg * A[a][g];
        M[a][3 + g] = sg * Hkk[a][g];
        M[3 + a][g] = -sg * Hxx[a][g];
        M[3 + a][3 + g] = -sg * A[g][a];
      }
    const double* J = y + 6 + nq;
    double* dJ = dy + 6 + nq;
    for (int i = 0; i < 6; ++i)
      for (int c = 0; c < 6; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 6; ++k) acc += M[i][k] * J[6 * k + c];
        dJ[6 * i + c] = dir * acc;
      }
  }
};

struct Dense {
  double t0, h;
  Vec r1, r2, r3, r4, r5;
  void at(double t, Vec& out) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    out.resize(r1.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
      out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
  }
};

struct EventFn {
  enum Kind { ExitTop, ExitBottom, Watch } kind;
  double height;
  double eval(const Vec& y) const {
    switch (kind) {
      case ExitTop: return y[2] - height;
      case ExitBottom: return -y[2] - height;
      default: return y[2] - height;
    }
  }
};

double locate(const EventFn& ev, const Dense& d, double ta, double tb, double ga, double tol) {
  Vec y;
  while (tb - ta > tol) {
    const double tm = 0.5 * (ta + tb);
    d.at(tm, y);
    const double gm = ev.eval(y);
    if ((ga < 0.0) == (gm < 0.0)) {
      ta = tm;
      ga = gm;
    } else {
      tb = tm;
    }
  }
  return tb;
}

double err_norm(const Vec& y0, const Vec& y1, const Vec& err, double tol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    const double sc = tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = err[i] / sc;
    acc += e * e;
  }
  return std::sqrt(acc / double(y0.size()));
}

struct RawSample {
  double s;
  Vec y;
};

struct RawRun {
  std::vector<RawSample> samples;
  std::vector<std::pair<double, RayEventKind>> events;
  std::vector<std::pair<RawSample, double>> crossings;  // sample, height
  int accepted = 0, rejected = 0;
  double max_err = 0.0;
  Vec final_y;
};

RawRun run(const RaySystem& sys, const Vec& y0in, const RayOptions& opt) {
  const int n = sys.dim();
  RawRun out;
  Vec y = y0in, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y1(n), err(n);
  std::vector<EventFn> evs;
  evs.push_back({EventFn::ExitTop, opt.exit_height});
  evs.push_back({EventFn::ExitBottom, opt.exit_height});
  std::vector<double> planes;
  for (double h : opt.watch_heights) {
    planes.push_back(h);
    planes.push_back(-h);
  }
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
  for (double h : planes) evs.push_back({EventFn::Watch, h});
  const double xi0 = std::sqrt(y[3] * y[3] + y[4] * y[4] + y[5] * y[5]);
  const double T = opt.t_max;
  double s = 0.0;
  out.samples.push_back({0.0, y});
  double next_out = opt.output_dt;

  // immediate exit when the start lies beyond an exit plane moving outward
  sys(y.data(), k1.data());
  if ((y[2] > opt.exit_height && k1[2] > 0) || (-y[2] > opt.exit_height && k1[2] < 0)) {
    out.events.push_back({0.0, y[2] > 0 ? RayEventKind::SlabExitTop : RayEventKind::SlabExitBottom});
    out.final_y = y;
    return out;
  }

  auto scaled = [&](const Vec& v, const Vec& ref) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = v[i] / (opt.tol + opt.tol * std::abs(ref[i]));
      acc += e * e;
    }
    return std::sqrt(acc / n);
  };
  double h = opt.h0;
  if (h <= 0.0) {
    const double dn0 = scaled(y, y), dn1 = scaled(k1, y);
    double hh = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    hh = std::min(hh, T);
    for (int i = 0; i < n; ++i) yt[i] = y[i] + hh * k1[i];
    sys(yt.data(), k2.data());
    for (int i = 0; i < n; ++i) err[i] = k2[i] - k1[i];
    const double dn2 = scaled(err, y) / hh;
    const double m = std::max(dn1, dn2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, hh * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min(100.0 * hh, h1);
  }
  double facold = 1e-4;
  bool done = false;
  int steps = 0;
  while (!done) {
    if (++steps > opt.max_steps) throw std::runtime_error("ray integration exceeded max_steps");
    bool last = false;
    if (s + h >= T) {
      h = T - s;
      last = true;
    }
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
    sys(yt.data(), k2.data());
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    sys(yt.data(), k3.data());
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    sys(yt.data(), k4.data());
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    sys(yt.data(), k5.data());
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    sys(yt.data(), k6.data());
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    sys(y1.data(), k7.data());
    for (int i = 0; i < n; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double en = err_norm(y, y1, err, opt.tol);
    const double fac11 = std::pow(std::max(en, 1e-300), 0.17);
    if (!(en <= 1.0)) {
      ++out.rejected;
      if (!std::isfinite(en)) {
        h *= 0.1;
      } else {
        h /= std::min(5.0, fac11 / 0.9);
      }
      if (h < 1e-14 * std::max(1.0, s)) throw std::runtime_error("ray step size underflow");
      continue;
    }
    ++out.accepted;
    out.max_err = std::max(out.max_err, en * opt.tol);
    Dense d;
    d.t0 = s;
    d.h = h;
    d.r1 = y;
    d.r2.resize(n);
    d.r3.resize(n);
    d.r4.resize(n);
    d.r5.resize(n);
    for (int i = 0; i < n; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      d.r2[i] = ydiff;
      d.r3[i] = bspl;
      d.r4[i] = ydiff - h * k7[i] - bspl;
      d.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    const double s1 = s + h;

    // events inside (s, s1]
    double t_stop = std::numeric_limits<double>::infinity();
    RayEventKind stop_kind = RayEventKind::TimeLimit;
    std::vector<std::pair<double, double>> hits;  // time, height
    for (const auto& ev : evs) {
      const double ga = ev.eval(y), gb = ev.eval(y1);
      if (ev.kind == EventFn::Watch) {
        if ((ga < 0.0) != (gb < 0.0)) hits.push_back({locate(ev, d, s, s1, ga, opt.event_tol), ev.height});
      } else if (ga < 0.0 && gb >= 0.0) {
        const double te = locate(ev, d, s, s1, ga, opt.event_tol);
        if (te < t_stop) {
          t_stop = te;
          stop_kind = ev.kind == EventFn::ExitTop ? RayEventKind::SlabExitTop : RayEventKind::SlabExitBottom;
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    for (const auto& [th, hh] : hits) {
      if (th > t_stop) break;
      RawSample rs{th, {}};
      d.at(th, rs.y);
      out.crossings.push_back({rs, hh});
    }
    const double s_end = std::min(s1, t_stop);
    if (opt.output_dt > 0.0) {
      while (next_out <= s_end + 1e-12 * std::max(1.0, s_end)) {
        RawSample rs{next_out, {}};
        d.at(std::min(next_out, s1), rs.y);
        out.samples.push_back(rs);
        next_out = opt.output_dt * double(out.samples.size());
      }
    }
    if (std::isfinite(t_stop)) {
      RawSample rs{t_stop, {}};
      d.at(t_stop, rs.y);
      if (opt.output_dt <= 0.0 && t_stop > out.samples.back().s) out.samples.push_back(rs);
      out.events.push_back({t_stop, stop_kind});
      out.final_y = rs.y;
      return out;
    }
    s = s1;
    y.swap(y1);
    k1.swap(k7);
    if (opt.output_dt <= 0.0) out.samples.push_back({s, y});
    const double xin = std::sqrt(y[3] * y[3] + y[4] * y[4] + y[5] * y[5]);
    if (!(xin >= 1e-8 * xi0 && xin <= 1e8 * xi0)) {
      out.events.push_back({s, RayEventKind::FrequencyBlowup});
      done = true;
      break;
    }
    if (last) {
      out.events.push_back({s, RayEventKind::TimeLimit});
      done = true;
      break;
    }
    double fac = fac11 / std::pow(facold, 0.04);
    fac = std::max(0.2, std::min(10.0, fac / 0.9));
    h = h / fac;
    facold = std::max(en, 1e-4);
  }
  out.final_y = y;
  return out;
}

RayTrajectory to_trajectory(const RawRun& raw, int sign, bool backward, int nq) {
  RayTrajectory tr;
  tr.sign = sign;
  tr.accepted = raw.accepted;
  tr.rejected = raw.rejected;
  tr.max_local_error = raw.max_err;
  const double tsg = backward ? -1.0 : 1.0;
  auto mk = [&](const RawSample& r) {
    RaySample s;
    s.t = tsg * r.s;
    s.x = {r.y[0], r.y[1], r.y[2]};
    s.xi = {r.y[3], r.y[4], r.y[5]};
    s.q.assign(r.y.begin() + 6, r.y.begin() + 6 + nq);
    return s;
  };
  for (const auto& r : raw.samples) tr.samples.push_back(mk(r));
  for (const auto& [rs, hh] : raw.crossings) {
    PlaneCrossing c;
    c.t = tsg * rs.s;
    c.height = hh;
    c.q.assign(rs.y.begin() + 6, rs.y.begin() + 6 + nq);
    tr.crossings.push_back(c);
  }
  for (const auto& [s, kind] : raw.events) {
    RayEvent e{kind, tsg * s, {}};
    const Vec& y = raw.final_y;
    e.state.x = {y[0], y[1], y[2]};
    e.state.xi = {y[3], y[4], y[5]};
    tr.events.push_back(e);
  }
  if (backward) {
    std::reverse(tr.samples.begin(), tr.samples.end());
    std::reverse(tr.crossings.begin(), tr.crossings.end());
  }
  return tr;
}

Vec initial_state(const PhasePoint& p, int nq, bool jac) {
  Vec y(6 + nq + (jac ? 36 : 0), 0.0);
  for (int a = 0; a < 3; ++a) {
    y[a] = p.x[a];
    y[3 + a] = p.xi[a];
  }
  if (jac)
    for (int i = 0; i < 6; ++i) y[6 + nq + 7 * i] = 1.0;
  return y;
}

}  // namespace

RayTrajectory integrate_ray(const FieldEvaluator& B, int sign, const PhasePoint& start, const RayOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("ray tolerance must be positive");
  if (!(norm3(start.xi) > 0.0)) throw std::invalid_argument("ray start needs xi != 0");
  const int nq = int(opt.integrands.size());
  RaySystem sys{B, sign >= 0 ? 1.0 : -1.0, opt.backward ? -1.0 : 1.0, nq, false, opt.integrands};
  const RawRun raw = run(sys, initial_state(start, nq, false), opt);
  return to_trajectory(raw, sign >= 0 ? 1 : -1, opt.backward, nq);
}

RayTrajectory integrate_ray_two_sided(const FieldEvaluator& B, int sign, const PhasePoint& start,
                                      const RayOptions& opt) {
  RayOptions fo = opt, bo = opt;
  fo.backward = false;
  bo.backward = true;
  RayTrajectory f = integrate_ray(B, sign, start, fo);
  RayTrajectory b = integrate_ray(B, sign, start, bo);
  const std::size_t nq = opt.integrands.size();
  std::vector<double> total(nq, 0.0);
  if (!b.samples.empty()) total = b.samples.front().q;
  auto back_q = [&](std::vector<double>& q) {
    for (std::size_t j = 0; j < nq; ++j) q[j] = total[j] - q[j];
  };
  auto fwd_q = [&](std::vector<double>& q) {
    for (std::size_t j = 0; j < nq; ++j) q[j] = total[j] + q[j];
  };
  RayTrajectory out;
  out.sign = f.sign;
  out.accepted = f.accepted + b.accepted;
  out.rejected = f.rejected + b.rejected;
  out.max_local_error = std::max(f.max_local_error, b.max_local_error);
  for (auto s : b.samples) {
    back_q(s.q);
    out.samples.push_back(s);
  }
  for (std::size_t i = 1; i < f.samples.size(); ++i) {
    auto s = f.samples[i];
    fwd_q(s.q);
    out.samples.push_back(s);
  }
  for (auto c : b.crossings) {
    back_q(c.q);
    out.crossings.push_back(c);
  }
  for (auto c : f.crossings) {
    fwd_q(c.q);
    out.crossings.push_back(c);
  }
  out.events = b.events;
  out.events.insert(out.events.end(), f.events.begin(), f.events.end());
  return out;
}

VariationalResult variational_flow(const FieldEvaluator& B, int sign, const PhasePoint& start, const RayOptions& opt) {
  const int nq = int(opt.integrands.size());
  RaySystem sys{B, sign >= 0 ? 1.0 : -1.0, opt.backward ? -1.0 : 1.0, nq, true, opt.integrands};
  const RawRun raw = run(sys, initial_state(start, nq, true), opt);
  VariationalResult out;
  out.ray = to_trajectory(raw, sign >= 0 ? 1 : -1, opt.backward, nq);
  for (const auto& r : raw.samples) {
    JacobianSample js;
    js.t = (opt.backward ? -1.0 : 1.0) * r.s;
    for (int i = 0; i < 6; ++i)
      for (int c = 0; c < 6; ++c) js.J[i][c] = r.y[6 + nq + 6 * i + c];
    out.jacobians.push_back(js);
  }
  if (opt.backward) std::reverse(out.jacobians.begin(), out.jacobians.end());
  return out;
}

double symplectic_defect(const std::array<std::array<double, 6>, 6>& J) {
  auto omega = [](int i, int j) {
    if (i < 3 && j == i + 3) return 1.0;
    if (i >= 3 && j == i - 3) return -1.0;
    return 0.0;
  };
  double worst = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double acc = 0.0;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) acc += J[i][a] * omega(i, j) * J[j][b];
      worst = std::max(worst, std::abs(acc - omega(a, b)));
    }
  return worst;
}

double frequency_drift_check(const RayTrajectory& traj, const FieldEvaluator& B) {
  const auto& s = traj.samples;
  if (s.size() < 5) throw std::invalid_argument("frequency drift check needs at least 5 samples");
  const double dt = s[1].t - s[0].t;
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < s.size(); ++i) {
    const double num = (norm3(s[i - 2].xi) - 8.0 * norm3(s[i - 1].xi) + 8.0 * norm3(s[i + 1].xi) -
                        norm3(s[i + 2].xi)) /
                       (12.0 * dt);
    const Mat3 D = deformation_tensor(B, s[i].x);
    double q = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) q += D[a][b] * s[i].xi[a] * s[i].xi[b];
    const double formula = -double(traj.sign) * q;
    worst = std::max(worst, std::abs(num - formula));
  }
  return worst;
}

ConeReport cone_angle(const RayTrajectory& traj, const FieldEvaluator& B) {
  ConeReport r;
  for (const auto& sm : traj.samples) {
    const FieldSample fs = B.eval(sm.x, 1);
    const auto [xd, kd] = hamiltonian_rhs(fs, traj.sign, sm.xi);
    Vec3 sb = fs.B;
    for (double& v : sb) v *= double(traj.sign);
    r.max_angle = std::max(r.max_angle, angle_between(xd, sb));
    const double sp = norm3(xd), xn = norm3(sm.xi);
    r.max_speed_ratio = std::max(r.max_speed_ratio, norm3(fs.B) * xn / sp);
    const Vec3 dev{fs.B[0], fs.B[1], fs.B[2] - 1.0};
    if (norm3(dev) < 0.5) {
      r.max_vertical_ratio = std::max(r.max_vertical_ratio, xn / (12.0 * std::abs(xd[2])));
      r.max_horizontal_ratio = std::max(r.max_horizontal_ratio, 2.0 * std::max(std::abs(xd[0]), std::abs(xd[1])) / xn);
    } else {
      r.near_uniform = false;
    }
  }
  return r;
}

double hamiltonian_drift(const RayTrajectory& traj, const FieldEvaluator& B) {
  if (traj.samples.empty()) return 0.0;
  const auto& s0 = traj.samples.front();
  const double p0 = principal_symbol(B.B(s0.x), s0.xi);
  double scale = std::max(std::abs(p0), 1e-300);
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double p = principal_symbol(B.B(s.x), s.xi);
    scale = std::max(scale, norm3(B.B(s.x)) * dot3(s.xi, s.xi));
    worst = std::max(worst, std::abs(p - p0));
  }
  return worst / scale;
}

std::string trajectory_csv(const RayTrajectory& traj, const FieldEvaluator& B) {
  std::ostringstream os;
  os << "t,x1,x2,x3,xi1,xi2,xi3,abs_xi,p,event\n";
  char buf[512];
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    std::string flag;
    for (const auto& e : traj.events)
      if (e.t == s.t) flag = to_string(e.kind);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", s.t, s.x[0], s.x[1],
                  s.x[2], s.xi[0], s.xi[1], s.xi[2], norm3(s.xi), principal_symbol(B.B(s.x), s.xi));
    os << buf << flag << "\n";
  }
  return os.str();
}

std::vector<Vec3> sphere_directions(int count) {
  std::vector<Vec3> out;
  if (count <= 0) return out;
  out.reserve(count);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * i;
    out.push_back({r * std::cos(th), r * std::sin(th), z});
  }
  return out;
}

}  // namespace emhd
