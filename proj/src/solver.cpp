#include "emhd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emhd {

namespace {

const cplx I(0.0, 1.0);

template <class F>
void each_mode(const Grid3& g, F&& f) {
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    const double k1 = g.k_eff(i);
    for (int j = 0; j < n; ++j) {
      const double k2 = g.k_eff(j);
      for (int l = 0; l < n; ++l) f(g.index(i, j, l), Vec3{k1, k2, g.k_eff(l)});
    }
  }
}

RealScalarField to_real(const Grid3& g, const std::vector<cplx>& spec) {
  std::vector<cplx> tmp(g.size());
  fft_raw(3, g.n, spec.data(), tmp.data(), false);
  RealScalarField out(g);
  for (std::size_t i = 0; i < tmp.size(); ++i) out.v[i] = tmp[i].real();
  return out;
}

std::vector<cplx> derivative(const Grid3& g, const std::vector<cplx>& f, int axis) {
  std::vector<cplx> out(f.size());
  each_mode(g, [&](std::size_t idx, const Vec3& k) { out[idx] = I * k[axis] * f[idx]; });
  return out;
}

SpectralVectorField to_spectral_dealiased(const RealVectorField& f) {
  SpectralVectorField out = fft_forward(f);
  dealias(out);
  return out;
}

SpectralVectorField product_cross(const SpectralVectorField& a, const SpectralVectorField& b) {
  return to_spectral_dealiased(cross(fft_inverse(a), fft_inverse(b)));
}

SpectralVectorField negate(SpectralVectorField f) {
  f *= -1.0;
  return f;
}

double energy_of(const SpectralVectorField& f) {
  const double n = l2_norm(f);
  return 0.5 * n * n;
}

SpectralVectorField without_mean(SpectralVectorField f) {
  for (int a = 0; a < 3; ++a) f.c[a][0] = 0.0;
  return f;
}

double h1_norm(const SpectralVectorField& f) { return hs_norm(f, 1.0); }

}  // namespace

// ---------------------------------------------------------------- right-hand sides

SpectralVectorField rhs_nonlinear(const SpectralVectorField& B) {
  SpectralVectorField e = product_cross(curl(B), B);
  return leray_project(negate(curl(e)));
}

SpectralVectorField rhs_linearized(const SpectralVectorField& background, const SpectralVectorField& b) {
  const RealVectorField Bp = fft_inverse(background);
  const RealVectorField bp = fft_inverse(b);
  RealVectorField e = cross(fft_inverse(curl(b)), Bp);
  const RealVectorField e2 = cross(fft_inverse(curl(background)), bp);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < e.c[a].size(); ++i) e.c[a][i] += e2.c[a][i];
  return leray_project(negate(curl(to_spectral_dealiased(e))));
}

SpectralVectorField rhs_linearized_uniform(const Vec3& B0, const SpectralVectorField& b) {
  SpectralVectorField out(b.grid, b.real);
  each_mode(b.grid, [&](std::size_t idx, const Vec3& k) {
    const cplx u0 = b.c[0][idx], u1 = b.c[1][idx], u2 = b.c[2][idx];
    const cplx j0 = I * (k[1] * u2 - k[2] * u1);
    const cplx j1 = I * (k[2] * u0 - k[0] * u2);
    const cplx j2 = I * (k[0] * u1 - k[1] * u0);
    const cplx e0 = j1 * B0[2] - j2 * B0[1];
    const cplx e1 = j2 * B0[0] - j0 * B0[2];
    const cplx e2 = j0 * B0[1] - j1 * B0[0];
    out.c[0][idx] = -I * (k[1] * e2 - k[2] * e1);
    out.c[1][idx] = -I * (k[2] * e0 - k[0] * e2);
    out.c[2][idx] = -I * (k[0] * e1 - k[1] * e0);
  });
  dealias(out);
  return out;
}

SpectralVectorField whistler_projection(const SpectralVectorField& u, int sign) {
  SpectralVectorField out(u.grid, u.real);
  const double s = sign >= 0 ? 1.0 : -1.0;
  each_mode(u.grid, [&](std::size_t idx, const Vec3& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const cplx a = u.c[0][idx], b = u.c[1][idx], c = u.c[2][idx];
    if (k2 == 0.0) {
      out.c[0][idx] = 0.5 * a;
      out.c[1][idx] = 0.5 * b;
      out.c[2][idx] = 0.5 * c;
      return;
    }
    const double kn = std::sqrt(k2);
    const cplx kd = (k[0] * a + k[1] * b + k[2] * c) / k2;
    const cplx x0 = (k[1] * c - k[2] * b) / kn;
    const cplx x1 = (k[2] * a - k[0] * c) / kn;
    const cplx x2 = (k[0] * b - k[1] * a) / kn;
    out.c[0][idx] = 0.5 * (a - k[0] * kd + s * I * x0);
    out.c[1][idx] = 0.5 * (b - k[1] * kd + s * I * x1);
    out.c[2][idx] = 0.5 * (c - k[2] * kd + s * I * x2);
  });
  return out;
}

// ---------------------------------------------------------------- diagonalized system

DiagonalSystem::DiagonalSystem(const SpectralVectorField& background, double transport_sign)
    : g_(background.grid), transport_sign_(transport_sign) {
  B_ = fft_inverse(background);
  const SpectralVectorField W = curl(background);
  W_ = fft_inverse(W);
  dBf_.reserve(9);
  dWf_.reserve(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      dBf_.push_back(to_real(g_, derivative(g_, background.c[b], a)));
      dWf_.push_back(to_real(g_, derivative(g_, W.c[b], a)));
    }
}

SpectralVectorField DiagonalSystem::directional(const RealVectorField& v, const SpectralVectorField& u) const {
  RealVectorField out(g_);
  const std::size_t N = g_.size();
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a) {
      const RealScalarField d = to_real(g_, derivative(g_, u.c[c], a));
      for (std::size_t i = 0; i < N; ++i) out.c[c][i] += v.c[a][i] * d.v[i];
    }
  return to_spectral_dealiased(out);
}

SpectralVectorField DiagonalSystem::matrix_product(const std::vector<RealScalarField>& m, bool transpose,
                                                   const SpectralVectorField& u) const {
  const RealVectorField up = fft_inverse(u);
  RealVectorField out(g_);
  const std::size_t N = g_.size();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const RealScalarField& e = transpose ? m[3 * b + a] : m[3 * a + b];
      for (std::size_t i = 0; i < N; ++i) out.c[a][i] += e.v[i] * up.c[b][i];
    }
  return to_spectral_dealiased(out);
}

SpectralVectorField DiagonalSystem::principal(const SpectralVectorField& u) const {
  SpectralVectorField out = directional(B_, abs_d_pow(u, 1.0));
  out += abs_d_pow(directional(B_, u), 1.0);
  out *= 0.5;
  return out;
}

SpectralVectorField DiagonalSystem::symmetric(const SpectralVectorField& u) const {
  const SpectralVectorField du = abs_d_pow(u, 1.0);
  SpectralVectorField out = abs_d_pow(matrix_product(dBf_, false, u), 1.0);
  out += matrix_product(dBf_, true, du);
  out += abs_d_pow(directional(B_, u), 1.0);
  out -= directional(B_, du);
  out *= 0.5;
  return out;
}

SpectralVectorField DiagonalSystem::antisymmetric(const SpectralVectorField& u) const {
  SpectralVectorField out = abs_d_pow(matrix_product(dBf_, false, u), 1.0);
  out -= matrix_product(dBf_, true, abs_d_pow(u, 1.0));
  out *= 0.5;
  return out;
}

SpectralVectorField DiagonalSystem::gradient_part(const SpectralVectorField& u) const {
  const SpectralVectorField z = matrix_product(dBf_, false, u) + matrix_product(dBf_, true, u);
  SpectralVectorField out(g_, u.real);
  each_mode(g_, [&](std::size_t idx, const Vec3& k) {
    const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    if (kn == 0.0) return;
    const cplx c = 0.5 * I * (k[0] * z.c[0][idx] + k[1] * z.c[1][idx] + k[2] * z.c[2][idx]) / kn;
    for (int a = 0; a < 3; ++a) out.c[a][idx] = I * k[a] * c;
  });
  return out;
}

SpectralVectorField DiagonalSystem::transport(const SpectralVectorField& u) const { return directional(W_, u); }

SpectralVectorField DiagonalSystem::remainder(int sign, const SpectralVectorField& u) const {
  SpectralVectorField out = whistler_projection(transport(u), sign);
  out -= transport(whistler_projection(u, sign));
  out -= whistler_projection(matrix_product(dWf_, true, u), sign);
  return out;
}

SpectralVectorField DiagonalSystem::apply(int sign, const SpectralVectorField& bp, const SpectralVectorField& bm) const {
  const SpectralVectorField& own = sign >= 0 ? bp : bm;
  const SpectralVectorField& other = sign >= 0 ? bm : bp;
  const SpectralVectorField sum = bp + bm;
  SpectralVectorField out = principal(own);
  out += symmetric(other);
  out += antisymmetric(own);
  out += gradient_part(sum);
  if (sign < 0) out *= -1.0;
  SpectralVectorField lower = transport(own);
  lower += remainder(sign, sum);
  axpy(out, transport_sign_, lower);
  return out;
}

double diag_residual(const SpectralVectorField& background, const SpectralVectorField& b, double transport_sign) {
  const DiagonalSystem sys(background, transport_sign);
  const SpectralVectorField Lb = negate(rhs_linearized(background, b));
  const SpectralVectorField bp = whistler_projection(b, 1);
  const SpectralVectorField bm = whistler_projection(b, -1);
  double acc = 0.0;
  for (int sign : {1, -1}) {
    const double r = l2_norm(whistler_projection(Lb, sign) - sys.apply(sign, bp, bm));
    acc += r * r;
  }
  const double h2 = hs_norm(b, 2.0);
  return h2 > 0.0 ? std::sqrt(acc) / h2 : std::sqrt(acc);
}

SpectralVectorField propagate_constant(const SpectralVectorField& b0, double t) {
  SpectralVectorField out(b0.grid, b0.real);
  each_mode(b0.grid, [&](std::size_t idx, const Vec3& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const cplx a = b0.c[0][idx], b = b0.c[1][idx], c = b0.c[2][idx];
    if (k2 == 0.0) {
      out.c[0][idx] = a;
      out.c[1][idx] = b;
      out.c[2][idx] = c;
      return;
    }
    const double kn = std::sqrt(k2);
    const double p = k[2] * kn;
    const cplx kd = (k[0] * a + k[1] * b + k[2] * c) / k2;
    const cplx rest[3] = {a - k[0] * kd, b - k[1] * kd, c - k[2] * kd};
    const cplx x[3] = {(k[1] * c - k[2] * b) / kn, (k[2] * a - k[0] * c) / kn, (k[0] * b - k[1] * a) / kn};
    const cplx ep = std::exp(-I * p * t), em = std::exp(I * p * t);
    for (int d = 0; d < 3; ++d) {
      const cplx plus = 0.5 * (rest[d] + I * x[d]);
      const cplx minus = 0.5 * (rest[d] - I * x[d]);
      out.c[d][idx] = ep * plus + em * minus + k[d] * kd;
    }
  });
  return out;
}

// ---------------------------------------------------------------- time stepping

std::string to_string(SolverMode m) {
  switch (m) {
    case SolverMode::Nonlinear: return "nonlinear";
    case SolverMode::Linearized: return "linearized";
    case SolverMode::Diagonalized: return "diagonalized";
    case SolverMode::Constant: return "constant";
  }
  return "nonlinear";
}

SolverMode solver_mode_from_string(const std::string& s) {
  if (s == "nonlinear") return SolverMode::Nonlinear;
  if (s == "linearized") return SolverMode::Linearized;
  if (s == "diagonalized") return SolverMode::Diagonalized;
  if (s == "constant") return SolverMode::Constant;
  throw std::invalid_argument("unknown solver mode: " + s);
}

SpectralVectorField SolverState::field() const {
  if (mode == SolverMode::Diagonalized) return bp + bm;
  return u;
}

SolverState make_state(SolverMode mode, const SpectralVectorField& u0) {
  SpectralVectorField e3(u0.grid);
  add_constant(e3, {0.0, 0.0, 1.0});
  SolverState s = make_state(mode, u0, e3);
  s.background_e3 = true;
  return s;
}

SolverState make_state(SolverMode mode, const SpectralVectorField& u0, const SpectralVectorField& background) {
  if (u0.grid != background.grid) throw std::invalid_argument("background and data grids differ");
  SolverState s;
  s.mode = mode;
  s.background = background;
  s.background_e3 = false;
  if (mode == SolverMode::Diagonalized) {
    s.bp = whistler_projection(u0, 1);
    s.bm = whistler_projection(u0, -1);
    s.system = std::make_shared<DiagonalSystem>(background);
  } else {
    s.u = u0;
  }
  if (mode == SolverMode::Constant) {
    const Vec3 m = mean(background);
    if (std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2] - 1.0) > 1e-14 ||
        l2_norm(without_mean(background)) > 1e-14)
      throw std::invalid_argument("constant mode requires the background e3");
  }
  s.history.push_back(measure(s));
  return s;
}

double dealiased_kmax(const Grid3& g) { return std::sqrt(3.0) * (g.n / 3) / g.lambda; }

double cfl_bound(const SolverState& s) {
  const SpectralVectorField& B = s.mode == SolverMode::Nonlinear ? s.u : s.background;
  const RealVectorField Bp = fft_inverse(B);
  double bmax = 0.0;
  for (std::size_t i = 0; i < Bp.c[0].size(); ++i)
    bmax = std::max(bmax, std::sqrt(Bp.c[0][i] * Bp.c[0][i] + Bp.c[1][i] * Bp.c[1][i] + Bp.c[2][i] * Bp.c[2][i]));
  const double k = dealiased_kmax(B.grid);
  if (bmax == 0.0 || k == 0.0) return std::numeric_limits<double>::infinity();
  return kCflConstant / (bmax * k * k);
}

Diagnostic measure(const SolverState& s) {
  const SpectralVectorField f = s.field();
  Diagnostic d;
  d.t = s.t;
  d.energy = energy_of(f);
  d.fluct_energy = energy_of(without_mean(f));
  d.max_divergence = max_abs_divergence(f);
  d.l2 = l2_norm(f);
  d.h1 = h1_norm(f);
  return d;
}

namespace {

struct Pair {
  SpectralVectorField a, b;
};

Pair evaluate(const SolverState& s, const Pair& x) {
  switch (s.mode) {
    case SolverMode::Nonlinear: return {rhs_nonlinear(x.a), {}};
    case SolverMode::Linearized: return {rhs_linearized(s.background, x.a), {}};
    case SolverMode::Diagonalized:
      return {leray_project(negate(s.system->apply(1, x.a, x.b))),
              leray_project(negate(s.system->apply(-1, x.a, x.b)))};
    case SolverMode::Constant: break;
  }
  throw std::logic_error("no right-hand side in constant mode");
}

Pair combine(const Pair& x, double h, const Pair& k, bool two) {
  Pair out = x;
  axpy(out.a, h, k.a);
  out.a = leray_project(out.a);
  if (two) {
    axpy(out.b, h, k.b);
    out.b = leray_project(out.b);
  }
  return out;
}

}  // namespace

void step(SolverState& s, double dt) {
  const double e0 = energy_of(s.field());
  if (s.mode == SolverMode::Constant) {
    s.u = propagate_constant(s.u, dt);
  } else {
    const bool two = s.mode == SolverMode::Diagonalized;
    const Pair x = two ? Pair{s.bp, s.bm} : Pair{s.u, {}};
    const Pair k1 = evaluate(s, x);
    const Pair k2 = evaluate(s, combine(x, 0.5 * dt, k1, two));
    const Pair k3 = evaluate(s, combine(x, 0.5 * dt, k2, two));
    const Pair k4 = evaluate(s, combine(x, dt, k3, two));
    Pair y = x;
    axpy(y.a, dt / 6.0, k1.a);
    axpy(y.a, dt / 3.0, k2.a);
    axpy(y.a, dt / 3.0, k3.a);
    axpy(y.a, dt / 6.0, k4.a);
    y.a = leray_project(y.a);
    if (two) {
      axpy(y.b, dt / 6.0, k1.b);
      axpy(y.b, dt / 3.0, k2.b);
      axpy(y.b, dt / 3.0, k3.b);
      axpy(y.b, dt / 6.0, k4.b);
      s.bp = std::move(y.a);
      s.bm = leray_project(y.b);
    } else {
      s.u = std::move(y.a);
    }
  }
  s.t += dt;
  const double e1 = energy_of(s.field());
  if (!std::isfinite(e1) || (e0 > 0.0 && e1 > 1.1 * e0)) s.blown_up = true;
}

SolveResult solve(SolverState& s, const SolveOptions& opt) {
  SolveResult r;
  const double cfl = cfl_bound(s);
  double dt = opt.dt > 0.0 ? opt.dt : 0.5 * cfl;
  if (!std::isfinite(dt)) dt = opt.T;
  r.steps = std::max(1, int(std::ceil(opt.T / dt - 1e-12)));
  r.dt = opt.T / r.steps;
  r.cfl_ok = s.mode == SolverMode::Constant || r.dt <= cfl;
  if (!r.cfl_ok && opt.enforce_cfl) throw std::invalid_argument("time step exceeds the CFL bound");
  const double t0 = s.t;
  for (int i = 0; i < r.steps; ++i) {
    step(s, r.dt);
    s.t = t0 + (i + 1) * r.dt;
    if (opt.diag_every > 0 && ((i + 1) % opt.diag_every == 0 || i + 1 == r.steps)) {
      s.history.push_back(measure(s));
      if (s.history.size() > s.history_limit) s.history.erase(s.history.begin());
    }
    if (s.blown_up) break;
  }
  return r;
}

// ---------------------------------------------------------------- 2.5-dimensional reduction

double TwoPointFiveDState::coord(int i) const {
  const double L = 2.0 * M_PI * lambda;
  return -0.5 * L + i * L / n;
}

double TwoPointFiveDState::k_eff(int i) const {
  if (i == n / 2) return 0.0;
  return (i < n / 2 ? i : i - n) / lambda;
}

namespace {

std::vector<cplx> fft2(int n, const std::vector<double>& f) {
  std::vector<cplx> out(f.begin(), f.end());
  fft_raw(2, n, out.data(), out.data(), true);
  return out;
}

std::vector<double> ifft2(int n, const std::vector<cplx>& f) {
  std::vector<cplx> tmp(f.size());
  fft_raw(2, n, f.data(), tmp.data(), false);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = tmp[i].real();
  return out;
}

std::vector<cplx> d2(const TwoPointFiveDState& s, const std::vector<cplx>& f, int axis) {
  std::vector<cplx> out(f.size());
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) {
      const double k = axis == 0 ? s.k_eff(i) : s.k_eff(j);
      out[std::size_t(i) * s.n + j] = I * k * f[std::size_t(i) * s.n + j];
    }
  return out;
}

std::vector<cplx> laplace2(const TwoPointFiveDState& s, const std::vector<cplx>& f) {
  std::vector<cplx> out(f.size());
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) {
      const double a = s.k_eff(i), b = s.k_eff(j);
      out[std::size_t(i) * s.n + j] = -(a * a + b * b) * f[std::size_t(i) * s.n + j];
    }
  return out;
}

void dealias2(int n, std::vector<cplx>& f) {
  const int cut = n / 3;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int mi = i < n / 2 ? i : i - n, mj = j < n / 2 ? j : j - n;
      if (std::abs(mi) > cut || std::abs(mj) > cut) f[std::size_t(i) * n + j] = 0.0;
    }
}

/// grad_perp f . grad g = -d2 f d1 g + d1 f d2 g
std::vector<cplx> bracket(const TwoPointFiveDState& s, const std::vector<cplx>& f, const std::vector<cplx>& g) {
  const auto f1 = ifft2(s.n, d2(s, f, 0)), f2 = ifft2(s.n, d2(s, f, 1));
  const auto g1 = ifft2(s.n, d2(s, g, 0)), g2 = ifft2(s.n, d2(s, g, 1));
  std::vector<double> out(f1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -f2[i] * g1[i] + f1[i] * g2[i];
  auto spec = fft2(s.n, out);
  dealias2(s.n, spec);
  return spec;
}

struct Pair2 {
  std::vector<cplx> psi, phi;
};

Pair2 rhs_2p5d(const TwoPointFiveDState& s, const Pair2& x) {
  Pair2 out;
  out.psi = bracket(s, x.phi, x.psi);
  out.phi = bracket(s, x.psi, laplace2(s, x.psi));
  for (auto& v : out.psi) v = -v;
  for (auto& v : out.phi) v = -v;
  return out;
}

Pair2 shift(const Pair2& x, double h, const Pair2& k) {
  Pair2 out = x;
  for (std::size_t i = 0; i < out.psi.size(); ++i) {
    out.psi[i] += h * k.psi[i];
    out.phi[i] += h * k.phi[i];
  }
  return out;
}

}  // namespace

TwoPointFiveDState make_2p5d(int n, double lambda, const std::function<double(double, double)>& psi,
                              const std::function<double(double, double)>& phi) {
  TwoPointFiveDState s;
  s.n = n;
  s.lambda = lambda;
  std::vector<double> a(std::size_t(n) * n), b(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a[std::size_t(i) * n + j] = psi(s.coord(i), s.coord(j));
      b[std::size_t(i) * n + j] = phi(s.coord(i), s.coord(j));
    }
  s.psi = fft2(n, a);
  s.phi = fft2(n, b);
  return s;
}

void step_2p5d(TwoPointFiveDState& s, double dt) {
  const Pair2 x{s.psi, s.phi};
  const Pair2 k1 = rhs_2p5d(s, x);
  const Pair2 k2 = rhs_2p5d(s, shift(x, 0.5 * dt, k1));
  const Pair2 k3 = rhs_2p5d(s, shift(x, 0.5 * dt, k2));
  const Pair2 k4 = rhs_2p5d(s, shift(x, dt, k3));
  for (std::size_t i = 0; i < s.psi.size(); ++i) {
    s.psi[i] += dt / 6.0 * (k1.psi[i] + 2.0 * k2.psi[i] + 2.0 * k3.psi[i] + k4.psi[i]);
    s.phi[i] += dt / 6.0 * (k1.phi[i] + 2.0 * k2.phi[i] + 2.0 * k3.phi[i] + k4.phi[i]);
  }
  s.t += dt;
}

void solve_2p5d(TwoPointFiveDState& s, double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const int steps = std::max(1, int(std::ceil(T / dt - 1e-12)));
  const double h = T / steps;
  const double t0 = s.t;
  for (int i = 0; i < steps; ++i) {
    step_2p5d(s, h);
    s.t = t0 + (i + 1) * h;
  }
}

std::vector<double> physical_2p5d(const TwoPointFiveDState& s, const std::vector<cplx>& spec) {
  return ifft2(s.n, spec);
}

double integral_2p5d(const TwoPointFiveDState& s, const std::vector<cplx>& spec) {
  const double L = 2.0 * M_PI * s.lambda;
  return spec[0].real() / s.n * L * L;
}

SpectralVectorField lift_2p5d(const TwoPointFiveDState& s) {
  const Grid3 g(s.n, s.lambda);
  SpectralVectorField out(g);
  const double r = std::sqrt(double(s.n));
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) {
      const std::size_t q = std::size_t(i) * s.n + j;
      const std::size_t idx = g.index(i, j, 0);
      out.c[0][idx] = r * I * s.k_eff(j) * s.psi[q];
      out.c[1][idx] = -r * I * s.k_eff(i) * s.psi[q];
      out.c[2][idx] = r * s.phi[q];
    }
  return out;
}

TwoPointFiveDState reduce_2p5d(const SpectralVectorField& B) {
  const Grid3& g = B.grid;
  double scale = 0.0, off = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int l = 0; l < g.n; ++l) {
          const double v = std::abs(B.c[a][g.index(i, j, l)]);
          scale = std::max(scale, v);
          if (l != 0) off = std::max(off, v);
        }
  if (off > 1e-12 * scale) throw std::invalid_argument("field depends on x3");
  TwoPointFiveDState s;
  s.n = g.n;
  s.lambda = g.lambda;
  s.psi.assign(std::size_t(g.n) * g.n, 0.0);
  s.phi.assign(std::size_t(g.n) * g.n, 0.0);
  const double r = std::sqrt(double(g.n));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const std::size_t q = std::size_t(i) * g.n + j;
      const std::size_t idx = g.index(i, j, 0);
      const double k1 = s.k_eff(i), k2 = s.k_eff(j), kk = k1 * k1 + k2 * k2;
      s.phi[q] = B.c[2][idx] / r;
      if (kk == 0.0) {
        if (std::abs(B.c[0][idx]) + std::abs(B.c[1][idx]) > 1e-12 * scale)
          throw std::invalid_argument("transverse mean cannot be written as curl(psi e3)");
        continue;
      }
      s.psi[q] = (k2 * B.c[0][idx] - k1 * B.c[1][idx]) / (I * kk * r);
    }
  return s;
}

}  // namespace emhd
