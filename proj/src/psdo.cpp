#include "emhd/psdo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "emhd/cutoffs.hpp"
#include "emhd/dyadic.hpp"

namespace emhd {

namespace {
double knorm(const Vec3& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }
}  // namespace

// ---------------------------------------------------------------- lattice

Lattice::Lattice(int dims_, int n_, double lambda_) : dims(dims_), n(n_), lambda(lambda_) {
  if (dims != 1 && dims != 3) throw std::invalid_argument("lattice dimension must be 1 or 3");
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("lattice size must be a power of two >= 8");
  if (!(lambda > 0.0)) throw std::invalid_argument("lattice scale must be positive");
}

std::size_t Lattice::size() const { return dims == 1 ? std::size_t(n) : std::size_t(n) * n * n; }

double Lattice::box_length() const { return 2.0 * M_PI * lambda; }

namespace {
void split(const Lattice& L, std::size_t idx, int out[3]) {
  if (L.dims == 1) {
    out[0] = int(idx);
    out[1] = out[2] = -1;
    return;
  }
  out[0] = int(idx / (std::size_t(L.n) * L.n));
  out[1] = int((idx / L.n) % L.n);
  out[2] = int(idx % L.n);
}
int mode_of(int i, int n) { return i < n / 2 ? i : i - n; }
}  // namespace

Vec3 Lattice::point(std::size_t idx) const {
  int ii[3];
  split(*this, idx, ii);
  Vec3 x{0, 0, 0};
  for (int a = 0; a < dims; ++a) x[a] = -0.5 * box_length() + ii[a] * spacing();
  return x;
}

Vec3 Lattice::wave(std::size_t idx) const {
  int ii[3];
  split(*this, idx, ii);
  Vec3 k{0, 0, 0};
  for (int a = 0; a < dims; ++a) k[a] = ii[a] == n / 2 ? 0.0 : mode_of(ii[a], n) / lambda;
  return k;
}

Vec3 Lattice::wave_phase(std::size_t idx) const {
  int ii[3];
  split(*this, idx, ii);
  Vec3 k{0, 0, 0};
  for (int a = 0; a < dims; ++a) k[a] = mode_of(ii[a], n) / lambda;
  return k;
}

CField lattice_fft(const Lattice& L, const CField& u, bool forward) {
  if (u.size() != L.size()) throw std::invalid_argument("field size does not match lattice");
  CField out(u.size());
  fft_raw(L.dims, L.n, u.data(), out.data(), forward);
  return out;
}

CField apply_fourier_multiplier(const Lattice& L, const CField& u, const std::function<cplx(const Vec3&)>& m) {
  CField F = lattice_fft(L, u, true);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= m(L.wave(i));
  return lattice_fft(L, F, false);
}

CField sample_lattice(const Lattice& L, const std::function<cplx(const Vec3&)>& f) {
  CField u(L.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(L.point(i));
  return u;
}

double lattice_norm(const CField& u) {
  double acc = 0.0;
  for (const auto& z : u) acc += std::norm(z);
  return std::sqrt(acc);
}

cplx lattice_inner(const CField& a, const CField& b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

CField lattice_shell(const Lattice& L, const CField& u, int k) {
  return apply_fourier_multiplier(L, u, [k](const Vec3& xi) { return cplx(phi_k(k, knorm(xi)), 0.0); });
}

CField lattice_above(const Lattice& L, const CField& u, int k) {
  return apply_fourier_multiplier(L, u, [k](const Vec3& xi) { return cplx(1.0 - phi_below(k + 1, knorm(xi)), 0.0); });
}

// ---------------------------------------------------------------- symbols

SymbolFn SymbolFn::multiplier(MultFn m, double order, std::string label) {
  return separable({SeparableTerm{[](const Vec3&) { return cplx(1.0, 0.0); }, std::move(m)}}, order, std::move(label));
}

SymbolFn SymbolFn::coefficient(CoefFn c, std::string label) {
  return separable({SeparableTerm{std::move(c), [](const Vec3&) { return cplx(1.0, 0.0); }}}, 0.0, std::move(label));
}

SymbolFn SymbolFn::separable(std::vector<SeparableTerm> terms, double order, std::string label) {
  SymbolFn s;
  s.terms = std::move(terms);
  s.order = order;
  s.label = std::move(label);
  auto t = s.terms;
  s.eval = [t](const Vec3& x, const Vec3& xi) {
    cplx acc = 0.0;
    for (const auto& term : t) acc += term.c(x) * term.m(xi);
    return acc;
  };
  return s;
}

SymbolFn SymbolFn::general(std::function<cplx(const Vec3&, const Vec3&)> f, double order, std::string label) {
  SymbolFn s;
  s.eval = std::move(f);
  s.order = order;
  s.label = std::move(label);
  return s;
}

SymbolFn SymbolFn::conj() const {
  if (is_separable()) {
    std::vector<SeparableTerm> t;
    for (const auto& term : terms) {
      auto c = term.c;
      auto m = term.m;
      t.push_back({[c](const Vec3& x) { return std::conj(c(x)); }, [m](const Vec3& xi) { return std::conj(m(xi)); }});
    }
    return separable(std::move(t), order, label + "*");
  }
  auto f = eval;
  return general([f](const Vec3& x, const Vec3& xi) { return std::conj(f(x, xi)); }, order, label + "*");
}

namespace {
// coefficients of u = sum c_xi e^{i xi x}
CField fourier_coeffs(const Lattice& L, const CField& u) {
  CField F = lattice_fft(L, u, true);
  const double s = 1.0 / std::sqrt(double(L.size()));
  for (std::size_t i = 0; i < F.size(); ++i) {
    const Vec3 k = L.wave_phase(i);
    const Vec3 x0 = L.point(0);
    F[i] *= s * std::polar(1.0, -(k[0] * x0[0] + k[1] * x0[1] + k[2] * x0[2]));
  }
  return F;
}

cplx phase(const Vec3& k, const Vec3& x) { return std::polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]); }
}  // namespace

CField quantize_left(const Lattice& L, const SymbolFn& a, const CField& u) {
  if (a.is_separable()) {
    CField out(u.size(), 0.0);
    for (const auto& t : a.terms) {
      const CField mu = apply_fourier_multiplier(L, u, t.m);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] += t.c(L.point(i)) * mu[i];
    }
    return out;
  }
  const CField c = fourier_coeffs(L, u);
  const std::size_t N = L.size();
  CField out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 x = L.point(i);
    cplx acc = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      if (c[m] == cplx(0.0, 0.0)) continue;
      acc += a.eval(x, L.wave(m)) * c[m] * phase(L.wave_phase(m), x);
    }
    out[i] = acc;
  }
  return out;
}

CField quantize_right(const Lattice& L, const SymbolFn& a, const CField& u) {
  if (a.is_separable()) {
    CField out(u.size(), 0.0);
    CField cu(u.size());
    for (const auto& t : a.terms) {
      for (std::size_t i = 0; i < u.size(); ++i) cu[i] = t.c(L.point(i)) * u[i];
      const CField r = apply_fourier_multiplier(L, cu, t.m);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] += r[i];
    }
    return out;
  }
  const std::size_t N = L.size();
  CField coef(N, 0.0);
  for (std::size_t m = 0; m < N; ++m) {
    const Vec3 kp = L.wave_phase(m), k = L.wave(m);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const Vec3 y = L.point(j);
      acc += a.eval(y, k) * u[j] * std::conj(phase(kp, y));
    }
    coef[m] = acc / double(N);
  }
  CField out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 x = L.point(i);
    cplx acc = 0.0;
    for (std::size_t m = 0; m < N; ++m) acc += coef[m] * phase(L.wave_phase(m), x);
    out[i] = acc;
  }
  return out;
}

CField quantize_para(const Lattice& L, const SymbolFn& a, const CField& u) {
  if (!a.is_separable()) throw std::invalid_argument("paradifferential quantization needs a separable symbol");
  const double rmax = std::sqrt(double(L.dims)) * L.kmax();
  int top = 0;
  while (std::ldexp(1.0, top) < rmax) ++top;
  CField out(u.size(), 0.0);
  for (const auto& t : a.terms) {
    const CField c = sample_lattice(L, t.c);
    const CField mu = apply_fourier_multiplier(L, u, t.m);
    for (int k = 4; k <= top; ++k) {
      const CField low = apply_fourier_multiplier(L, c, [k](const Vec3& xi) { return cplx(phi_below(k - 3, knorm(xi)), 0.0); });
      const CField uk = lattice_shell(L, mu, k);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] += low[i] * uk[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------- derivatives of symbols

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// central difference of orders ord[0..5] (x axes then xi axes)
cplx mixed_derivative(const SymbolFn& a, const Vec3& x, const Vec3& xi, const int ord[6], double hx, double hxi) {
  std::vector<std::pair<std::array<double, 6>, double>> pts{{{0, 0, 0, 0, 0, 0}, 1.0}};
  for (int ax = 0; ax < 6; ++ax) {
    const int n = ord[ax];
    if (n == 0) continue;
    const double h = ax < 3 ? hx : hxi;
    std::vector<std::pair<std::array<double, 6>, double>> next;
    for (const auto& [off, w] : pts)
      for (int i = 0; i <= n; ++i) {
        auto o = off;
        o[ax] += (0.5 * n - i) * h;
        next.push_back({o, w * ((i % 2) ? -1.0 : 1.0) * binom(n, i) / std::pow(h, n)});
      }
    pts.swap(next);
  }
  cplx acc = 0.0;
  for (const auto& [off, w] : pts) {
    const Vec3 xx{x[0] + off[0], x[1] + off[1], x[2] + off[2]};
    const Vec3 kk{xi[0] + off[3], xi[1] + off[4], xi[2] + off[5]};
    acc += w * a.eval(xx, kk);
  }
  return acc;
}

double fd_step(double scale, int order) { return order == 0 ? 0.0 : scale * std::pow(1e-16, 1.0 / (order + 2)); }
}  // namespace

double derivative_sup(const SymbolFn& a, int alpha, int beta, const std::vector<Vec3>& xs, const std::vector<Vec3>& xis,
                      double x_scale, double xi_scale) {
  const int ord[6] = {alpha, 0, 0, beta, 0, 0};
  const double hx = fd_step(x_scale, alpha + beta), hxi = fd_step(xi_scale, alpha + beta);
  double best = 0.0;
  for (const auto& x : xs)
    for (const auto& xi : xis) best = std::max(best, std::abs(mixed_derivative(a, x, xi, ord, hx, hxi)));
  return best;
}

double symbol_seminorm(const SymbolFn& a, int dims, int N, const std::vector<Vec3>& xs, const std::vector<Vec3>& xis,
                       double x_scale, double xi_scale) {
  if (N < 0 || N > 6) throw std::invalid_argument("seminorm order must lie in [0, 6]");
  double total = 0.0;
  std::vector<std::array<int, 6>> idx;
  std::array<int, 6> cur{};
  std::function<void(int, int)> rec = [&](int ax, int left) {
    if (ax == 6) {
      idx.push_back(cur);
      return;
    }
    const bool used = (ax % 3) < dims;
    for (int o = 0; o <= (used ? left : 0); ++o) {
      cur[ax] = o;
      rec(ax + 1, left - o);
    }
    cur[ax] = 0;
  };
  rec(0, N);
  for (const auto& o : idx) {
    const int ox = o[0] + o[1] + o[2], ok = o[3] + o[4] + o[5];
    const double hx = fd_step(x_scale, ox + ok), hxi = fd_step(xi_scale, ox + ok);
    double best = 0.0;
    for (const auto& x : xs)
      for (const auto& xi : xis) {
        const double w = std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2], 0.5 * (ok - a.order));
        best = std::max(best, w * std::abs(mixed_derivative(a, x, xi, o.data(), hx, hxi)));
      }
    total += best;
  }
  return total;
}

// ---------------------------------------------------------------- operator norms

LinOp compose(const LinOp& a, const LinOp& b) {
  LinOp c;
  c.dim = b.dim;
  auto aa = a.apply, ba = b.apply, ad = a.adjoint, bd = b.adjoint;
  c.apply = [aa, ba](const CField& u) { return aa(ba(u)); };
  c.adjoint = [ad, bd](const CField& u) { return bd(ad(u)); };
  return c;
}

LinOp subtract(const LinOp& a, const LinOp& b) {
  LinOp c;
  c.dim = a.dim;
  auto aa = a.apply, ba = b.apply, ad = a.adjoint, bd = b.adjoint;
  c.apply = [aa, ba](const CField& u) {
    CField r = aa(u);
    const CField s = ba(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s[i];
    return r;
  };
  c.adjoint = [ad, bd](const CField& u) {
    CField r = ad(u);
    const CField s = bd(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s[i];
    return r;
  };
  return c;
}

LinOp left_op(const Lattice& L, const SymbolFn& a) {
  LinOp op;
  op.dim = L.size();
  const SymbolFn ac = a.conj();
  op.apply = [L, a](const CField& u) { return quantize_left(L, a, u); };
  op.adjoint = [L, ac](const CField& u) { return quantize_right(L, ac, u); };
  return op;
}

LinOp shell_op(const Lattice& L, int k) {
  LinOp op;
  op.dim = L.size();
  op.apply = [L, k](const CField& u) { return lattice_shell(L, u, k); };
  op.adjoint = op.apply;
  return op;
}

LinOp above_op(const Lattice& L, int k) {
  LinOp op;
  op.dim = L.size();
  op.apply = [L, k](const CField& u) { return lattice_above(L, u, k); };
  op.adjoint = op.apply;
  return op;
}

NormEstimate op_norm_estimate(const LinOp& A, const PowerOptions& opt) {
  NormEstimate est;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  auto rand_field = [&]() {
    CField v(A.dim);
    for (auto& z : v) z = cplx(nd(rng), nd(rng));
    return v;
  };
  {
    const CField u = rand_field(), v = rand_field();
    const cplx a(0.7, -0.3), b(-1.1, 0.4);
    CField w(A.dim);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a * u[i] + b * v[i];
    const CField Aw = A.apply(w), Au = A.apply(u), Av = A.apply(v);
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      diff += std::norm(Aw[i] - a * Au[i] - b * Av[i]);
      ref += std::norm(Aw[i]) + std::norm(a * Au[i]) + std::norm(b * Av[i]);
    }
    est.linear = std::sqrt(diff) <= 1e-10 * std::max(1.0, std::sqrt(ref));
  }
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    CField v = rand_field();
    double nv = lattice_norm(v);
    for (auto& z : v) z /= nv;
    double sigma2 = 0.0;
    bool conv = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
      CField w = A.adjoint(A.apply(v));
      const double s2 = std::real(lattice_inner(w, v));
      nv = lattice_norm(w);
      if (nv == 0.0) {
        sigma2 = 0.0;
        conv = true;
        break;
      }
      for (auto& z : w) z /= nv;
      v.swap(w);
      if (it > 2 && std::abs(s2 - sigma2) <= opt.rel_tol * std::abs(s2)) {
        sigma2 = s2;
        conv = true;
        break;
      }
      sigma2 = s2;
    }
    const double val = std::sqrt(std::max(0.0, sigma2));
    if (val >= est.value) {
      est.value = val;
      est.converged = conv;
    }
    est.iterations += it;
  }
  return est;
}

// ---------------------------------------------------------------- paraproducts

namespace {
void accumulate_cross(RealVectorField& acc, const RealVectorField& a, const RealVectorField& b) {
  for (std::size_t i = 0; i < acc.grid.size(); ++i) {
    acc.c[0][i] += a.c[1][i] * b.c[2][i] - a.c[2][i] * b.c[1][i];
    acc.c[1][i] += a.c[2][i] * b.c[0][i] - a.c[0][i] * b.c[2][i];
    acc.c[2][i] += a.c[0][i] * b.c[1][i] - a.c[1][i] * b.c[0][i];
  }
}

void add_scaled(RealVectorField& acc, const std::optional<RealVectorField>& f, double c) {
  if (!f) return;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < acc.grid.size(); ++i) acc.c[a][i] += c * f->c[a][i];
}

std::optional<RealVectorField> physical_shell(int k, const SpectralVectorField& f) {
  const SpectralVectorField p = lp_project(k, f);
  const auto zero = [](const std::vector<cplx>& v) {
    return std::all_of(v.begin(), v.end(), [](const cplx& z) { return z == cplx(0.0, 0.0); });
  };
  if (zero(p.c[0]) && zero(p.c[1]) && zero(p.c[2])) return std::nullopt;
  return fft_inverse(p);
}

std::vector<std::optional<RealVectorField>> physical_shells(const SpectralVectorField& f, int top) {
  std::vector<std::optional<RealVectorField>> out;
  for (int k = 0; k <= top; ++k) out.push_back(physical_shell(k, f));
  return out;
}

SpectralVectorField finish(const RealVectorField& acc) {
  SpectralVectorField out = fft_forward(acc);
  dealias(out);
  return out;
}
}  // namespace

SpectralVectorField cross_product(const SpectralVectorField& a, const SpectralVectorField& b) {
  RealVectorField acc(a.grid);
  accumulate_cross(acc, fft_inverse(a), fft_inverse(b));
  return finish(acc);
}

SpectralVectorField paraproduct(const SpectralScalarField& g, const SpectralVectorField& u, int gap) {
  const Grid3& G = u.grid;
  RealVectorField acc(G);
  const int top = lp_top_shell(G);
  for (int k = gap + 1; k <= top; ++k) {
    SpectralScalarField gl = apply_multiplier(g, [k, gap](const Vec3& kv) { return cplx(phi_below(k - gap, knorm(kv)), 0.0); });
    const RealScalarField low = fft_inverse(gl);
    const RealVectorField uk = fft_inverse(lp_project(k, u));
    for (int a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < G.size(); ++i) acc.c[a][i] += low.v[i] * uk.c[a][i];
  }
  return finish(acc);
}

SpectralVectorField paraproduct_cross(const SpectralVectorField& a, const SpectralVectorField& u, int gap) {
  const Grid3& G = u.grid;
  RealVectorField acc(G);
  const int top = lp_top_shell(G);
  for (int k = gap + 1; k <= top; ++k) {
    const auto uk = physical_shell(k, u);
    if (!uk) continue;
    accumulate_cross(acc, fft_inverse(lp_below(k - gap, a)), *uk);
  }
  return finish(acc);
}

SpectralVectorField paralin_error(const SpectralVectorField& b, int gap) {
  const SpectralVectorField cb = curl(b);
  SpectralVectorField s = cross_product(b, cb);
  s -= paraproduct_cross(b, cb, gap);
  s += paraproduct_cross(cb, b, gap);
  return curl(s);
}

SpectralVectorField paralin_error_balanced(const SpectralVectorField& b, int gap) {
  const Grid3& G = b.grid;
  const int top = lp_top_shell(G);
  const auto bs = physical_shells(b, top);
  const auto cs = physical_shells(curl(b), top);
  RealVectorField acc(G), window(G);
  int lo = 0, hi = -1;
  for (int k = 0; k <= top; ++k) {
    const int nlo = std::max(0, k - gap), nhi = std::min(top, k + gap);
    for (; hi < nhi; ++hi) add_scaled(window, bs[hi + 1], 1.0);
    for (; lo < nlo; ++lo) add_scaled(window, bs[lo], -1.0);
    if (cs[k]) accumulate_cross(acc, window, *cs[k]);
  }
  return curl(finish(acc));
}

// ---------------------------------------------------------------- calculus experiments

SymbolFn cv_test_symbol(double M, int shell) {
  return SymbolFn::separable(
      {SeparableTerm{[M](const Vec3& x) { return cplx((2.0 / 3.0) * (1.0 + 0.5 * std::sin(M * x[0])), 0.0); },
                     [shell](const Vec3& xi) { return cplx(phi_k(shell, knorm(xi)), 0.0); }}},
      0.0, "cv-test");
}

namespace {
std::vector<Vec3> line_points(double a, double b, int count) {
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) out.push_back({a + (b - a) * (i + 0.5) / count, 0.0, 0.0});
  return out;
}
}  // namespace

double cv_threshold(const SymbolFn& a, double lambda, int max_order, const std::vector<Vec3>& xs,
                    const std::vector<Vec3>& xis, double* c00_out) {
  const double c00 = derivative_sup(a, 0, 0, xs, xis, 1.0, 1.0);
  if (c00_out) *c00_out = c00;
  double thr = 0.0;
  for (int tot = 1; tot <= max_order; ++tot)
    for (int al = 0; al <= tot; ++al) {
      const int be = tot - al;
      const double cab = std::pow(lambda, be) * derivative_sup(a, al, be, xs, xis, 1.0, lambda);
      thr = std::max(thr, std::pow(cab / c00, 2.0 / tot));
    }
  return thr;
}

double rescaled_derivative_sup(const SymbolFn& a, double lambda, double c00, int max_order,
                               const std::vector<Vec3>& xs, const std::vector<Vec3>& xis) {
  const double l0 = std::sqrt(lambda);
  auto f = a.eval;
  const SymbolFn t = SymbolFn::general(
      [f, l0, c00](const Vec3& x, const Vec3& xi) {
        return f({x[0] / l0, x[1] / l0, x[2] / l0}, {xi[0] * l0, xi[1] * l0, xi[2] * l0}) / c00;
      },
      0.0, "rescaled");
  std::vector<Vec3> xs2, xis2;
  for (const auto& x : xs) xs2.push_back({x[0] * l0, x[1] * l0, x[2] * l0});
  for (const auto& k : xis) xis2.push_back({k[0] / l0, k[1] / l0, k[2] / l0});
  double best = 0.0;
  for (int tot = 1; tot <= max_order; ++tot)
    for (int al = 0; al <= tot; ++al)
      best = std::max(best, derivative_sup(t, al, tot - al, xs2, xis2, l0, l0));
  return best;
}

CvReport hf_cv_check(const Lattice& L, double M, const std::vector<int>& shells, int max_order) {
  CvReport rep;
  rep.max_order = max_order;
  const auto xs = line_points(0.0, 2.0 * M_PI / M, 48);
  for (int j : shells) {
    const double lam = std::ldexp(1.0, j);
    const SymbolFn a = cv_test_symbol(M, j);
    const auto xis = line_points(0.5 * lam, 2.0 * lam, 96);
    CvRow row;
    row.shell = j;
    row.lambda = lam;
    double c00 = 0.0;
    row.threshold = cv_threshold(a, lam, max_order, xs, xis, &c00);
    rep.c00 = std::max(rep.c00, c00);
    row.above_threshold = lam >= row.threshold;
    const LinOp op = compose(left_op(L, a), above_op(L, std::max(0, j - 2)));
    row.op_norm = op_norm_estimate(op).value;
    row.ratio = row.op_norm / c00;
    row.rescaled_sup = rescaled_derivative_sup(a, lam, c00, max_order, xs, xis);
    rep.rows.push_back(row);
  }
  return rep;
}

CompositionPair half_order_pair(const Lattice& L, int mode, double amplitude) {
  const double w = mode / L.lambda;
  const auto jap = [](const Vec3& xi) { return std::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]); };
  const MultFn half = [jap](const Vec3& xi) { return cplx(std::sqrt(jap(xi)), 0.0); };
  const CoefFn coef = [w, amplitude](const Vec3& x) { return cplx(1.0 + amplitude * std::cos(w * x[0]), 0.0); };
  const CoefFn dcoef = [w, amplitude](const Vec3& x) { return cplx(-amplitude * w * std::sin(w * x[0]), 0.0); };
  const MultFn dhalf = [jap](const Vec3& xi) { return cplx(0.0, -0.5 * xi[0] * std::pow(jap(xi), -1.5)); };
  CompositionPair p;
  p.a = SymbolFn::multiplier(half, 0.5, "japanese-half");
  p.b = SymbolFn::coefficient(coef, "cosine-coefficient");
  p.ab = SymbolFn::separable({SeparableTerm{coef, half}}, 0.5, "product");
  p.correction = SymbolFn::separable({SeparableTerm{dcoef, dhalf}}, -0.5, "first-correction");
  return p;
}

CompositionReport composition_residual(const Lattice& L, const SymbolFn& a, const SymbolFn& b, const SymbolFn& ab,
                                       const SymbolFn& correction, const std::vector<int>& shells,
                                       const PowerOptions& opt) {
  CompositionReport rep;
  const LinOp first = subtract(compose(left_op(L, a), left_op(L, b)), left_op(L, ab));
  const LinOp second = subtract(first, left_op(L, correction));
  std::vector<double> ks, f1, f2;
  for (int k : shells) {
    CompositionRow row;
    row.shell = k;
    row.first = op_norm_estimate(compose(first, shell_op(L, k)), opt).value;
    row.second = op_norm_estimate(compose(second, shell_op(L, k)), opt).value;
    rep.rows.push_back(row);
    ks.push_back(k);
    f1.push_back(std::log2(std::max(row.first, 1e-300)));
    f2.push_back(std::log2(std::max(row.second, 1e-300)));
  }
  if (ks.size() >= 2) {
    rep.first_slope = fit_slope(ks, f1);
    rep.second_slope = fit_slope(ks, f2);
  }
  return rep;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace emhd
