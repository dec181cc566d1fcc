#include "emhd/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "emhd/cutoffs.hpp"

namespace emhd {

namespace {
double knorm(const Vec3& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }

double combine(const std::vector<double>& v, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  }
  double acc = 0.0;
  for (double x : v) acc += std::pow(x, r);
  return std::pow(acc, 1.0 / r);
}
}  // namespace

int lp_top_shell(const Grid3& g) {
  const double rmax = std::sqrt(3.0) * (g.n / 2 - 1) / g.lambda;
  int k = 0;
  while (std::ldexp(1.0, k) < rmax) ++k;
  return k;
}

SpectralVectorField lp_project(int k, const SpectralVectorField& f, bool* partial) {
  if (k < 0) throw std::invalid_argument("shell index must be nonnegative");
  if (partial) *partial = std::ldexp(1.0, k + 1) > f.grid.kmax();
  return apply_multiplier(f, [k](const Vec3& kv) { return cplx(phi_k(k, knorm(kv)), 0.0); });
}

SpectralVectorField lp_below(int k, const SpectralVectorField& f) {
  return apply_multiplier(f, [k](const Vec3& kv) { return cplx(phi_below(k, knorm(kv)), 0.0); });
}

SpectralVectorField lp_range(int k0, int k1, const SpectralVectorField& f) {
  return apply_multiplier(f, [k0, k1](const Vec3& kv) {
    const double r = knorm(kv);
    return cplx(phi_below(k1, r) - phi_below(k0, r), 0.0);
  });
}

// ---------------------------------------------------------------- slabs

SlabPartition::SlabPartition(int level, double box_length) : level_(level), h_(std::ldexp(1.0, level)), L_(box_length) {
  if (level < 0) throw std::invalid_argument("slab level must be nonnegative");
  first_ = int(std::floor((-0.5 * L_ - 0.5 * h_) / h_));
  last_ = int(std::ceil((0.5 * L_ + 0.5 * h_) / h_)) - 1;
}

double SlabPartition::cutoff(int j, double z) const {
  return slab_ramp((z - j * h_) / h_) - slab_ramp((z - (j + 1) * h_) / h_);
}

std::vector<double> SlabPartition::cutoff_planes(int j, const Grid3& g) const {
  std::vector<double> w(g.n);
  for (int l = 0; l < g.n; ++l) w[l] = cutoff(j, g.coord(l));
  return w;
}

int SlabPartition::slab_of(double z) const { return int(std::floor(z / h_)); }

int slab_level_max(const Grid3& g) { return std::max(0, int(std::floor(std::log2(g.box_length())))); }

int slab_level_for_shell(int k, const Grid3& g) { return std::clamp(k, 0, slab_level_max(g)); }

// ---------------------------------------------------------------- static norms

std::vector<double> plane_mass(const RealVectorField& u) {
  const Grid3& g = u.grid;
  const int n = g.n;
  const double area = g.spacing() * g.spacing();
  std::vector<double> m(n, 0.0);
  for (int a = 0; a < 3; ++a) {
    const auto& v = u.c[a];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* row = &v[g.index(i, j, 0)];
        for (int l = 0; l < n; ++l) m[l] += row[l] * row[l];
      }
  }
  for (double& x : m) x *= area;
  return m;
}

std::vector<double> plane_mass(const SpectralVectorField& u) {
  const Grid3& g = u.grid;
  const int n = g.n;
  const double area = g.spacing() * g.spacing();
  std::vector<double> m(n, 0.0);
  std::vector<cplx> row(n);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        fft_raw(1, n, &u.c[a][g.index(i, j, 0)], row.data(), false);
        for (int l = 0; l < n; ++l) m[l] += std::norm(row[l]);
      }
  for (double& x : m) x *= area;
  return m;
}

Ell1HsReport ell1_hs_report(double s, const SpectralVectorField& u) {
  const Grid3& g = u.grid;
  Ell1HsReport rep;
  const int top = lp_top_shell(g);
  const double dz = g.spacing();
  double acc = 0.0;
  for (int k = 0; k <= top; ++k) {
    const auto m = plane_mass(lp_project(k, u));
    const int lev = slab_level_for_shell(k, g);
    SlabPartition sp(lev, g.box_length());
    std::vector<double> cells;
    double sum = 0.0;
    for (int j = sp.first(); j <= sp.last(); ++j) {
      double c = 0.0;
      for (int l = 0; l < g.n; ++l) {
        const double w = sp.cutoff(j, g.coord(l));
        c += w * w * m[l];
      }
      const double v = std::sqrt(c * dz);
      cells.push_back(v);
      sum += v;
    }
    rep.cells.push_back(std::move(cells));
    rep.levels.push_back(lev);
    const double t = std::pow(2.0, s * k) * sum;
    acc += t * t;
  }
  rep.total = std::sqrt(acc);
  return rep;
}

double ell1_hs_norm(double s, const SpectralVectorField& u) { return ell1_hs_report(s, u).total; }

SpectralVectorField multiply_x3(const SpectralVectorField& u, const std::function<double(double)>& w) {
  RealVectorField r = fft_inverse(u);
  const Grid3& g = u.grid;
  std::vector<double> wz(g.n);
  for (int l = 0; l < g.n; ++l) wz[l] = w(g.coord(l));
  for (int a = 0; a < 3; ++a)
    for (std::size_t idx = 0; idx < g.size(); ++idx) r.c[a][idx] *= wz[idx % g.n];
  SpectralVectorField out = fft_forward(r);
  out.real = u.real;
  return out;
}

// ---------------------------------------------------------------- space-time

std::vector<double> PlaneSeries::time_weights() const {
  const std::size_t nt = steps();
  std::vector<double> w(nt, dt);
  if (nt >= 2) {
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
  }
  return w;
}

PlaneSeries PlaneSeries::weighted(const std::vector<double>& w) const {
  PlaneSeries out = *this;
  for (auto& row : out.mass)
    for (std::size_t l = 0; l < row.size(); ++l) row[l] *= w[l];
  return out;
}

PlaneSeries PlaneSeries::scaled(double s) const {
  PlaneSeries out = *this;
  for (auto& row : out.mass)
    for (double& x : row) x *= s * s;
  return out;
}

namespace {
std::vector<double> time_integrated(const PlaneSeries& u) {
  const auto w = u.time_weights();
  std::vector<double> M(u.grid.n, 0.0);
  for (std::size_t t = 0; t < u.steps(); ++t)
    for (int l = 0; l < u.grid.n; ++l) M[l] += w[t] * u.mass[t][l];
  return M;
}

// sharp-slab L^2_t L^2 masses for level lev
std::vector<double> slab_masses(const std::vector<double>& M, const Grid3& g, int lev) {
  SlabPartition sp(lev, g.box_length());
  std::vector<double> out(sp.count(), 0.0);
  const double dz = g.spacing();
  for (int l = 0; l < g.n; ++l) {
    const int j = sp.slab_of(g.coord(l));
    if (j >= sp.first() && j <= sp.last()) out[j - sp.first()] += M[l] * dz;
  }
  return out;
}

double le_star_level_sum(const std::vector<double>& M, const Grid3& g, int lev) {
  double acc = 0.0;
  for (double m : slab_masses(M, g, lev)) acc += std::sqrt(m);
  return std::pow(2.0, 0.5 * lev) * acc;
}
}  // namespace

double PlaneSeries::slab_mass(double a, double b) const {
  const auto M = time_integrated(*this);
  double acc = 0.0;
  for (int l = 0; l < grid.n; ++l) {
    const double z = grid.coord(l);
    if (z >= a && z < b) acc += M[l];
  }
  return acc * grid.spacing();
}

double le_norm(const PlaneSeries& u) {
  const auto M = time_integrated(u);
  double best = 0.0;
  for (int lev = 0; lev <= slab_level_max(u.grid); ++lev) {
    const double f = std::pow(2.0, -0.5 * lev);
    for (double m : slab_masses(M, u.grid, lev)) best = std::max(best, f * std::sqrt(m));
  }
  return best;
}

double linf_l2(const PlaneSeries& u) {
  double best = 0.0;
  for (const auto& row : u.mass) {
    double acc = 0.0;
    for (double x : row) acc += x;
    best = std::max(best, std::sqrt(acc * u.grid.spacing()));
  }
  return best;
}

double l1_l2(const PlaneSeries& u) {
  const auto w = u.time_weights();
  double acc = 0.0;
  for (std::size_t t = 0; t < u.steps(); ++t) {
    double s = 0.0;
    for (double x : u.mass[t]) s += x;
    acc += w[t] * std::sqrt(s * u.grid.spacing());
  }
  return acc;
}

double l2_l2(const PlaneSeries& u) {
  const auto M = time_integrated(u);
  double acc = 0.0;
  for (double m : M) acc += m;
  return std::sqrt(acc * u.grid.spacing());
}

LeStar le_star_norm(const PlaneSeries& g, const std::vector<PlaneSeries>& levels) {
  LeStar best;
  best.value = std::numeric_limits<double>::infinity();
  const auto M = time_integrated(g);
  for (int lev = 0; lev <= slab_level_max(g.grid); ++lev) {
    const double v = le_star_level_sum(M, g.grid, lev);
    if (v < best.value) {
      best.value = v;
      best.winner = "level:" + std::to_string(lev);
    }
  }
  if (!levels.empty()) {
    double v = 0.0;
    for (std::size_t lev = 0; lev < levels.size(); ++lev)
      v += le_star_level_sum(time_integrated(levels[lev]), g.grid, int(lev));
    if (v < best.value) {
      best.value = v;
      best.winner = "frequency-matched";
    }
  }
  return best;
}

double xk_norm(int k, const PlaneSeries& b) { return std::pow(2.0, 0.5 * k) * le_norm(b) + linf_l2(b); }

double yk_norm(int k, const PlaneSeries& g, const std::vector<PlaneSeries>& levels) {
  return std::min(std::pow(2.0, -0.5 * k) * le_star_norm(g, levels).value, l1_l2(g));
}

namespace {
template <class F>
double ell_combine(int k, double r, const Grid3& grid, F&& per_slab) {
  SlabPartition sp(slab_level_for_shell(k, grid), grid.box_length());
  std::vector<double> vals;
  for (int j = sp.first(); j <= sp.last(); ++j) {
    auto w = sp.cutoff_planes(j, grid);
    for (double& x : w) x *= x;
    vals.push_back(per_slab(w));
  }
  return combine(vals, r);
}
}  // namespace

double ell_xk_norm(int k, double r, const PlaneSeries& b) {
  return ell_combine(k, r, b.grid, [&](const std::vector<double>& w) { return xk_norm(k, b.weighted(w)); });
}

double ell_yk_norm(int k, double r, const PlaneSeries& g, const std::vector<PlaneSeries>& levels) {
  return ell_combine(k, r, g.grid, [&](const std::vector<double>& w) {
    std::vector<PlaneSeries> lw;
    for (const auto& p : levels) lw.push_back(p.weighted(w));
    return yk_norm(k, g.weighted(w), lw);
  });
}

double ell_linf_l2(int k, double r, const PlaneSeries& b) {
  return ell_combine(k, r, b.grid, [&](const std::vector<double>& w) { return linf_l2(b.weighted(w)); });
}

double xs_norm(double s, const SpaceTimeProfile& p) {
  double acc = 0.0;
  for (const auto& [k, ser] : p.shells) {
    const double t = std::pow(2.0, s * k) * xk_norm(k, ser);
    acc += t * t;
  }
  return std::sqrt(acc);
}

double ys_norm(double s, const SpaceTimeProfile& p) {
  double acc = 0.0;
  for (const auto& [k, ser] : p.shells) {
    const double t = std::pow(2.0, s * k) * yk_norm(k, ser);
    acc += t * t;
  }
  return std::sqrt(acc);
}

double ell_xs_norm(double s, double r, const SpaceTimeProfile& p) {
  double acc = 0.0;
  for (const auto& [k, ser] : p.shells) {
    const double t = std::pow(2.0, s * k) * ell_xk_norm(k, r, ser);
    acc += t * t;
  }
  return std::sqrt(acc);
}

double ell_ys_norm(double s, double r, const SpaceTimeProfile& p) {
  double acc = 0.0;
  for (const auto& [k, ser] : p.shells) {
    const double t = std::pow(2.0, s * k) * ell_yk_norm(k, r, ser);
    acc += t * t;
  }
  return std::sqrt(acc);
}

double ell_linf_hs_norm(double s, double r, const SpaceTimeProfile& p) {
  double acc = 0.0;
  for (const auto& [k, ser] : p.shells) {
    const double t = std::pow(2.0, s * k) * ell_linf_l2(k, r, ser);
    acc += t * t;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------- builder

ProfileBuilder::ProfileBuilder(const Grid3& g, double dt, std::vector<int> shells, bool levels)
    : shells_(std::move(shells)), levels_(levels) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step of a profile must be positive");
  p_.grid = g;
  p_.dt = dt;
  p_.whole.grid = g;
  p_.whole.dt = dt;
  for (int k : shells_) {
    PlaneSeries s;
    s.grid = g;
    s.dt = dt;
    p_.shells[k] = s;
  }
  if (levels_) {
    p_.levels.resize(slab_level_max(g) + 1);
    for (auto& s : p_.levels) {
      s.grid = g;
      s.dt = dt;
    }
  }
}

void ProfileBuilder::add(const SpectralVectorField& u) {
  if (u.grid != p_.grid) throw std::invalid_argument("profile frame on a different grid");
  p_.whole.mass.push_back(plane_mass(u));
  for (int k : shells_) p_.shells[k].mass.push_back(plane_mass(lp_project(k, u)));
  if (levels_) {
    const int lmax = int(p_.levels.size()) - 1;
    for (int lev = 0; lev < lmax; ++lev) p_.levels[lev].mass.push_back(plane_mass(lp_project(lev, u)));
    p_.levels[lmax].mass.push_back(plane_mass(u - lp_below(lmax, u)));
  }
}

SpaceTimeProfile full_profile(const std::vector<SpectralVectorField>& frames, double dt) {
  if (frames.empty()) throw std::invalid_argument("profile needs at least one frame");
  std::vector<int> shells;
  for (int k = 0; k <= lp_top_shell(frames.front().grid); ++k) shells.push_back(k);
  ProfileBuilder b(frames.front().grid, dt, shells, true);
  for (const auto& f : frames) b.add(f);
  return b.profile();
}

std::string ell1_report_json(double s, const Ell1HsReport& r) {
  nlohmann::ordered_json j;
  j["s"] = s;
  j["total"] = r.total;
  nlohmann::ordered_json shells = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < r.cells.size(); ++k) {
    nlohmann::ordered_json e;
    e["k"] = k;
    e["level"] = r.levels[k];
    e["cells"] = r.cells[k];
    shells.push_back(e);
  }
  j["shells"] = shells;
  return j.dump(2);
}

}  // namespace emhd
