#include "emhd/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace emhd {

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

namespace {
constexpr int kEps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                               {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                               {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};

FieldSample e3_sample() {
  FieldSample s;
  s.B = {0, 0, 1};
  return s;
}
}  // namespace

FieldSample UniformField::eval(const Vec3&, int) const {
  FieldSample s;
  s.B = b_;
  return s;
}

FieldSample AffineField::eval(const Vec3& x, int) const {
  FieldSample s;
  for (int b = 0; b < 3; ++b) {
    s.B[b] = b0_[b];
    for (int a = 0; a < 3; ++a) {
      s.B[b] += g_[b][a] * x[a];
      s.dB[a][b] = g_[b][a];
    }
  }
  return s;
}

FieldSample BumpField::eval(const Vec3& x, int order) const {
  FieldSample s;
  s.B = bg_;
  for (const auto& bp : bumps_) {
    const Vec3 r{x[0] - bp.center[0], x[1] - bp.center[1], x[2] - bp.center[2]};
    const double w2 = bp.width * bp.width;
    const double rr = dot3(r, r);
    if (rr > 80.0 * w2) continue;
    const double a = std::exp(-0.5 * rr / w2);
    double da[3], dda[3][3], ddda[3][3][3];
    for (int i = 0; i < 3; ++i) da[i] = -r[i] / w2 * a;
    for (int b = 0; b < 3; ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (kEps[b][i][j]) s.B[b] += bp.delta * kEps[b][i][j] * da[i] * bp.dir[j];
    if (order < 1) continue;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dda[i][j] = (r[i] * r[j] / (w2 * w2) - (i == j ? 1.0 / w2 : 0.0)) * a;
    for (int q = 0; q < 3; ++q)
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            if (kEps[b][i][j]) s.dB[q][b] += bp.delta * kEps[b][i][j] * dda[q][i] * bp.dir[j];
    if (order < 2) continue;
    const double w4 = w2 * w2, w6 = w4 * w2;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double t = -r[i] * r[j] * r[k] / w6;
          t += ((i == j ? r[k] : 0.0) + (i == k ? r[j] : 0.0) + (j == k ? r[i] : 0.0)) / w4;
          ddda[k][i][j] = t * a;
        }
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        for (int b = 0; b < 3; ++b)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              if (kEps[b][i][j]) s.d2B[p][q][b] += bp.delta * kEps[b][i][j] * ddda[p][q][i] * bp.dir[j];
  }
  return s;
}

std::shared_ptr<ModeSumField> ModeSumField::from_grid(const SpectralVectorField& f, double rel_cut,
                                                      bool extend_uniform) {
  const Grid3& g = f.grid;
  const int n = g.n;
  const double invsqrtN = 1.0 / std::sqrt(double(g.size()));
  double cmax = 0.0;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 1; i < g.size(); ++i) cmax = std::max(cmax, std::abs(f.c[a][i]));
  std::vector<Mode> modes;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        if (i == n / 2 || j == n / 2 || l == n / 2) continue;
        const int m1 = g.mode(i), m2 = g.mode(j), m3 = g.mode(l);
        const bool half = m1 > 0 || (m1 == 0 && m2 > 0) || (m1 == 0 && m2 == 0 && m3 > 0);
        if (!half) continue;
        const std::size_t idx = g.index(i, j, l);
        double mag = 0.0;
        for (int a = 0; a < 3; ++a) mag = std::max(mag, std::abs(f.c[a][idx]));
        if (mag <= rel_cut * cmax || mag == 0.0) continue;
        const double sgn = ((m1 + m2 + m3) % 2 == 0) ? 1.0 : -1.0;
        Mode md;
        md.k = {m1 / g.lambda, m2 / g.lambda, m3 / g.lambda};
        for (int a = 0; a < 3; ++a) md.c[a] = f.c[a][idx] * (sgn * invsqrtN);
        modes.push_back(md);
      }
  const Vec3 mu = mean(f);
  return std::make_shared<ModeSumField>(mu, std::move(modes), extend_uniform ? 0.5 * g.box_length() : 0.0);
}

FieldSample ModeSumField::eval(const Vec3& x, int order) const {
  if (half_height_ > 0.0 && std::abs(x[2]) > half_height_) return e3_sample();
  FieldSample s;
  s.B = mean_;
  for (const auto& m : modes_) {
    const double th = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2];
    const double cs = std::cos(th), sn = std::sin(th);
    for (int b = 0; b < 3; ++b) {
      const double re = m.c[b].real() * cs - m.c[b].imag() * sn;
      const double im = m.c[b].real() * sn + m.c[b].imag() * cs;
      s.B[b] += 2.0 * re;
      if (order >= 1)
        for (int a = 0; a < 3; ++a) s.dB[a][b] -= 2.0 * m.k[a] * im;
      if (order >= 2)
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) s.d2B[a][c][b] -= 2.0 * m.k[a] * m.k[c] * re;
    }
  }
  return s;
}

std::shared_ptr<ModeSumField> make_cos_modes(const Vec3& mean, const std::vector<CosMode>& modes) {
  std::vector<ModeSumField::Mode> out;
  for (const auto& cm : modes) {
    ModeSumField::Mode m;
    m.k = cm.k;
    const cplx ph = std::polar(0.5 * cm.amp, cm.phase);
    for (int a = 0; a < 3; ++a) m.c[a] = ph * cm.v[a];
    out.push_back(m);
  }
  return std::make_shared<ModeSumField>(mean, std::move(out), 0.0);
}

std::shared_ptr<BumpField> make_null_point_field(const Vec3& center, double width) {
  Bump b;
  b.center = center;
  b.width = width;
  b.dir = {1, 0, 0};
  b.delta = width * std::exp(0.5);
  return std::make_shared<BumpField>(Vec3{0, 0, 1}, std::vector<Bump>{b});
}

// ---------------------------------------------------------------- Lagrange grid field

LagrangeGridField::LagrangeGridField(const SpectralVectorField& f) : grid_(f.grid) {
  const Grid3& g = f.grid;
  data_.reserve(30);
  auto push = [&](const std::vector<cplx>& spec) {
    std::vector<cplx> tmp(g.size());
    fft_raw(3, g.n, spec.data(), tmp.data(), false);
    std::vector<double> r(g.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = tmp[i].real();
    data_.push_back(std::move(r));
  };
  for (int b = 0; b < 3; ++b) push(f.c[b]);
  std::vector<cplx> spec(g.size());
  auto kcomp = [&](std::size_t idx, int a) {
    const int n = g.n;
    const int i = int(idx / (std::size_t(n) * n)), j = int((idx / n) % n), l = int(idx % n);
    return a == 0 ? g.k_eff(i) : (a == 1 ? g.k_eff(j) : g.k_eff(l));
  };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      for (std::size_t idx = 0; idx < g.size(); ++idx) spec[idx] = cplx(0, kcomp(idx, a)) * f.c[b][idx];
      push(spec);
    }
  for (int a = 0; a < 3; ++a)
    for (int c = a; c < 3; ++c)
      for (int b = 0; b < 3; ++b) {
        for (std::size_t idx = 0; idx < g.size(); ++idx) spec[idx] = -kcomp(idx, a) * kcomp(idx, c) * f.c[b][idx];
        push(spec);
      }
}

double LagrangeGridField::interp(int comp, const Vec3& x) const {
  const int n = grid_.n;
  const double h = grid_.spacing(), L = grid_.box_length();
  int base[3];
  double w[3][4];
  for (int a = 0; a < 3; ++a) {
    const double u = (x[a] + 0.5 * L) / h;
    const double fl = std::floor(u);
    const double t = u - fl;
    base[a] = int(fl) - 1;
    w[a][0] = -t * (t - 1) * (t - 2) / 6.0;
    w[a][1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
    w[a][2] = -(t + 1) * t * (t - 2) / 2.0;
    w[a][3] = (t + 1) * t * (t - 1) / 6.0;
  }
  const auto& d = data_[comp];
  double acc = 0.0;
  for (int p = 0; p < 4; ++p) {
    const int i = ((base[0] + p) % n + n) % n;
    for (int q = 0; q < 4; ++q) {
      const int j = ((base[1] + q) % n + n) % n;
      double row = 0.0;
      for (int r = 0; r < 4; ++r) {
        const int l = ((base[2] + r) % n + n) % n;
        row += w[2][r] * d[grid_.index(i, j, l)];
      }
      acc += w[0][p] * w[1][q] * row;
    }
  }
  return acc;
}

FieldSample LagrangeGridField::eval(const Vec3& x, int order) const {
  if (std::abs(x[2]) > 0.5 * grid_.box_length()) return e3_sample();
  FieldSample s;
  for (int b = 0; b < 3; ++b) s.B[b] = interp(b, x);
  if (order >= 1)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s.dB[a][b] = interp(3 + 3 * a + b, x);
  if (order >= 2) {
    int comp = 12;
    for (int a = 0; a < 3; ++a)
      for (int c = a; c < 3; ++c)
        for (int b = 0; b < 3; ++b) {
          const double v = interp(comp++, x);
          s.d2B[a][c][b] = v;
          s.d2B[c][a][b] = v;
        }
  }
  return s;
}

RealVectorField sample_field(const FieldEvaluator& f, const Grid3& g) {
  return sample(g, [&](const Vec3& x) { return f.eval(x, 0).B; });
}

}  // namespace emhd
