#include "emhd/grid.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "emhd/parallel.hpp"
#include "json.hpp"

namespace emhd {

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() { return g_threads.load(); }
void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

Grid3::Grid3(int n_, double lambda_) : n(n_), lambda(lambda_) {
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size must be a power of two >= 8");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
}

double Grid3::box_length() const { return 2.0 * M_PI * lambda; }

RealVectorField::RealVectorField(const Grid3& g) : grid(g) {
  for (auto& v : c) v.assign(g.size(), 0.0);
}

bool RealVectorField::all_finite() const {
  for (const auto& v : c)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  return true;
}

SpectralVectorField::SpectralVectorField(const Grid3& g, bool is_real) : grid(g), real(is_real) {
  for (auto& v : c) v.assign(g.size(), cplx(0.0));
}

SpectralVectorField& SpectralVectorField::operator+=(const SpectralVectorField& o) {
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < c[a].size(); ++i) c[a][i] += o.c[a][i];
  real = real && o.real;
  return *this;
}

SpectralVectorField& SpectralVectorField::operator-=(const SpectralVectorField& o) {
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < c[a].size(); ++i) c[a][i] -= o.c[a][i];
  real = real && o.real;
  return *this;
}

SpectralVectorField& SpectralVectorField::operator*=(double s) {
  for (auto& v : c)
    for (auto& x : v) x *= s;
  return *this;
}

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) { return a += b; }
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) { return a -= b; }
SpectralVectorField operator*(double s, SpectralVectorField a) { return a *= s; }

void axpy(SpectralVectorField& a, double s, const SpectralVectorField& b) {
  for (int q = 0; q < 3; ++q)
    for (std::size_t i = 0; i < a.c[q].size(); ++i) a.c[q][i] += s * b.c[q][i];
  a.real = a.real && b.real;
}

// ---------------------------------------------------------------- FFT

namespace {

struct PlanKey {
  int dims, n;
  bool forward, inplace;
  bool operator<(const PlanKey& o) const {
    return std::tie(dims, n, forward, inplace) < std::tie(o.dims, o.n, o.forward, o.inplace);
  }
};

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan get_plan(const PlanKey& key) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  std::size_t total = 1;
  for (int d = 0; d < key.dims; ++d) total *= std::size_t(key.n);
  fftw_complex* a = fftw_alloc_complex(total);
  fftw_complex* b = key.inplace ? a : fftw_alloc_complex(total);
  int sign = key.forward ? FFTW_FORWARD : FFTW_BACKWARD;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = nullptr;
  if (key.dims == 1) p = fftw_plan_dft_1d(key.n, a, b, sign, flags);
  else if (key.dims == 2) p = fftw_plan_dft_2d(key.n, key.n, a, b, sign, flags);
  else p = fftw_plan_dft_3d(key.n, key.n, key.n, a, b, sign, flags);
  if (!key.inplace) fftw_free(b);
  fftw_free(a);
  if (!p) throw std::runtime_error("fftw planning failed");
  g_plans.emplace(key, p);
  return p;
}

}  // namespace

void fft_raw(int dims, int n, const cplx* in, cplx* out, bool forward) {
  fftw_plan p = get_plan({dims, n, forward, in == out});
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= std::size_t(n);
  const double s = 1.0 / std::sqrt(double(total));
  for (std::size_t i = 0; i < total; ++i) out[i] *= s;
}

SpectralScalarField fft_forward(const RealScalarField& f) {
  SpectralScalarField out(f.grid, true);
  for (std::size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i];
  fft_raw(3, f.grid.n, out.v.data(), out.v.data(), true);
  return out;
}

RealScalarField fft_inverse(const SpectralScalarField& f) {
  std::vector<cplx> tmp(f.v.size());
  fft_raw(3, f.grid.n, f.v.data(), tmp.data(), false);
  RealScalarField out(f.grid);
  for (std::size_t i = 0; i < tmp.size(); ++i) out.v[i] = tmp[i].real();
  return out;
}

SpectralVectorField fft_forward(const RealVectorField& f) {
  SpectralVectorField out(f.grid, true);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < f.c[a].size(); ++i) out.c[a][i] = f.c[a][i];
    fft_raw(3, f.grid.n, out.c[a].data(), out.c[a].data(), true);
  }
  return out;
}

RealVectorField fft_inverse(const SpectralVectorField& f) {
  RealVectorField out(f.grid);
  std::vector<cplx> tmp(f.grid.size());
  if (f.real) {
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = f.c[0][i] + cplx(0.0, 1.0) * f.c[1][i];
    fft_raw(3, f.grid.n, tmp.data(), tmp.data(), false);
    for (std::size_t i = 0; i < tmp.size(); ++i) {
      out.c[0][i] = tmp[i].real();
      out.c[1][i] = tmp[i].imag();
    }
    fft_raw(3, f.grid.n, f.c[2].data(), tmp.data(), false);
    for (std::size_t i = 0; i < tmp.size(); ++i) out.c[2][i] = tmp[i].real();
    return out;
  }
  for (int a = 0; a < 3; ++a) {
    fft_raw(3, f.grid.n, f.c[a].data(), tmp.data(), false);
    for (std::size_t i = 0; i < tmp.size(); ++i) out.c[a][i] = tmp[i].real();
  }
  return out;
}

// ---------------------------------------------------------------- multipliers

namespace {

template <class F>
void for_each_mode(const Grid3& g, F&& f) {
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    const double k1 = g.k_eff(i);
    for (int j = 0; j < n; ++j) {
      const double k2 = g.k_eff(j);
      for (int l = 0; l < n; ++l) {
        const double k3 = g.k_eff(l);
        f(g.index(i, j, l), Vec3{k1, k2, k3});
      }
    }
  }
}

const cplx I(0.0, 1.0);

}  // namespace

SpectralVectorField curl(const SpectralVectorField& f) {
  SpectralVectorField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    const cplx a = f.c[0][idx], b = f.c[1][idx], c = f.c[2][idx];
    out.c[0][idx] = I * (k[1] * c - k[2] * b);
    out.c[1][idx] = I * (k[2] * a - k[0] * c);
    out.c[2][idx] = I * (k[0] * b - k[1] * a);
  });
  return out;
}

SpectralScalarField divergence(const SpectralVectorField& f) {
  SpectralScalarField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    out.v[idx] = I * (k[0] * f.c[0][idx] + k[1] * f.c[1][idx] + k[2] * f.c[2][idx]);
  });
  return out;
}

SpectralVectorField gradient(const SpectralScalarField& g) {
  SpectralVectorField out(g.grid, g.real);
  for_each_mode(g.grid, [&](std::size_t idx, const Vec3& k) {
    for (int a = 0; a < 3; ++a) out.c[a][idx] = I * k[a] * g.v[idx];
  });
  return out;
}

SpectralVectorField leray_project(const SpectralVectorField& f) {
  SpectralVectorField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) {
      for (int a = 0; a < 3; ++a) out.c[a][idx] = f.c[a][idx];
      return;
    }
    const cplx kf = k[0] * f.c[0][idx] + k[1] * f.c[1][idx] + k[2] * f.c[2][idx];
    for (int a = 0; a < 3; ++a) out.c[a][idx] = f.c[a][idx] - k[a] * kf / k2;
  });
  return out;
}

SpectralScalarField apply_multiplier(const SpectralScalarField& f, const Multiplier& m) {
  SpectralScalarField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) { out.v[idx] = m(k) * f.v[idx]; });
  return out;
}

SpectralVectorField apply_multiplier(const SpectralVectorField& f, const Multiplier& m) {
  SpectralVectorField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    const cplx mk = m(k);
    for (int a = 0; a < 3; ++a) out.c[a][idx] = mk * f.c[a][idx];
  });
  return out;
}

SpectralVectorField abs_d_pow(const SpectralVectorField& f, double s) {
  SpectralVectorField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    const double r = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    const double m = (r == 0.0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(r, s);
    for (int a = 0; a < 3; ++a) out.c[a][idx] = m * f.c[a][idx];
  });
  return out;
}

SpectralVectorField japanese_d_pow(const SpectralVectorField& f, double s) {
  SpectralVectorField out(f.grid, f.real);
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    const double m = std::pow(1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2], 0.5 * s);
    for (int a = 0; a < 3; ++a) out.c[a][idx] = m * f.c[a][idx];
  });
  return out;
}

bool dealias_keeps(const Grid3& g, int i, int j, int l) {
  const int cut = g.n / 3;
  return std::abs(g.mode(i)) <= cut && std::abs(g.mode(j)) <= cut && std::abs(g.mode(l)) <= cut;
}

namespace {
template <class F>
void for_each_dropped(const Grid3& g, F&& f) {
  const int n = g.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        if (!dealias_keeps(g, i, j, l)) f(g.index(i, j, l));
}
}  // namespace

void dealias(SpectralVectorField& f) {
  for_each_dropped(f.grid, [&](std::size_t idx) {
    for (int a = 0; a < 3; ++a) f.c[a][idx] = 0.0;
  });
}

void dealias(SpectralScalarField& f) {
  for_each_dropped(f.grid, [&](std::size_t idx) { f.v[idx] = 0.0; });
}

// ---------------------------------------------------------------- products

RealVectorField cross(const RealVectorField& a, const RealVectorField& b) {
  RealVectorField out(a.grid);
  const std::size_t N = a.grid.size();
  for (std::size_t i = 0; i < N; ++i) {
    out.c[0][i] = a.c[1][i] * b.c[2][i] - a.c[2][i] * b.c[1][i];
    out.c[1][i] = a.c[2][i] * b.c[0][i] - a.c[0][i] * b.c[2][i];
    out.c[2][i] = a.c[0][i] * b.c[1][i] - a.c[1][i] * b.c[0][i];
  }
  return out;
}

RealScalarField dot(const RealVectorField& a, const RealVectorField& b) {
  RealScalarField out(a.grid);
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = a.c[0][i] * b.c[0][i] + a.c[1][i] * b.c[1][i] + a.c[2][i] * b.c[2][i];
  return out;
}

RealVectorField scale(const RealScalarField& s, const RealVectorField& a) {
  RealVectorField out(a.grid);
  for (int q = 0; q < 3; ++q)
    for (std::size_t i = 0; i < s.v.size(); ++i) out.c[q][i] = s.v[i] * a.c[q][i];
  return out;
}

// ---------------------------------------------------------------- norms

double l2_norm(const RealVectorField& f) {
  double s = 0.0;
  for (const auto& v : f.c)
    for (double x : v) s += x * x;
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_norm(const RealScalarField& f) {
  double s = 0.0;
  for (double x : f.v) s += x * x;
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_norm(const SpectralVectorField& f) {
  double s = 0.0;
  for (const auto& v : f.c)
    for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_inner(const RealVectorField& a, const RealVectorField& b) {
  double s = 0.0;
  for (int q = 0; q < 3; ++q)
    for (std::size_t i = 0; i < a.c[q].size(); ++i) s += a.c[q][i] * b.c[q][i];
  return s * a.grid.cell_volume();
}

double max_abs_divergence(const SpectralVectorField& f) {
  auto d = fft_inverse(divergence(f));
  double m = 0.0;
  for (double x : d.v) m = std::max(m, std::abs(x));
  return m;
}

double hs_norm(const SpectralVectorField& f, double s) {
  double acc = 0.0;
  for_each_mode(f.grid, [&](std::size_t idx, const Vec3& k) {
    const double w = std::pow(1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2], s);
    acc += w * (std::norm(f.c[0][idx]) + std::norm(f.c[1][idx]) + std::norm(f.c[2][idx]));
  });
  return std::sqrt(acc * f.grid.cell_volume());
}

double max_abs(const SpectralVectorField& f) {
  auto r = fft_inverse(f);
  double m = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    m = std::max(m, std::sqrt(r.c[0][i] * r.c[0][i] + r.c[1][i] * r.c[1][i] + r.c[2][i] * r.c[2][i]));
  return m;
}

RealVectorField sample(const Grid3& g, const std::function<Vec3(const Vec3&)>& f) {
  RealVectorField out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l) {
        const Vec3 v = f(Vec3{g.coord(i), g.coord(j), g.coord(l)});
        const std::size_t idx = g.index(i, j, l);
        for (int a = 0; a < 3; ++a) out.c[a][idx] = v[a];
      }
  return out;
}

RealScalarField sample_scalar(const Grid3& g, const std::function<double(const Vec3&)>& f) {
  RealScalarField out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l) out.v[g.index(i, j, l)] = f(Vec3{g.coord(i), g.coord(j), g.coord(l)});
  return out;
}

void add_constant(SpectralVectorField& f, const Vec3& c) {
  const double s = std::sqrt(double(f.grid.size()));
  for (int a = 0; a < 3; ++a) f.c[a][0] += c[a] * s;
}

Vec3 mean(const SpectralVectorField& f) {
  const double s = 1.0 / std::sqrt(double(f.grid.size()));
  return Vec3{f.c[0][0].real() * s, f.c[1][0].real() * s, f.c[2][0].real() * s};
}

// ---------------------------------------------------------------- binary IO

void write_field(const std::string& path, const RealVectorField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  nlohmann::ordered_json h;
  h["n"] = f.grid.n;
  h["lambda"] = f.grid.lambda;
  h["components"] = 3;
  h["dtype"] = "f64le";
  const std::string line = h.dump() + "\n";
  os.write(line.data(), std::streamsize(line.size()));
  for (int a = 0; a < 3; ++a) {
    for (double x : f.c[a]) {
      unsigned char buf[8];
      std::uint64_t u;
      std::memcpy(&u, &x, 8);
      for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>((u >> (8 * b)) & 0xff);
      os.write(reinterpret_cast<const char*>(buf), 8);
    }
  }
}

RealVectorField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  auto h = nlohmann::json::parse(line);
  if (h.at("dtype").get<std::string>() != "f64le") throw std::runtime_error("unsupported dtype");
  if (h.at("components").get<int>() != 3) throw std::runtime_error("expected 3 components");
  Grid3 g(h.at("n").get<int>(), h.at("lambda").get<double>());
  RealVectorField f(g);
  for (int a = 0; a < 3; ++a) {
    for (auto& x : f.c[a]) {
      unsigned char buf[8];
      is.read(reinterpret_cast<char*>(buf), 8);
      if (!is) throw std::runtime_error("truncated field file");
      std::uint64_t u = 0;
      for (int b = 0; b < 8; ++b) u |= std::uint64_t(buf[b]) << (8 * b);
      std::memcpy(&x, &u, 8);
    }
  }
  return f;
}

}  // namespace emhd
