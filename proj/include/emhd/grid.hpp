#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace emhd {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Periodic cube of side 2*pi*lambda sampled with n points per axis.
/// Physical coordinates run over [-L/2, L/2) so the origin sits at the centre.
struct Grid3 {
  int n = 32;
  double lambda = 4.0;

  Grid3() = default;
  Grid3(int n_, double lambda_);

  std::size_t size() const { return std::size_t(n) * n * n; }
  double box_length() const;
  double spacing() const { return box_length() / n; }
  double cell_volume() const { double h = spacing(); return h * h * h; }
  double kmax() const { return n / (2.0 * lambda); }
  double coord(int i) const { return -0.5 * box_length() + i * spacing(); }

  /// signed lattice index of FFT slot i; the Nyquist slot maps to -n/2
  int mode(int i) const { return i < n / 2 ? i : i - n; }
  /// wavenumber used by every derivative multiplier (Nyquist component set to zero)
  double k_eff(int i) const { return (i == n / 2) ? 0.0 : mode(i) / lambda; }
  std::size_t index(int i, int j, int l) const { return (std::size_t(i) * n + j) * n + l; }

  bool operator==(const Grid3& o) const { return n == o.n && lambda == o.lambda; }
  bool operator!=(const Grid3& o) const { return !(*this == o); }
};

struct RealScalarField {
  Grid3 grid;
  std::vector<double> v;
  RealScalarField() = default;
  explicit RealScalarField(const Grid3& g) : grid(g), v(g.size(), 0.0) {}
};

struct SpectralScalarField {
  Grid3 grid;
  std::vector<cplx> v;
  bool real = true;
  SpectralScalarField() = default;
  explicit SpectralScalarField(const Grid3& g, bool is_real = true) : grid(g), v(g.size()), real(is_real) {}
};

/// Samples of (B^1, B^2, B^3) on the grid, C order with the last index fastest.
struct RealVectorField {
  Grid3 grid;
  std::array<std::vector<double>, 3> c;
  RealVectorField() = default;
  explicit RealVectorField(const Grid3& g);
  bool all_finite() const;
};

/// Unitary DFT coefficients of a vector field.
struct SpectralVectorField {
  Grid3 grid;
  std::array<std::vector<cplx>, 3> c;
  bool real = true;
  SpectralVectorField() = default;
  explicit SpectralVectorField(const Grid3& g, bool is_real = true);

  SpectralVectorField& operator+=(const SpectralVectorField& o);
  SpectralVectorField& operator-=(const SpectralVectorField& o);
  SpectralVectorField& operator*=(double s);
};

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator*(double s, SpectralVectorField a);
/// a + s*b
void axpy(SpectralVectorField& a, double s, const SpectralVectorField& b);

// transforms
SpectralVectorField fft_forward(const RealVectorField& f);
RealVectorField fft_inverse(const SpectralVectorField& f);
SpectralScalarField fft_forward(const RealScalarField& f);
RealScalarField fft_inverse(const SpectralScalarField& f);

/// raw unitary transforms on contiguous complex data, dims = 1, 2 or 3 (cube)
void fft_raw(int dims, int n, const cplx* in, cplx* out, bool forward);

// differential operators (coefficientwise)
SpectralVectorField curl(const SpectralVectorField& f);
SpectralScalarField divergence(const SpectralVectorField& f);
SpectralVectorField gradient(const SpectralScalarField& g);
SpectralVectorField leray_project(const SpectralVectorField& f);

/// coefficientwise multiplication by m(k) where k is the effective wavevector
using Multiplier = std::function<cplx(const Vec3& k)>;
SpectralScalarField apply_multiplier(const SpectralScalarField& f, const Multiplier& m);
SpectralVectorField apply_multiplier(const SpectralVectorField& f, const Multiplier& m);
/// |D|^s (zero mode mapped to zero for s < 0)
SpectralVectorField abs_d_pow(const SpectralVectorField& f, double s);
/// <D>^s = (1 + |D|^2)^{s/2}
SpectralVectorField japanese_d_pow(const SpectralVectorField& f, double s);

/// 2/3-rule truncation: zero every mode with |m_i| > n/3 on some axis
void dealias(SpectralVectorField& f);
void dealias(SpectralScalarField& f);
bool dealias_keeps(const Grid3& g, int i, int j, int l);

/// pointwise products in physical space
RealVectorField cross(const RealVectorField& a, const RealVectorField& b);
RealScalarField dot(const RealVectorField& a, const RealVectorField& b);
RealVectorField scale(const RealScalarField& s, const RealVectorField& a);

// norms and inner products with the box measure
double l2_norm(const RealVectorField& f);
double l2_norm(const SpectralVectorField& f);
double l2_norm(const RealScalarField& f);
double l2_inner(const RealVectorField& a, const RealVectorField& b);
double max_abs_divergence(const SpectralVectorField& f);
/// H^s norm with weight <k>^s
double hs_norm(const SpectralVectorField& f, double s);
double max_abs(const SpectralVectorField& f);

/// samples of a closed-form vector field at the grid points
RealVectorField sample(const Grid3& g, const std::function<Vec3(const Vec3&)>& f);
RealScalarField sample_scalar(const Grid3& g, const std::function<double(const Vec3&)>& f);
/// add a constant to every sample of a spectral field
void add_constant(SpectralVectorField& f, const Vec3& c);
Vec3 mean(const SpectralVectorField& f);

/// Binary field file: one JSON header line then raw little-endian f64 samples.
void write_field(const std::string& path, const RealVectorField& f);
RealVectorField read_field(const std::string& path);

}  // namespace emhd
