#pragma once

#include <memory>
#include <string>
#include <vector>

#include "emhd/grid.hpp"

namespace emhd {

using Mat3 = std::array<Vec3, 3>;

/// Value and derivatives of B at one point.
/// dB[a][b] = d_a B^b,  d2B[a][c][b] = d_a d_c B^b.
struct FieldSample {
  Vec3 B{};
  Mat3 dB{};
  std::array<Mat3, 3> d2B{};
};

/// Off-grid evaluation of a vector field and its first two derivatives.
class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;
  /// order 0: B only, 1: B and dB, 2: everything
  virtual FieldSample eval(const Vec3& x, int order = 2) const = 0;
  virtual bool is_uniform() const { return false; }
  virtual std::string name() const = 0;

  Vec3 B(const Vec3& x) const { return eval(x, 0).B; }
  Mat3 grad(const Vec3& x) const { return eval(x, 1).dB; }
};

using FieldPtr = std::shared_ptr<const FieldEvaluator>;

class UniformField final : public FieldEvaluator {
 public:
  explicit UniformField(const Vec3& b = {0, 0, 1}) : b_(b) {}
  FieldSample eval(const Vec3&, int) const override;
  bool is_uniform() const override { return true; }
  std::string name() const override { return "uniform"; }
  const Vec3& value() const { return b_; }

 private:
  Vec3 b_;
};

/// B(x) = B0 + G x with G[b][a] = d_a B^b.
class AffineField final : public FieldEvaluator {
 public:
  AffineField(const Vec3& b0, const Mat3& grad) : b0_(b0), g_(grad) {}
  FieldSample eval(const Vec3& x, int) const override;
  std::string name() const override { return "affine"; }

 private:
  Vec3 b0_;
  Mat3 g_;
};

/// Gaussian potential a(x) = exp(-|x-c|^2 / (2 w^2)); contributes delta * grad a x dir.
struct Bump {
  double delta = 0.0;
  Vec3 center{0, 0, 0};
  double width = 1.0;
  Vec3 dir{1, 0, 0};
};

/// background + sum of curls of Gaussian vector potentials (divergence free).
class BumpField final : public FieldEvaluator {
 public:
  BumpField(const Vec3& background, std::vector<Bump> bumps) : bg_(background), bumps_(std::move(bumps)) {}
  FieldSample eval(const Vec3& x, int order) const override;
  std::string name() const override { return "bump"; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  const Vec3& background() const { return bg_; }

 private:
  Vec3 bg_;
  std::vector<Bump> bumps_;
};

/// Sparse Fourier interpolant: B = mean + 2 Re sum_j c_j e^{i k_j x} over a half space of modes.
/// When extend_uniform is set, the interpolant is used for |x^3| <= L/2 and e3 outside.
class ModeSumField final : public FieldEvaluator {
 public:
  struct Mode {
    Vec3 k;
    std::array<cplx, 3> c;
  };
  ModeSumField(const Vec3& mean, std::vector<Mode> modes, double half_height = 0.0)
      : mean_(mean), modes_(std::move(modes)), half_height_(half_height) {}
  /// build from grid samples keeping coefficients above rel_cut * max
  static std::shared_ptr<ModeSumField> from_grid(const SpectralVectorField& f, double rel_cut = 1e-13,
                                                 bool extend_uniform = true);
  FieldSample eval(const Vec3& x, int order) const override;
  std::string name() const override { return "modes"; }
  std::size_t mode_count() const { return modes_.size(); }

 private:
  Vec3 mean_;
  std::vector<Mode> modes_;
  double half_height_;
};

/// Tensor-product 4-point Lagrange interpolation of B and its spectral derivatives.
/// Error O(h^4); outside |x^3| > L/2 the field is extended by e3.
class LagrangeGridField final : public FieldEvaluator {
 public:
  explicit LagrangeGridField(const SpectralVectorField& f);
  FieldSample eval(const Vec3& x, int order) const override;
  std::string name() const override { return "lagrange"; }

 private:
  Grid3 grid_;
  std::vector<std::vector<double>> data_;  // 3 + 9 + 18 component samples
  double interp(int comp, const Vec3& x) const;
};

/// field pulled back to grid samples
RealVectorField sample_field(const FieldEvaluator& f, const Grid3& g);

/// Mode-sum field assembled from real cosine modes a * v * cos(k.x + phase).
struct CosMode {
  Vec3 k;
  Vec3 v;
  double amp = 1.0;
  double phase = 0.0;
};
std::shared_ptr<ModeSumField> make_cos_modes(const Vec3& mean, const std::vector<CosMode>& modes);

/// Bump whose field vanishes at one point: e3 + delta grad a x e1 with delta = w e^{1/2}.
/// The zero sits at center - w e2.
std::shared_ptr<BumpField> make_null_point_field(const Vec3& center, double width);

double norm3(const Vec3& v);
double dot3(const Vec3& a, const Vec3& b);
Vec3 cross3(const Vec3& a, const Vec3& b);

}  // namespace emhd
