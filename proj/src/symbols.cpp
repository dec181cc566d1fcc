#include "emhd/symbols.hpp"

#include <cmath>
#include <stdexcept>

namespace emhd {

PhasePoint::PhasePoint(const Vec3& x_, const Vec3& xi_) : x(x_), xi(xi_) {
  if (!(norm3(xi) > 0.0)) throw std::invalid_argument("phase point needs xi != 0");
}

double principal_symbol(const Vec3& B, const Vec3& xi) { return dot3(B, xi) * norm3(xi); }

double principal_symbol(const FieldEvaluator& B, const PhasePoint& p) {
  return principal_symbol(B.eval(p.x, 0).B, p.xi);
}

Eigen::Matrix3d cross_matrix(const Vec3& v) {
  Eigen::Matrix3d m;
  m << 0, -v[2], v[1], v[2], 0, -v[0], -v[1], v[0], 0;
  return m;
}

Projections projections(const Vec3& xi) {
  const double r = norm3(xi);
  if (!(r > 0.0)) throw std::invalid_argument("projections need xi != 0");
  const Eigen::Vector3d e(xi[0] / r, xi[1] / r, xi[2] / r);
  const Eigen::Matrix3d p0 = e * e.transpose();
  const Eigen::Matrix3cd rest = (Eigen::Matrix3d::Identity() - p0).cast<cplx>();
  const Eigen::Matrix3cd c = cplx(0, 1) * cross_matrix({e[0], e[1], e[2]}).cast<cplx>();
  Projections out;
  out.zero = p0.cast<cplx>();
  out.plus = 0.5 * (rest + c);
  out.minus = 0.5 * (rest - c);
  return out;
}

Eigen::Matrix3cd principal_matrix(const Vec3& B, const Vec3& xi) {
  return (-dot3(B, xi) * cross_matrix(xi)).cast<cplx>();
}

double diagonalization_residual(const Vec3& B, const Vec3& xi) {
  const auto pr = projections(xi);
  const double p = principal_symbol(B, xi);
  const cplx ip(0, p);
  return (principal_matrix(B, xi) - ip * pr.plus + ip * pr.minus).norm();
}

double diagonalization_residual(const FieldEvaluator& B, const PhasePoint& p) {
  return diagonalization_residual(B.eval(p.x, 0).B, p.xi);
}

Vec3 group_velocity(int sign, const Vec3& xi) {
  const double r = norm3(xi);
  if (!(r > 0.0)) throw std::invalid_argument("group velocity needs xi != 0");
  const double s = sign >= 0 ? 1.0 : -1.0;
  return {s * xi[0] * xi[2] / r, s * xi[1] * xi[2] / r,
          s * (xi[0] * xi[0] + xi[1] * xi[1] + 2.0 * xi[2] * xi[2]) / r};
}

Mat3 deformation_tensor(const Mat3& dB) {
  Mat3 d{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) d[a][b] = 0.5 * (dB[a][b] + dB[b][a]);
  return d;
}

Mat3 deformation_tensor(const FieldEvaluator& B, const Vec3& x) { return deformation_tensor(B.eval(x, 1).dB); }

Vec3 symbol_dxi(const FieldSample& s, const Vec3& xi) {
  const double r = norm3(xi);
  const double bx = dot3(s.B, xi);
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = s.B[a] * r + bx * xi[a] / r;
  return out;
}

Vec3 symbol_dx(const FieldSample& s, const Vec3& xi) {
  const double r = norm3(xi);
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = dot3(s.dB[a], xi) * r;
  return out;
}

double angle_between(const Vec3& a, const Vec3& b) {
  const double na = norm3(a), nb = norm3(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  // atan2 form keeps precision for nearly parallel vectors
  return std::atan2(norm3(cross3(a, b)), dot3(a, b));
}

double cone_half_angle() { return std::atan(1.0 / (2.0 * std::sqrt(2.0))); }

}  // namespace emhd
