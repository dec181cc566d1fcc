#pragma once

#include <Eigen/Dense>

#include "emhd/fields.hpp"

namespace emhd {

/// (x, xi) with xi a nonzero covector
struct PhasePoint {
  Vec3 x{0, 0, 0};
  Vec3 xi{0, 0, 1};
  PhasePoint() = default;
  PhasePoint(const Vec3& x_, const Vec3& xi_);
};

/// p_B(x, xi) = B(x).xi |xi|
double principal_symbol(const FieldEvaluator& B, const PhasePoint& p);
double principal_symbol(const Vec3& B, const Vec3& xi);

struct Projections {
  Eigen::Matrix3cd plus, zero, minus;
};

/// Eigenprojections of the cross product xi x.
/// zero = xi xi^T/|xi|^2, plus/minus = (I - zero -+ i (xi x)/|xi|) / 2, so that
/// plus(D) = (1 + |D|^-1 curl)/2 on divergence-free fields.
Projections projections(const Vec3& xi);

/// matrix of the cross product: cross_matrix(v) u = v x u
Eigen::Matrix3d cross_matrix(const Vec3& v);

/// Principal symbol of b -> curl((curl b) x B): -(B.xi) (xi x).
Eigen::Matrix3cd principal_matrix(const Vec3& B, const Vec3& xi);

/// Frobenius norm of principal_matrix - i p plus + i p minus.
double diagonalization_residual(const FieldEvaluator& B, const PhasePoint& p);
double diagonalization_residual(const Vec3& B, const Vec3& xi);

/// +-(xi1 xi3/|xi|, xi2 xi3/|xi|, (xi1^2 + xi2^2 + 2 xi3^2)/|xi|)
Vec3 group_velocity(int sign, const Vec3& xi);

/// symmetric part of grad B at x
Mat3 deformation_tensor(const FieldEvaluator& B, const Vec3& x);
Mat3 deformation_tensor(const Mat3& dB);

/// gradient of p in xi and in x at a field sample
Vec3 symbol_dxi(const FieldSample& s, const Vec3& xi);
Vec3 symbol_dx(const FieldSample& s, const Vec3& xi);

/// angle between two vectors in radians
double angle_between(const Vec3& a, const Vec3& b);

/// arctan(1/(2 sqrt 2)), the half-angle of the group-velocity cone
double cone_half_angle();

}  // namespace emhd
