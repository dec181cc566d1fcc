#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emhd/fields.hpp"
#include "emhd/symbols.hpp"

using namespace emhd;

namespace {
Vec3 random_vec(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return {nd(rng), nd(rng), nd(rng)};
}
}  // namespace

TEST(Symbols, PrincipalSymbolOfUniformField) {
  EXPECT_DOUBLE_EQ(principal_symbol(Vec3{0, 0, 1}, Vec3{3, 0, 4}), 20.0);
  EXPECT_DOUBLE_EQ(principal_symbol(Vec3{0, 0, 1}, Vec3{1, 0, 0}), 0.0);
}

TEST(Symbols, PlusProjectionIsAnEigenspaceOfTheCrossProduct) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 xi = random_vec(rng);
    const Projections P = projections(xi);
    const Eigen::Matrix3cd X = cross_matrix(xi).cast<cplx>();
    const double n = norm3(xi);
    EXPECT_LT((X * P.plus + cplx(0, n) * P.plus).cwiseAbs().maxCoeff(), 1e-12 * n);
    EXPECT_LT((X * P.minus - cplx(0, n) * P.minus).cwiseAbs().maxCoeff(), 1e-12 * n);
    EXPECT_LT((P.plus.adjoint() - P.plus).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Symbols, PrincipalMatrixSplitsIntoWhistlerModes) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 B = random_vec(rng), xi = random_vec(rng);
    const double p = principal_symbol(B, xi);
    const Projections P = projections(xi);
    const Eigen::Matrix3cd M = principal_matrix(B, xi);
    const Eigen::Matrix3cd expected = cplx(0, p) * P.plus - cplx(0, p) * P.minus;
    EXPECT_LT((M - expected).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + std::abs(p)));
  }
}

TEST(Symbols, GroupVelocityIsHomogeneousAndMatchesTheGradient) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec3 xi = random_vec(rng);
    const Vec3 v = group_velocity(1, xi);
    const Vec3 v2 = group_velocity(1, Vec3{2 * xi[0], 2 * xi[1], 2 * xi[2]});
    const Vec3 vm = group_velocity(-1, xi);
    FieldSample s;
    s.B = {0, 0, 1};
    const Vec3 g = symbol_dxi(s, xi);
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(v2[a], 2 * v[a], 1e-12 * norm3(v));
      EXPECT_NEAR(vm[a], -v[a], 1e-15);
      EXPECT_NEAR(g[a], v[a], 1e-12 * norm3(v));
    }
  }
}

TEST(Symbols, UniformFieldHasNoSpatialGradient) {
  FieldSample s;
  s.B = {0.3, -0.2, 1.0};
  const Vec3 d = symbol_dx(s, {1, 2, 3});
  for (double v : d) EXPECT_EQ(v, 0.0);
}

TEST(Symbols, DeformationTensorIsTheSymmetricGradient) {
  const BumpField f({0, 0, 1}, {Bump{0.4, {0.1, 0.2, 0.0}, 0.9, {0.3, 1.0, 0.2}}});
  const Vec3 x{0.3, -0.4, 0.5};
  const Mat3 D = deformation_tensor(f, x);
  const Mat3 G = f.grad(x);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(D[a][b], 0.5 * (G[a][b] + G[b][a]), 1e-14);
}

TEST(Symbols, ConeHalfAngle) { EXPECT_NEAR(cone_half_angle(), std::atan(1.0 / (2.0 * std::sqrt(2.0))), 1e-15); }
