#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "emhd/grid.hpp"
#include "random_fields.hpp"

using namespace emhd;

TEST(Grid, CoordinatesCenterTheBox) {
  const Grid3 g(16, 2.0);
  EXPECT_DOUBLE_EQ(g.box_length(), 4.0 * M_PI);
  EXPECT_DOUBLE_EQ(g.coord(0), -2.0 * M_PI);
  EXPECT_NEAR(g.coord(8), 0.0, 1e-15);
  EXPECT_EQ(g.mode(8), -8);
  EXPECT_EQ(g.k_eff(8), 0.0);
  EXPECT_DOUBLE_EQ(g.k_eff(3), 1.5);
}

TEST(Grid, RoundTripAndParseval) {
  const Grid3 g(16, 1.0);
  const RealVectorField f = sample(g, [](const Vec3& x) {
    return Vec3{std::sin(x[0]) + 0.3, std::cos(2 * x[1] + x[2]), std::exp(std::sin(x[2]))};
  });
  const SpectralVectorField F = fft_forward(f);
  const RealVectorField back = fft_inverse(F);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < f.c[a].size(); ++i) ASSERT_NEAR(back.c[a][i], f.c[a][i], 1e-13);
  EXPECT_NEAR(l2_norm(F), l2_norm(f), 1e-12 * l2_norm(f));
}

TEST(Grid, SpectralDerivativeMatchesClosedForm) {
  const Grid3 g(32, 2.0);
  RealScalarField s = sample_scalar(g, [](const Vec3& x) { return std::sin(x[0] / 2.0) * std::cos(x[2]); });
  const RealVectorField d = fft_inverse(gradient(fft_forward(s)));
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l) {
        const double x = g.coord(i), z = g.coord(l);
        const std::size_t id = g.index(i, j, l);
        err = std::max(err, std::abs(d.c[0][id] - 0.5 * std::cos(x / 2.0) * std::cos(z)));
        err = std::max(err, std::abs(d.c[1][id]));
        err = std::max(err, std::abs(d.c[2][id] + std::sin(x / 2.0) * std::sin(z)));
      }
  EXPECT_LT(err, 1e-12);
}

TEST(Grid, LerayProjectionIsIdempotentAndKeepsMean) {
  const Grid3 g(16, 1.0);
  SpectralVectorField f = fft_forward(sample(g, [](const Vec3& x) {
    return Vec3{std::sin(x[0]), std::cos(x[0] + x[1]), 0.7 + std::sin(x[2])};
  }));
  const SpectralVectorField p = leray_project(f);
  EXPECT_LT(max_abs_divergence(p), 1e-13);
  EXPECT_LT(max_abs(leray_project(p) - p), 1e-14);
  EXPECT_NEAR(mean(p)[2], 0.7, 1e-14);
}

TEST(Grid, DealiasRemovesOuterThird) {
  const Grid3 g(16, 1.0);
  SpectralVectorField f(g, false);
  for (auto& c : f.c)
    for (auto& v : c) v = 1.0;
  dealias(f);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l) {
        const bool keep = std::abs(g.mode(i)) <= 5 && std::abs(g.mode(j)) <= 5 && std::abs(g.mode(l)) <= 5;
        ASSERT_EQ(std::abs(f.c[0][g.index(i, j, l)]) > 0.0, keep);
        ASSERT_EQ(dealias_keeps(g, i, j, l), keep);
      }
}

TEST(Grid, SobolevNormOfSingleMode) {
  const Grid3 g(16, 1.0);
  const RealVectorField f = sample(g, [](const Vec3& x) { return Vec3{0.0, 0.0, std::cos(3 * x[0])}; });
  const SpectralVectorField F = fft_forward(f);
  EXPECT_NEAR(hs_norm(F, 2.0), 10.0 * l2_norm(F), 1e-11);
  EXPECT_NEAR(l2_norm(japanese_d_pow(F, 2.0)), 10.0 * l2_norm(F), 1e-11);
  EXPECT_NEAR(l2_norm(abs_d_pow(F, 1.0)), 3.0 * l2_norm(F), 1e-11);
}

TEST(Grid, FieldFileRoundTrip) {
  const Grid3 g(8, 0.5);
  const RealVectorField f = sample(g, [](const Vec3& x) { return Vec3{x[0], x[1] * x[2], 1.0}; });
  const std::string path = ::testing::TempDir() + "/roundtrip.field";
  write_field(path, f);
  const RealVectorField r = read_field(path);
  EXPECT_EQ(r.grid, g);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(r.c[a], f.c[a]);
  std::remove(path.c_str());
}

TEST(Grid, RandomSolenoidalIsRealAndDivergenceFree) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField f = fixtures::random_solenoidal(g, 4, 2.0, 9);
  EXPECT_NEAR(l2_norm(f), 2.0, 1e-12);
  EXPECT_LT(max_abs_divergence(f), 1e-13);
  const SpectralVectorField round = fft_forward(fft_inverse(f));
  EXPECT_LT(max_abs(round - f), 1e-13);
}
