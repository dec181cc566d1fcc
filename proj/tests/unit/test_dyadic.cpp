#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emhd/cutoffs.hpp"
#include "emhd/dyadic.hpp"
#include "emhd/solver.hpp"
#include "random_fields.hpp"

using namespace emhd;

namespace {

PlaneSeries random_series(const Grid3& g, int steps, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PlaneSeries p{g, dt, {}};
  for (int t = 0; t < steps; ++t) {
    std::vector<double> m(g.n);
    for (double& v : m) v = u(rng);
    p.mass.push_back(m);
  }
  return p;
}

/// sup over every level and every sharp slab of 2^{-l/2} (L^2_t L^2 mass)^{1/2}
double le_brute_force(const PlaneSeries& p) {
  const Grid3& g = p.grid;
  const auto w = p.time_weights();
  std::vector<double> planes(g.n, 0.0);
  for (std::size_t t = 0; t < p.steps(); ++t)
    for (int l = 0; l < g.n; ++l) planes[l] += w[t] * p.mass[t][l];
  double best = 0.0;
  for (int level = 0; level <= slab_level_max(g); ++level) {
    const double h = std::ldexp(1.0, level);
    const int j0 = int(std::floor(g.coord(0) / h)), j1 = int(std::floor(g.coord(g.n - 1) / h));
    for (int j = j0; j <= j1; ++j) {
      double m = 0.0;
      for (int l = 0; l < g.n; ++l)
        if (g.coord(l) >= j * h && g.coord(l) < (j + 1) * h) m += planes[l] * g.spacing();
      best = std::max(best, std::sqrt(m) / std::sqrt(h));
    }
  }
  return best;
}

}  // namespace

TEST(Dyadic, ShellsOfASingleMode) {
  const Grid3 g(32, 2.0);
  const RealVectorField f = sample(g, [](const Vec3& x) { return Vec3{0, std::cos(1.5 * x[0]), 0}; });
  const SpectralVectorField F = fft_forward(f);
  int hit = 0;
  double total = 0.0;
  for (int k = 0; k <= lp_top_shell(g); ++k) {
    const double m = l2_norm(lp_project(k, F));
    if (m > 1e-12 * l2_norm(F)) ++hit;
    EXPECT_NEAR(m, phi_k(k, 1.5) * l2_norm(F), 1e-12);
    total += phi_k(k, 1.5);
  }
  EXPECT_LE(hit, 2);
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Dyadic, DistantShellsAreOrthogonal) {
  const Grid3 g(32, 2.0);
  const SpectralVectorField f = fixtures::random_solenoidal(g, 15, 1.0, 4, 0.0);
  for (int k = 0; k <= lp_top_shell(g); ++k)
    for (int j = k + 2; j <= lp_top_shell(g); ++j) EXPECT_LT(max_abs(lp_project(k, lp_project(j, f))), 1e-15);
}

TEST(Dyadic, PartialFlagNearNyquist) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField f = fixtures::random_solenoidal(g, 7, 1.0, 5, 0.0);
  bool partial = false;
  lp_project(1, f, &partial);
  EXPECT_FALSE(partial);
  lp_project(lp_top_shell(g), f, &partial);
  EXPECT_TRUE(partial);
}

TEST(Dyadic, SlabCutoffsAreSupportedInTheDoubledInterval) {
  const Grid3 g(64, 2.0);
  for (int level = 0; level <= slab_level_max(g); ++level) {
    const SlabPartition part(level, g.box_length());
    for (int j = part.first(); j <= part.last(); ++j) {
      const double c = 0.5 * (part.lo(j) + part.hi(j)), h = part.width();
      for (int l = 0; l < g.n; ++l) {
        const double z = g.coord(l);
        if (std::abs(z - c) > h) EXPECT_EQ(part.cutoff(j, z), 0.0);
      }
    }
  }
}

TEST(Dyadic, PlaneMassAgreesAcrossRepresentations) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField f = fixtures::random_solenoidal(g, 5, 1.0, 6);
  const auto a = plane_mass(f);
  const auto b = plane_mass(fft_inverse(f));
  double sum = 0.0;
  for (int l = 0; l < g.n; ++l) {
    EXPECT_NEAR(a[l], b[l], 1e-14);
    sum += a[l] * g.spacing();
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Dyadic, Ell1NormBasics) {
  const Grid3 g(32, 2.0);
  EXPECT_EQ(ell1_hs_norm(1.0, SpectralVectorField(g)), 0.0);
  const SpectralVectorField f = fixtures::random_solenoidal(g, 6, 1.0, 7);
  EXPECT_NEAR(ell1_hs_norm(1.0, 2.5 * f), 2.5 * ell1_hs_norm(1.0, f), 1e-12);
  const SpectralVectorField h = fixtures::random_solenoidal(g, 6, 1.0, 8);
  EXPECT_LE(ell1_hs_norm(1.0, f + h), ell1_hs_norm(1.0, f) + ell1_hs_norm(1.0, h) + 1e-10);
}

TEST(Dyadic, Ell1NormDominatesTheShellNorm) {
  const Grid3 g(32, 2.0);
  const RealVectorField f = sample(g, [](const Vec3& x) {
    return Vec3{std::exp(-x[2] * x[2]) * std::cos(4 * x[2]), 0.0, 0.0};
  });
  const SpectralVectorField F = lp_project(2, fft_forward(f));
  const double s = 1.5;
  EXPECT_GE(ell1_hs_norm(s, F), std::pow(2.0, 2 * s) * l2_norm(F) - 1e-12);
}

TEST(Dyadic, LocalEnergyNormMatchesBruteForce) {
  const Grid3 g(32, 2.0);
  const PlaneSeries ones{g, 0.1, std::vector<std::vector<double>>(11, std::vector<double>(g.n, 1.0))};
  EXPECT_NEAR(le_norm(ones), le_brute_force(ones), 1e-12);
  for (int trial = 0; trial < 5; ++trial) {
    const PlaneSeries p = random_series(g, 7, 0.2, 10 + trial);
    EXPECT_NEAR(le_norm(p), le_brute_force(p), 1e-12);
    EXPECT_NEAR(le_norm(p.scaled(3.0)), 3.0 * le_norm(p), 1e-12);
  }
}

TEST(Dyadic, LocalEnergyDualityWithTheUpperBound) {
  const Grid3 g(32, 2.0);
  const double area = g.box_length() * g.box_length();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const int steps = 5;
    const double dt = 0.25;
    PlaneSeries pu{g, dt, {}}, pv{g, dt, {}};
    std::vector<std::vector<double>> u(steps, std::vector<double>(g.n)), v = u;
    for (int t = 0; t < steps; ++t) {
      std::vector<double> mu(g.n), mv(g.n);
      for (int l = 0; l < g.n; ++l) {
        u[t][l] = nd(rng) * std::exp(-0.1 * (trial % 3) * std::abs(g.coord(l)));
        v[t][l] = nd(rng);
        mu[l] = area * u[t][l] * u[t][l];
        mv[l] = area * v[t][l] * v[t][l];
      }
      pu.mass.push_back(mu);
      pv.mass.push_back(mv);
    }
    const auto w = pu.time_weights();
    double pairing = 0.0;
    for (int t = 0; t < steps; ++t)
      for (int l = 0; l < g.n; ++l) pairing += w[t] * g.spacing() * area * u[t][l] * v[t][l];
    EXPECT_LE(std::abs(pairing), le_norm(pu) * le_star_norm(pv).value + 1e-10);
  }
}

TEST(Dyadic, SpaceTimeNormsAreHomogeneous) {
  const Grid3 g(32, 2.0);
  const PlaneSeries p = random_series(g, 6, 0.1, 42);
  const PlaneSeries q = p.scaled(2.0);
  EXPECT_NEAR(xk_norm(3, q), 2.0 * xk_norm(3, p), 1e-12);
  EXPECT_NEAR(yk_norm(3, q), 2.0 * yk_norm(3, p), 1e-12);
  EXPECT_NEAR(linf_l2(q), 2.0 * linf_l2(p), 1e-12);
  EXPECT_NEAR(l1_l2(q), 2.0 * l1_l2(p), 1e-12);
  EXPECT_LE(ell_xk_norm(2, INFINITY, p), ell_xk_norm(2, 1.0, p) + 1e-12);
}

TEST(Dyadic, EmbeddingOfSlabSummedNorms) {
  const Grid3 g(32, 2.0);
  const SpectralVectorField b0 = fixtures::random_solenoidal(g, 8, 1.0, 12, 1.0);
  std::vector<SpectralVectorField> frames;
  for (int i = 0; i < 5; ++i) frames.push_back(propagate_constant(b0, 0.05 * i));
  const SpaceTimeProfile p = full_profile(frames, 0.05);
  for (int k = 0; k <= 4; ++k) {
    const double sup = ell_xk_norm(k, INFINITY, p.whole);
    const double plain = xk_norm(k, p.whole);
    const double sum = ell_xk_norm(k, 1.0, p.whole);
    EXPECT_LE(sup, 4.0 * plain);
    EXPECT_LE(plain, 4.0 * sum);
  }
  EXPECT_GT(xs_norm(1.0, p), 0.0);
  EXPECT_GT(ys_norm(1.0, p), 0.0);
}
