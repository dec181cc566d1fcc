#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emhd/cutoffs.hpp"
#include "emhd/dyadic.hpp"
#include "emhd/psdo.hpp"
#include "random_fields.hpp"

using namespace emhd;

namespace {
CField random_cfield(const Lattice& L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CField u(L.size());
  for (auto& z : u) z = cplx(nd(rng), nd(rng));
  return u;
}

double max_diff(const CField& a, const CField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST(Psdo, LatticeFftIsUnitary) {
  const Lattice L(1, 128, 1.5);
  const CField u = random_cfield(L, 1);
  const CField U = lattice_fft(L, u, true);
  EXPECT_NEAR(lattice_norm(U), lattice_norm(u), 1e-12 * lattice_norm(u));
  EXPECT_LT(max_diff(lattice_fft(L, U, false), u), 1e-12);
}

TEST(Psdo, MultiplierSymbolQuantizesToTheFourierMultiplier) {
  const Lattice L(1, 64, 1.0);
  const CField u = random_cfield(L, 2);
  const MultFn m = [](const Vec3& xi) { return cplx(1.0 / (1.0 + xi[0] * xi[0]), xi[0]); };
  const CField a = quantize_left(L, SymbolFn::multiplier(m, 0.0), u);
  const CField b = apply_fourier_multiplier(L, u, m);
  EXPECT_LT(max_diff(a, b), 1e-12);
}

TEST(Psdo, CoefficientSymbolQuantizesToAPointwiseProduct) {
  const Lattice L(1, 64, 1.0);
  const CField u = random_cfield(L, 3);
  const CoefFn c = [](const Vec3& x) { return cplx(std::cos(x[0]), 0.5); };
  const CField a = quantize_left(L, SymbolFn::coefficient(c), u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(std::abs(a[i] - c(L.point(i)) * u[i]), 0.0, 1e-12);
}

TEST(Psdo, SeparableAndDirectQuantizationAgree) {
  const Lattice L(1, 32, 1.0);
  const CField u = random_cfield(L, 4);
  const CoefFn c = [](const Vec3& x) { return cplx(1.0 + 0.3 * std::sin(x[0]), 0.0); };
  const MultFn m = [](const Vec3& xi) { return cplx(std::sqrt(1.0 + xi[0] * xi[0]), 0.0); };
  const SymbolFn sep = SymbolFn::separable({SeparableTerm{c, m}}, 1.0);
  const SymbolFn gen = SymbolFn::general([c, m](const Vec3& x, const Vec3& xi) { return c(x) * m(xi); }, 1.0);
  EXPECT_LT(max_diff(quantize_left(L, sep, u), quantize_left(L, gen, u)), 1e-10);
}

TEST(Psdo, OperatorNormOfAMultiplierIsItsSupremum) {
  const Lattice L(1, 64, 1.0);
  const MultFn m = [](const Vec3& xi) { return cplx(1.0 + 1.0 / (1.0 + xi[0] * xi[0]), 0.0); };
  const NormEstimate e = op_norm_estimate(left_op(L, SymbolFn::multiplier(m, 0.0)));
  double sup = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) sup = std::max(sup, std::abs(m(L.wave(i))));
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.value, sup, 1e-6);
}

TEST(Psdo, ShellOperatorsAreContractions) {
  const Lattice L(1, 256, 2.0);
  for (int k = 0; k < 6; ++k) EXPECT_LE(op_norm_estimate(shell_op(L, k)).value, 1.0 + 1e-9);
}

TEST(Psdo, FitSlopeIsExactOnLines) {
  EXPECT_NEAR(fit_slope({1, 2, 3, 4}, {3, 1, -1, -3}), -2.0, 1e-14);
  EXPECT_NEAR(fit_slope({0, 1}, {5, 5.5}), 0.5, 1e-14);
}

TEST(Psdo, HalfOrderPairMatchesClosedForms) {
  const Lattice L(1, 64, 2.0);
  const CompositionPair p = half_order_pair(L, 1, 0.5);
  const Vec3 x{0.7, 0, 0}, xi{3.0, 0, 0};
  const double w = 1.0 / 2.0, jb = std::sqrt(10.0);
  EXPECT_NEAR(std::abs(p.a.eval(x, xi) - cplx(std::sqrt(jb), 0.0)), 0.0, 1e-14);
  const cplx b = p.b.eval(x, xi);
  EXPECT_NEAR(std::abs(b - cplx(1.0 + 0.5 * std::cos(w * 0.7), 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p.ab.eval(x, xi) - p.a.eval(x, xi) * b), 0.0, 1e-14);
  const cplx corr = cplx(-0.5 * w * std::sin(w * 0.7), 0.0) * cplx(0.0, -0.5 * 3.0 * std::pow(jb, -1.5));
  EXPECT_NEAR(std::abs(p.correction.eval(x, xi) - corr), 0.0, 1e-14);
}

TEST(Psdo, ParaproductWithConstantIsTheHighPart) {
  const Grid3 g(16, 0.25);
  const SpectralVectorField u = fixtures::random_solenoidal(g, 7, 1.0, 5, 0.0);
  const SpectralScalarField one = fft_forward(sample_scalar(g, [](const Vec3&) { return 1.0; }));
  const SpectralVectorField t = paraproduct(one, u, 2);
  SpectralVectorField high(g, true);
  for (int k = 3; k <= lp_top_shell(g); ++k) high += lp_project(k, u);
  dealias(high);
  EXPECT_LT(l2_norm(t - high), 1e-12);
}

TEST(Psdo, ParalinearizationErrorHasTwoEqualForms) {
  const Grid3 g(16, 0.25);
  SpectralVectorField b = fixtures::random_solenoidal(g, 6, 1.0, 6);
  add_constant(b, {0.1, 0.0, 1.0});
  const SpectralVectorField lhs = paralin_error(b, 2);
  const SpectralVectorField rhs = paralin_error_balanced(b, 2);
  EXPECT_LT(l2_norm(lhs - rhs), 1e-12 * l2_norm(lhs));
}
