#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "emhd/solver.hpp"
#include "random_fields.hpp"

using namespace emhd;

TEST(Solver, WhistlerProjectionsResolveDivergenceFreeFields) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField b = fixtures::random_solenoidal(g, 5, 1.0, 1);
  const SpectralVectorField p = whistler_projection(b, 1), m = whistler_projection(b, -1);
  EXPECT_LT(l2_norm(p + m - b), 1e-13);
  EXPECT_LT(l2_norm(whistler_projection(p, 1) - p), 1e-13);
  EXPECT_LT(l2_norm(whistler_projection(p, -1)), 1e-13);
}

TEST(Solver, ConstantPropagatorIsAnIsometricGroup) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField b = fixtures::random_solenoidal(g, 6, 1.0, 2);
  const SpectralVectorField a = propagate_constant(b, 0.3);
  EXPECT_NEAR(l2_norm(a), 1.0, 1e-13);
  EXPECT_LT(l2_norm(propagate_constant(a, 0.2) - propagate_constant(b, 0.5)), 1e-13);
  EXPECT_LT(l2_norm(propagate_constant(a, -0.3) - b), 1e-13);
  EXPECT_LT(max_abs_divergence(a), 1e-13);
}

TEST(Solver, UniformAndGeneralLinearizedRightHandSidesAgree) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField b = fixtures::random_solenoidal(g, 5, 1.0, 3);
  SpectralVectorField bg(g, true);
  add_constant(bg, {0.2, -0.1, 1.0});
  EXPECT_LT(l2_norm(rhs_linearized(bg, b) - rhs_linearized_uniform({0.2, -0.1, 1.0}, b)),
            1e-11 * l2_norm(rhs_linearized_uniform({0.2, -0.1, 1.0}, b)));
}

TEST(Solver, NonlinearRightHandSideLinearizesAroundE3) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField b = fixtures::random_solenoidal(g, 3, 1.0, 4);
  const SpectralVectorField lin = rhs_linearized_uniform({0, 0, 1}, b);
  double prev = INFINITY;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    SpectralVectorField B = eps * b;
    add_constant(B, {0, 0, 1});
    const double err = l2_norm((1.0 / eps) * rhs_nonlinear(B) - lin) / l2_norm(lin);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Solver, ModeNamesRoundTrip) {
  for (SolverMode m : {SolverMode::Nonlinear, SolverMode::Linearized, SolverMode::Diagonalized, SolverMode::Constant})
    EXPECT_EQ(solver_mode_from_string(to_string(m)), m);
  EXPECT_THROW(solver_mode_from_string("implicit"), std::invalid_argument);
}

TEST(Solver, ConstantModeNeedsTheUniformBackground) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField b = fixtures::random_solenoidal(g, 3, 1.0, 5);
  SpectralVectorField bg = fixtures::uniform_e3(g);
  EXPECT_NO_THROW(make_state(SolverMode::Constant, b, bg));
  add_constant(bg, {0.1, 0, 0});
  EXPECT_THROW(make_state(SolverMode::Constant, b, bg), std::invalid_argument);
}

TEST(Solver, CflViolationIsRejected) {
  const Grid3 g(16, 1.0);
  SolverState s = make_state(SolverMode::Linearized, fixtures::random_solenoidal(g, 3, 1.0, 6));
  SolveOptions opt;
  opt.T = 1.0;
  opt.dt = 2.0 * cfl_bound(s);
  EXPECT_THROW(solve(s, opt), std::invalid_argument);
  opt.enforce_cfl = false;
  opt.T = opt.dt;
  EXPECT_FALSE(solve(s, opt).cfl_ok);
}

TEST(Solver, EveryModeMatchesTheExactPropagatorOnE3) {
  const Grid3 g(16, 1.0);
  const SpectralVectorField b = fixtures::random_solenoidal(g, 3, 1.0, 7);
  const SpectralVectorField exact = propagate_constant(b, 0.2);
  for (SolverMode m : {SolverMode::Linearized, SolverMode::Diagonalized, SolverMode::Constant}) {
    SolverState s = make_state(m, b);
    SolveOptions opt;
    opt.T = 0.2;
    opt.dt = 0.002;
    solve(s, opt);
    EXPECT_LT(l2_norm(s.field() - exact), 1e-8) << to_string(m);
    EXPECT_NEAR(s.t, 0.2, 1e-14);
  }
}

TEST(Solver, NonlinearEnergyIsConserved) {
  const Grid3 g(16, 1.0);
  SpectralVectorField B = fixtures::random_solenoidal(g, 3, 1.0, 8);
  add_constant(B, {0, 0, 1});
  SolverState s = make_state(SolverMode::Nonlinear, B);
  SolveOptions opt;
  opt.T = 0.1;
  solve(s, opt);
  EXPECT_FALSE(s.blown_up);
  EXPECT_NEAR(s.history.back().energy, s.history.front().energy, 1e-9 * s.history.front().energy);
  EXPECT_LT(s.history.back().max_divergence, 1e-12);
}

TEST(Solver, ReducedSystemConservesMeans) {
  TwoPointFiveDState r = make_2p5d(
      32, 1.0, [](double x, double y) { return 0.4 * std::sin(x) * std::cos(y) + 0.1 * std::cos(2 * x); },
      [](double x, double y) { return 1.0 + 0.2 * std::cos(x - y); });
  const double psi0 = integral_2p5d(r, r.psi), phi0 = integral_2p5d(r, r.phi);
  solve_2p5d(r, 0.1, 0.002);
  EXPECT_NEAR(integral_2p5d(r, r.psi), psi0, 1e-10);
  EXPECT_NEAR(integral_2p5d(r, r.phi), phi0, 1e-10);
  EXPECT_NEAR(r.t, 0.1, 1e-14);
}

TEST(Solver, ReductionInvertsTheLift) {
  TwoPointFiveDState r = make_2p5d(
      16, 1.0, [](double x, double y) { return 0.4 * std::sin(x) * std::cos(y); },
      [](double x, double y) { return 1.0 + 0.2 * std::cos(x - y); });
  const SpectralVectorField B = lift_2p5d(r);
  EXPECT_LT(l2_norm(lift_2p5d(reduce_2p5d(B)) - B), 1e-13);
  EXPECT_THROW(reduce_2p5d(fixtures::random_solenoidal(B.grid, 2, 1.0, 9)), std::invalid_argument);
  SpectralVectorField shifted = B;
  add_constant(shifted, {0.1, 0, 0});
  EXPECT_THROW(reduce_2p5d(shifted), std::invalid_argument);
}
