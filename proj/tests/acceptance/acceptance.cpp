#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "emhd/certify.hpp"
#include "emhd/cutoffs.hpp"
#include "emhd/dyadic.hpp"
#include "emhd/fields.hpp"
#include "emhd/psdo.hpp"
#include "emhd/rays.hpp"
#include "emhd/smoothing.hpp"
#include "emhd/solver.hpp"
#include "emhd/symbols.hpp"
#include "random_fields.hpp"

using namespace emhd;

namespace {

// pinned tolerances
constexpr double kConeSlack = 1e-9;
constexpr double kConeArgmaxTol = 1e-6;
constexpr double kConeSeconds = 30.0;
constexpr double kGroupVelocityTol = 1e-14;
constexpr double kProjectionTol = 1e-13;
constexpr double kDiagSymbolTol = 1e-12;
constexpr double kFrequencyUniformTol = 1e-10;
constexpr double kFrequencyMinOrder = 3.5;
constexpr double kDiagResidualRandom = 1e-8;
constexpr double kDiagResidualE3 = 1e-10;
constexpr double kParalinTol = 1e-10;
constexpr double kParalinSeconds = 60.0;
constexpr double kLinearizedTol = 1e-8;
constexpr double kEnergyDriftTol = 1e-6;
constexpr double kReducedTol = 1e-6;
constexpr double kDivergenceTol = 1e-10;
constexpr double kCertExactTol = 1e-12;
constexpr double kTrappingRelTol = 0.02;
constexpr double kCvBound = 10.0;
constexpr double kCompositionSlopeTol = 0.2;
constexpr double kIdentityTol = 1e-12;
constexpr double kSlowVarianceC = 4.0;
constexpr double kTranslationC = 4.0;
constexpr double kSmoothingSlope = 0.1;
constexpr double kSmoothingSeconds = 600.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, const char* fmt, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, v);
  if (!o.detail.empty()) o.detail += ", ";
  o.detail += buf;
}

void require(Outcome& o, bool ok, const char* fmt, double v) {
  note(o, fmt, v);
  if (!ok) {
    o.pass = false;
    o.detail += " (!)";
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec3 v{nd(rng), nd(rng), nd(rng)};
  const double n = norm3(v);
  return {v[0] / n, v[1] / n, v[2] / n};
}

/// group velocity of p = B.xi|xi| written out directly
Vec3 velocity_oracle(const Vec3& B, const Vec3& xi) {
  const double n = norm3(xi), bx = dot3(B, xi);
  return {B[0] * n + bx * xi[0] / n, B[1] * n + bx * xi[1] / n, B[2] * n + bx * xi[2] / n};
}

double angle_oracle(const Vec3& a, const Vec3& b) {
  return std::atan2(norm3(cross3(a, b)), dot3(a, b));
}

// ---------------------------------------------------------------- criteria

Outcome cone_bound() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double bound = std::atan(1.0 / (2.0 * std::sqrt(2.0)));
  FieldSample e3;
  e3.B = {0, 0, 1};
  double sphere_max = 0.0, mismatch = 0.0;
  for (const Vec3& xi : sphere_directions(100000)) {
    const Vec3 v = symbol_dxi(e3, xi);
    const Vec3 w = velocity_oracle(e3.B, xi);
    for (int a = 0; a < 3; ++a) mismatch = std::max(mismatch, std::abs(v[a] - w[a]));
    sphere_max = std::max(sphere_max, angle_oracle(v, e3.B));
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<Bump> bumps;
  for (int i = 0; i < 4; ++i) bumps.push_back(Bump{0.25, {u(rng), u(rng), u(rng)}, 0.8, random_unit(rng)});
  const BumpField field({0, 0, 1}, bumps);
  RayOptions opt;
  opt.t_max = 1.0;
  opt.exit_height = 6.0;
  opt.tol = 1e-9;
  double ray_max = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PhasePoint start({u(rng), u(rng), u(rng)}, random_unit(rng));
    const RayTrajectory t = integrate_ray(field, i % 2 == 0 ? 1 : -1, start, opt);
    for (const auto& s : t.samples) {
      const FieldSample fs = field.eval(s.x, 1);
      Vec3 v = velocity_oracle(fs.B, s.xi);
      ray_max = std::max(ray_max, angle_oracle(v, fs.B));
    }
  }

  const auto angle_at = [&](double th) { return angle_oracle(velocity_oracle(e3.B, {0, std::cos(th), std::sin(th)}), e3.B); };
  double a = 0.05, b = 1.5;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double c = b - gr * (b - a), d = a + gr * (b - a);
    if (angle_at(c) > angle_at(d)) b = d;
    else a = c;
  }
  const double th = 0.5 * (a + b);
  const double ratio_err = std::abs(std::tan(th) - 1.0 / std::sqrt(2.0));
  const double value_err = std::abs(angle_at(std::atan(1.0 / std::sqrt(2.0))) - bound);
  const double secs = seconds_since(t0);

  require(o, mismatch < 1e-13, "velocity oracle mismatch %.1e", mismatch);
  require(o, sphere_max <= bound + kConeSlack, "sphere max - bound %.2e", sphere_max - bound);
  require(o, ray_max <= bound + kConeSlack, "ray max - bound %.2e", ray_max - bound);
  require(o, ratio_err < kConeArgmaxTol, "argmax |xi3/xi2 - 1/sqrt2| %.1e", ratio_err);
  require(o, value_err < kConeArgmaxTol, "extremal value error %.1e", value_err);
  require(o, secs < kConeSeconds, "%.1f s", secs);
  return o;
}

Outcome group_velocity_values() {
  Outcome o;
  const Vec3 a = group_velocity(1, {0, 0, 1});
  const Vec3 b = group_velocity(1, {1, 0, 0});
  const double ea = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2] - 2.0)});
  const double eb = std::max({std::abs(b[0]), std::abs(b[1]), std::abs(b[2] - 1.0)});
  double fd = 0.0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 xi = random_unit(rng);
    const Vec3 v = group_velocity(1, xi);
    for (int c = 0; c < 3; ++c) {
      Vec3 p = xi, m = xi;
      const double h = 1e-5;
      p[c] += h;
      m[c] -= h;
      const double d = (principal_symbol(Vec3{0, 0, 1}, p) - principal_symbol(Vec3{0, 0, 1}, m)) / (2 * h);
      fd = std::max(fd, std::abs(d - v[c]));
    }
  }
  require(o, ea <= kGroupVelocityTol, "v+(0,0,1) error %.1e", ea);
  require(o, eb <= kGroupVelocityTol, "v+(1,0,0) error %.1e", eb);
  require(o, fd < 1e-8, "finite-difference check %.1e", fd);
  return o;
}

Outcome projection_algebra() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  double idem = 0.0, orth = 0.0, sum = 0.0, diag = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 d = random_unit(rng);
    const double r = std::pow(10.0, lg(rng));
    const Vec3 xi{r * d[0], r * d[1], r * d[2]};
    const Projections P = projections(xi);
    const Eigen::Matrix3cd* all[3] = {&P.plus, &P.zero, &P.minus};
    for (int s = 0; s < 3; ++s) {
      idem = std::max(idem, ((*all[s]) * (*all[s]) - *all[s]).cwiseAbs().maxCoeff());
      for (int t = 0; t < 3; ++t)
        if (t != s) orth = std::max(orth, ((*all[s]) * (*all[t])).cwiseAbs().maxCoeff());
    }
    sum = std::max(sum, (P.plus + P.zero + P.minus - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff());
    const Vec3 B = random_unit(rng);
    const double p = std::abs(principal_symbol(B, xi));
    const double res = diagonalization_residual(B, xi);
    diag = std::max(diag, p > 0.0 ? res / p : res);
  }
  require(o, idem <= kProjectionTol, "idempotence %.1e", idem);
  require(o, orth <= kProjectionTol, "orthogonality %.1e", orth);
  require(o, sum <= kProjectionTol, "resolution of identity %.1e", sum);
  require(o, diag < kDiagSymbolTol, "diagonalization residual / |p| %.1e", diag);
  return o;
}

/// max over fixed times of |4th-order difference of |Xi| - (-sign) D Xi Xi|
double frequency_error_at(const FieldEvaluator& B, int sign, const PhasePoint& start, double dt,
                          const std::vector<double>& times) {
  RayOptions opt;
  opt.t_max = times.back() + 3.0 * dt;
  opt.exit_height = 100.0;
  opt.tol = 1e-14;
  opt.output_dt = dt;
  const RayTrajectory t = integrate_ray(B, sign, start, opt);
  double worst = 0.0;
  for (double tc : times) {
    const std::size_t i = std::size_t(std::llround(tc / dt));
    const auto nx = [&](std::size_t j) { return norm3(t.samples.at(j).xi); };
    const double fd = (nx(i - 2) - 8.0 * nx(i - 1) + 8.0 * nx(i + 1) - nx(i + 2)) / (12.0 * dt);
    const FieldSample fs = B.eval(t.samples[i].x, 1);
    const Vec3& xi = t.samples[i].xi;
    double q = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) q += 0.5 * (fs.dB[a][b] + fs.dB[b][a]) * xi[a] * xi[b];
    worst = std::max(worst, std::abs(fd + sign * q));
  }
  return worst;
}

Outcome frequency_evolution() {
  Outcome o;
  const auto field = make_cos_modes({0, 0, 1}, {CosMode{{1.0, 0, 0}, {0, 0, 1}, 0.4, 0.3},
                                                CosMode{{0, 0.7, 0.5}, {1, 0, 0}, 0.3, 1.1}});
  const PhasePoint start({0.3, 0, 0}, {0.6, 0.2, 0.7});
  const std::vector<double> times = {0.32, 0.64, 0.96};
  std::vector<double> err;
  for (double dt : {0.08, 0.04, 0.02}) err.push_back(frequency_error_at(*field, 1, start, dt, times));
  const double order1 = std::log2(err[0] / err[1]);
  const double order2 = std::log2(err[1] / err[2]);
  RayOptions opt;
  opt.t_max = 2.0;
  opt.exit_height = 100.0;
  opt.output_dt = 0.05;
  const UniformField e3;
  double uniform = 0.0;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const RayTrajectory t = integrate_ray(e3, i % 2 ? 1 : -1, PhasePoint({0, 0, 0}, random_unit(rng)), opt);
    uniform = std::max(uniform, frequency_drift_check(t, e3));
  }
  require(o, std::min(order1, order2) >= kFrequencyMinOrder, "self-convergence order %.2f", std::min(order1, order2));
  note(o, "error at dt=0.02 %.1e", err[2]);
  require(o, uniform <= kFrequencyUniformTol, "e3 drift %.1e", uniform);
  return o;
}

Outcome diagonalized_residual() {
  Outcome o;
  const Grid3 g(64, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    SpectralVectorField bg = fixtures::random_solenoidal(g, 4, 0.3, 100 + trial);
    add_constant(bg, {0, 0, 1});
    const SpectralVectorField b = fixtures::random_solenoidal(g, 12, 1.0, 200 + trial);
    worst = std::max(worst, diag_residual(bg, b));
  }
  const SpectralVectorField b = fixtures::random_solenoidal(g, 12, 1.0, 300);
  const double e3 = diag_residual(fixtures::uniform_e3(g), b);
  require(o, worst < kDiagResidualRandom, "random backgrounds %.1e", worst);
  require(o, e3 < kDiagResidualE3, "e3 %.1e", e3);
  return o;
}

Outcome paralinearization() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const bool coarse = trial % 2 == 0;
    const Grid3 g(64, coarse ? 1.0 / 64.0 : 1.0);
    const int gap = coarse ? 10 : 2;
    SpectralVectorField b = fixtures::random_solenoidal(g, 10, 1.0, 1000 + trial);
    add_constant(b, {0.3, -0.2, 1.0});
    const SpectralVectorField lhs = paralin_error(b, gap);
    const SpectralVectorField rhs = paralin_error_balanced(b, gap);
    worst = std::max(worst, l2_norm(lhs - rhs) / l2_norm(lhs));
  }
  const double secs = seconds_since(t0);
  require(o, worst < kParalinTol, "max relative difference %.1e", worst);
  require(o, secs < kParalinSeconds, "%.1f s", secs);
  return o;
}

Outcome solver_oracles() {
  Outcome o;
  double max_div = 0.0;
  {
    const Grid3 g(32, 2.0);
    const SpectralVectorField b0 = fixtures::random_solenoidal(g, 4, 1.0, 41);
    SolverState s = make_state(SolverMode::Linearized, b0);
    SolveOptions opt;
    opt.T = 1.0;
    opt.dt = 0.005;
    solve(s, opt);
    const SpectralVectorField exact = propagate_constant(b0, 1.0);
    const double err = l2_norm(s.u - exact) / l2_norm(exact);
    for (const auto& d : s.history) max_div = std::max(max_div, d.max_divergence);
    require(o, err < kLinearizedTol, "linearized vs exact %.1e", err);
  }
  {
    const Grid3 g(64, 4.0);
    SpectralVectorField B = fixtures::random_solenoidal(g, 3, 0.05 * std::sqrt(g.box_length() * g.box_length() * g.box_length()), 42);
    add_constant(B, {0, 0, 1});
    SolverState s = make_state(SolverMode::Nonlinear, B);
    SolveOptions opt;
    opt.T = 0.5;
    solve(s, opt);
    double e_min = INFINITY, e_max = -INFINITY;
    for (const auto& d : s.history) {
      e_min = std::min(e_min, d.energy);
      e_max = std::max(e_max, d.energy);
      max_div = std::max(max_div, d.max_divergence);
    }
    const double drift = (e_max - e_min) / s.history.front().energy;
    require(o, drift < kEnergyDriftTol && !s.blown_up, "nonlinear energy drift %.1e", drift);
  }
  {
    const int n = 32;
    const double lambda = 1.0;
    TwoPointFiveDState r = make_2p5d(
        n, lambda, [](double x, double y) { return 0.3 * std::sin(x) * std::cos(2 * y) + 0.2 * std::cos(x + y); },
        [](double x, double y) { return 1.0 + 0.25 * std::cos(x) + 0.1 * std::sin(2 * y); });
    SolverState s = make_state(SolverMode::Nonlinear, lift_2p5d(r));
    const double dt = 0.002;
    solve_2p5d(r, 0.2, dt);
    SolveOptions opt;
    opt.T = 0.2;
    opt.dt = dt;
    solve(s, opt);
    const SpectralVectorField lifted = lift_2p5d(r);
    const double err = l2_norm(s.u - lifted) / l2_norm(lifted);
    for (const auto& d : s.history) max_div = std::max(max_div, d.max_divergence);
    require(o, err < kReducedTol, "3-D vs reduced %.1e", err);
  }
  require(o, max_div < kDivergenceTol, "max divergence %.1e", max_div);
  return o;
}

Outcome certificates() {
  Outcome o;
  const Grid3 g(32, 2.0);
  const CertificateTargets targets{1.0, 0.5, 1.0, 1.0, 10.0, 1.0};
  const CertificateReport e3 = certify(2.0, UniformField({0, 0, 1}), g, targets);
  const double trap = 3.0 * std::sqrt(2.0) * targets.R;
  require(o, e3.M <= kCertExactTol, "e3 M %.1e", e3.M);
  require(o, std::abs(e3.mu - 1.0) <= kCertExactTol, "e3 mu-1 %.1e", e3.mu - 1.0);
  require(o, e3.A <= kCertExactTol, "e3 A %.1e", e3.A);
  require(o, std::abs(e3.L - trap) / trap <= kTrappingRelTol, "e3 L %.4f", e3.L);
  const BumpField bump({0, 0, 1}, {Bump{1e-3, {0, 0, 0}, 1.0, {1, 0, 0}}});
  const CertificateReport rb = certify(2.0, bump, g, targets);
  require(o, rb.all_ok, "bump passes (M=%.2e)", rb.M);
  const auto null = make_null_point_field({0, 0, 0}, 1.0);
  const CertificateReport rn = certify(2.0, *null, g, targets);
  require(o, !rn.nondegenerate_ok, "null point fails nondegeneracy (mu=%.3f)", rn.mu);
  return o;
}

Outcome calderon_vaillancourt() {
  Outcome o;
  const Lattice L(1, 8192, 2.0);
  const CvReport cv = hf_cv_check(L, 2.0, {6, 7, 8, 9, 10});
  int above = 0;
  double worst = 0.0;
  for (const auto& r : cv.rows)
    if (r.above_threshold) {
      ++above;
      worst = std::max(worst, r.op_norm);
    }
  require(o, above > 0, "shells above threshold %.0f", double(above));
  require(o, above > 0 && worst <= kCvBound, "max norm above threshold %.3f", worst);
  const Lattice L2(1, 2048, 2.0);
  const CompositionPair pair = half_order_pair(L2, 1, 0.5);
  const CompositionReport comp =
      composition_residual(L2, pair.a, pair.b, pair.ab, pair.correction, {3, 4, 5, 6, 7, 8});
  require(o, std::abs(comp.first_slope + 0.5) <= kCompositionSlopeTol, "first slope %.3f", comp.first_slope);
  require(o, std::abs(comp.second_slope + 1.5) <= kCompositionSlopeTol, "second slope %.3f", comp.second_slope);
  return o;
}

SpectralVectorField translate_x3(const SpectralVectorField& f, double a) {
  return apply_multiplier(f, [a](const Vec3& k) { return std::exp(cplx(0.0, -k[2] * a)); });
}

Outcome norm_engine() {
  Outcome o;
  const Grid3 g(32, 2.0);
  const SpectralVectorField f = fixtures::random_solenoidal(g, 15, 1.0, 77, 0.0);
  double tele = 0.0;
  SpectralVectorField acc(g);
  const int top = lp_top_shell(g);
  for (int K = 0; K <= top; ++K) {
    acc += lp_project(K, f);
    tele = std::max(tele, max_abs(acc - lp_below(K + 1, f)));
  }
  tele = std::max(tele, max_abs(acc - f));
  double pou = 0.0;
  for (int level = 0; level <= slab_level_max(g); ++level) {
    const SlabPartition part(level, g.box_length());
    std::vector<double> total(g.n, 0.0);
    for (int j = part.first(); j <= part.last(); ++j) {
      const std::vector<double> c = part.cutoff_planes(j, g);
      for (int l = 0; l < g.n; ++l) total[l] += c[l];
    }
    for (double v : total) pou = std::max(pou, std::abs(v - 1.0));
  }

  double slow = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralVectorField b0 = fixtures::random_solenoidal(g, 8, 1.0, 500 + trial, 1.0);
    std::vector<SpectralVectorField> frames;
    for (int i = 0; i < 9; ++i) frames.push_back(propagate_constant(b0, 0.05 * i));
    const SpaceTimeProfile p = full_profile(frames, 0.05);
    const auto levels = p.levels;
    for (int k = 0; k <= 6; ++k)
      for (int kp = 0; kp <= 6; ++kp) {
        const double w = std::pow(2.0, 0.5 * std::abs(k - kp));
        slow = std::max(slow, xk_norm(k, p.whole) / (w * xk_norm(kp, p.whole)));
        slow = std::max(slow, yk_norm(k, p.whole, levels) / (w * yk_norm(kp, p.whole, levels)));
      }
  }

  double trans = 1.0;
  for (int trial = 0; trial < 3; ++trial) {
    const SpectralVectorField u = fixtures::random_solenoidal(g, 10, 1.0, 900 + trial, 1.5);
    const double base = ell1_hs_norm(1.0, u);
    for (int level = 0; level <= slab_level_max(g); ++level) {
      const double shifted = ell1_hs_norm(1.0, translate_x3(u, std::ldexp(1.0, level)));
      trans = std::max({trans, shifted / base, base / shifted});
    }
  }
  require(o, tele <= kIdentityTol, "telescoping %.1e", tele);
  require(o, pou <= kIdentityTol, "partition of unity %.1e", pou);
  require(o, slow <= kSlowVarianceC, "slow-variance C %.3f", slow);
  require(o, trans <= kTranslationC, "translation C %.3f", trans);
  return o;
}

Outcome local_smoothing() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Grid3 g(128, 0.9);
  const SmoothingReport r = measure_smoothing(fixtures::uniform_e3(g), "e3", {2, 3, 4, 5}, 10.0);
  const double secs = seconds_since(t0);
  bool finite = true;
  for (const auto& row : r.rows) finite = finite && row.le_ratio > 0.0 && std::isfinite(row.le_ratio);
  require(o, finite && std::abs(r.le_slope) <= kSmoothingSlope, "LE slope %.4f", r.le_slope);
  note(o, "L^inf L^2 slope %.4f", r.linf_slope);
  require(o, secs < kSmoothingSeconds, "%.0f s", secs);
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"cone_bound", cone_bound},
      {"group_velocity", group_velocity_values},
      {"projection_algebra", projection_algebra},
      {"frequency_evolution", frequency_evolution},
      {"diagonalized_residual", diagonalized_residual},
      {"paralinearization_identity", paralinearization},
      {"solver_oracles", solver_oracles},
      {"certificates", certificates},
      {"high_frequency_calderon_vaillancourt", calderon_vaillancourt},
      {"norm_engine", norm_engine},
      {"local_smoothing", local_smoothing},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (argc > 1) {
      bool wanted = false;
      for (int i = 1; i < argc; ++i) wanted = wanted || std::strcmp(argv[i], c.name) == 0;
      if (!wanted) continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s [%.1fs] %s\n", out.pass ? "PASS" : "FAIL", c.name, seconds_since(t0), out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
