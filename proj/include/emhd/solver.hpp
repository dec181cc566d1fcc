#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "emhd/grid.hpp"

namespace emhd {

// ---------------------------------------------------------------- right-hand sides

/// -curl((curl B) x B), dealiased and Leray-projected
SpectralVectorField rhs_nonlinear(const SpectralVectorField& B);
/// -L b with L b = curl((curl b) x Bbar) + curl((curl Bbar) x b), dealiased and projected
SpectralVectorField rhs_linearized(const SpectralVectorField& background, const SpectralVectorField& b);
/// -L b for a uniform background B0, evaluated coefficientwise
SpectralVectorField rhs_linearized_uniform(const Vec3& B0, const SpectralVectorField& b);

/// Pi_+(D) (sign = +1) or Pi_-(D) (sign = -1); both equal I/2 on the zero mode
SpectralVectorField whistler_projection(const SpectralVectorField& u, int sign);

/// Operators of the diagonalized linearized system around a fixed background.
/// apply(sign, bp, bm) returns
///   +-P b+- +- S b-+ +- A b+- +- grad(C.(b+ + b-)) + s ((curl Bbar).grad b+- + R+-(b+ + b-))
/// with transport sign s. Since curl(W x b) = (b.grad)W - (W.grad)b for divergence-free W and b,
/// s = -1 makes this equal to Pi_+-(D) L b for b = b+ + b-; s = +1 is kept for comparison.
class DiagonalSystem {
 public:
  explicit DiagonalSystem(const SpectralVectorField& background, double transport_sign = -1.0);

  SpectralVectorField apply(int sign, const SpectralVectorField& bp, const SpectralVectorField& bm) const;

  /// 1/2((B.grad)|D| + |D|(B.grad))
  SpectralVectorField principal(const SpectralVectorField& u) const;
  SpectralVectorField symmetric(const SpectralVectorField& u) const;
  SpectralVectorField antisymmetric(const SpectralVectorField& u) const;
  /// grad(C.u)
  SpectralVectorField gradient_part(const SpectralVectorField& u) const;
  /// (curl Bbar).grad u
  SpectralVectorField transport(const SpectralVectorField& u) const;
  SpectralVectorField remainder(int sign, const SpectralVectorField& u) const;

  const Grid3& grid() const { return g_; }

 private:
  Grid3 g_;
  double transport_sign_;
  RealVectorField B_, W_;
  std::vector<RealScalarField> dBf_;  // dBf_[3a+b] = d_a B^b
  std::vector<RealScalarField> dWf_;  // dWf_[3a+b] = d_a W^b

  SpectralVectorField directional(const RealVectorField& v, const SpectralVectorField& u) const;
  SpectralVectorField matrix_product(const std::vector<RealScalarField>& m, bool transpose,
                                     const SpectralVectorField& u) const;
};

/// ||Pi_+-(D) L b - assembled right-hand side||_{L^2} summed in quadrature over both signs,
/// divided by ||b||_{H^2}
double diag_residual(const SpectralVectorField& background, const SpectralVectorField& b,
                     double transport_sign = -1.0);

/// exact solution of d_t b + curl((curl b) x e3) = 0 through the Pi_+- split
SpectralVectorField propagate_constant(const SpectralVectorField& b0, double t);

// ---------------------------------------------------------------- time stepping

enum class SolverMode { Nonlinear, Linearized, Diagonalized, Constant };

std::string to_string(SolverMode m);
SolverMode solver_mode_from_string(const std::string& s);

struct Diagnostic {
  double t = 0.0;
  double energy = 0.0;          // 1/2 int |B|^2 of the evolved field (b+ + b- in diagonalized mode)
  double fluct_energy = 0.0;    // same with the mean removed
  double max_divergence = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
};

struct SolverState {
  double t = 0.0;
  SolverMode mode = SolverMode::Nonlinear;
  SpectralVectorField u;       // B (nonlinear) or b (linearized, constant)
  SpectralVectorField bp, bm;  // diagonalized variables
  SpectralVectorField background;
  bool background_e3 = true;
  std::shared_ptr<const DiagonalSystem> system;  // diagonalized mode only
  bool blown_up = false;
  std::vector<Diagnostic> history;
  std::size_t history_limit = 100000;

  /// evolved field (b+ + b- in diagonalized mode)
  SpectralVectorField field() const;
};

/// state with background e3 (or the given background) and initial field u0
SolverState make_state(SolverMode mode, const SpectralVectorField& u0);
SolverState make_state(SolverMode mode, const SpectralVectorField& u0, const SpectralVectorField& background);

/// documented stability constant of the CFL rule dt <= c / (max|B| k_max^2)
constexpr double kCflConstant = 2.0;
/// largest retained wavenumber after dealiasing
double dealiased_kmax(const Grid3& g);
double cfl_bound(const SolverState& s);

Diagnostic measure(const SolverState& s);
/// one RK4 step with a Leray projection after each stage
void step(SolverState& s, double dt);

struct SolveOptions {
  double T = 1.0;
  double dt = 0.0;  // 0 selects half the CFL bound
  bool enforce_cfl = true;
  int diag_every = 1;
};

struct SolveResult {
  int steps = 0;
  double dt = 0.0;
  bool cfl_ok = true;
};

SolveResult solve(SolverState& s, const SolveOptions& opt);

// ---------------------------------------------------------------- 2.5-dimensional reduction

/// B = curl(psi e3) + phi e3 for fields independent of x3, on a periodic square of side 2 pi lambda.
struct TwoPointFiveDState {
  int n = 64;
  double lambda = 1.0;
  double t = 0.0;
  std::vector<cplx> psi, phi;  // unitary 2-D spectra, row index x1

  double coord(int i) const;
  double k_eff(int i) const;
};

TwoPointFiveDState make_2p5d(int n, double lambda, const std::function<double(double, double)>& psi,
                              const std::function<double(double, double)>& phi);
/// d_t psi + grad_perp(phi).grad(psi) = 0, d_t phi + grad_perp(psi).grad(Lap psi) = 0, grad_perp = (-d_2, d_1)
void step_2p5d(TwoPointFiveDState& s, double dt);
void solve_2p5d(TwoPointFiveDState& s, double T, double dt);
std::vector<double> physical_2p5d(const TwoPointFiveDState& s, const std::vector<cplx>& spec);
/// integral over the square of a spectral scalar (mean times area)
double integral_2p5d(const TwoPointFiveDState& s, const std::vector<cplx>& spec);
/// the x3-independent 3-D field on a cube with the same n and lambda
SpectralVectorField lift_2p5d(const TwoPointFiveDState& s);
/// inverse of lift_2p5d; throws std::invalid_argument if B depends on x3 or has a transverse mean
TwoPointFiveDState reduce_2p5d(const SpectralVectorField& B);

}  // namespace emhd
