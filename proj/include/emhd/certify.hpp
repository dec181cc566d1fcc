#pragma once

#include <map>
#include <string>
#include <vector>

#include "emhd/fields.hpp"
#include "emhd/rays.hpp"

namespace emhd {

// ---------------------------------------------------------------- measured parameters

/// ||B0 - e3||_{l^1 H^s} on the sampling grid
double size_bound(double s, const SpectralVectorField& B0);

struct NondegeneracyReport {
  double grid_min = 0.0;  // min |B0| over grid points
  double margin = 0.0;    // (sqrt(3)/2) h max |grad B0|_F
  double mu = 0.0;        // grid_min - margin
};
/// lower bound for inf |B0| from grid samples and a Lipschitz margin over half a cell diagonal
NondegeneracyReport nondegeneracy_report(const FieldEvaluator& B0, const Grid3& g);
double nondegeneracy(const FieldEvaluator& B0, const Grid3& g);

/// ||chi_{>R}(|x^3|)(B0 - e3)||_{l^1 H^s}
double asymptotic_uniformity(double s, const SpectralVectorField& B0, double R);

/// Start grid for sup-over-rays quantities. Rays start at x^3 = -2R + (j + 1/2) R / x3_per_R
/// for j < 4 x3_per_R, at transverse stations center + (a, b) with a, b in transverse,
/// with |xi| = 1 on the 26 directions of the unit cube neighbourhood.
struct RaySampleSpec {
  int x3_per_R = 8;
  std::vector<double> transverse = {-1.0, 0.0, 1.0};  // in units of R
  Vec3 center{0.0, 0.0, 0.0};
  int refine_levels = 3;      // adaptive refinements around the running maximizer
  double refine_angle = 0.2;  // first refinement angle in radians, halved per level
  double t_max = 400.0;
  double tol = 1e-9;
};

/// the 26 normalized nonzero vectors with entries in {-1, 0, 1}
std::vector<Vec3> cube_directions();

struct RaySweep {
  double A = 0.0;  // max over rays of int |grad B0|_F |Xi| dt
  double L = 0.0;  // max over rays of int 1_{|X^3| < 2R} |Xdot| dt
  int rays = 0;
  int unbounded = 0;                // rays that did not escape both ways
  double max_log_frequency_gap = 0.0;  // max over rays of log(max|Xi|/|Xi(0)|) - A_ray
  PhasePoint argmax_A{{0, 0, 0}, {0, 0, 1}};
  PhasePoint argmax_L{{0, 0, 0}, {0, 0, 1}};
};

/// Two-sided rays of p_B over the start grid with adaptive refinement near both maximizers.
/// Maxima accumulate, so A and L never decrease as rays are added.
RaySweep ray_sweep(const FieldEvaluator& B0, double R, const RaySampleSpec& spec = {});
double mizohata_constant(const FieldEvaluator& B0, double R, const RaySampleSpec& spec = {});
double nontrapping_length(const FieldEvaluator& B0, double R, const RaySampleSpec& spec = {});

/// per-ray quadratures for one start point
struct RayQuadrature {
  double A = 0.0;
  double L = 0.0;
  double max_frequency_ratio = 1.0;
  bool escaped = false;
};
RayQuadrature ray_quadrature(const FieldEvaluator& B0, double R, const PhasePoint& start, double t_max,
                             double tol = 1e-9);

// ---------------------------------------------------------------- certificates

struct CertificateTargets {
  double M = 1.0;
  double mu = 0.5;
  double A = 1.0;
  double R = 1.0;
  double L = 10.0;
  double eps = 1.0;
};

struct CertificateReport {
  double s = 0.0;
  CertificateTargets targets;
  double M = 0.0;
  double mu = 0.0;
  double A = 0.0;
  double eps = 0.0;
  double L = 0.0;
  bool size_ok = false;
  bool nondegenerate_ok = false;
  bool mizohata_ok = false;
  bool uniformity_ok = false;
  bool nontrapping_ok = false;
  bool all_ok = false;
  int rays = 0;
  int unbounded = 0;
  bool rays_skipped = false;  // rays are not traced when |B0| is not bounded below
  NondegeneracyReport nondeg;
  RaySampleSpec spec;
  Grid3 grid;
  std::map<std::string, std::string> provenance;
};

/// measures (M, mu, A, eps, L) and compares against the targets
CertificateReport certify(double s, const FieldEvaluator& B0, const Grid3& g, const CertificateTargets& targets,
                          const RaySampleSpec& spec = {});
std::string certificate_json(const CertificateReport& r);

// ---------------------------------------------------------------- multiplier symbols

/// F(z) = int <2^k0 (z - z')>^{-100} 2^k0 sup_{x^3 = z'} |grad B| dz', tabulated on a fine grid.
/// The plane sup is piecewise linear between grid planes and zero outside the box.
struct Envelope {
  int k0 = 0;
  double z0 = 0.0, dz = 1.0;
  std::vector<double> values;
  std::vector<double> plane_z, plane_sup;  // sampled sup_{x^3 = z} |grad B|_F
  double operator()(double z) const;
  double integral() const;
};
Envelope envelope(const SpectralVectorField& B, int k0, int refine = 16);
/// max over grid points of |grad B(x)|_F / F(x^3)
double envelope_domination(const Envelope& F);
/// int_z sup_{x^3 = z} |grad B|_F dz by the trapezoid rule on the planes
double gradient_l1_linf(const Envelope& F);

struct MultiplierConstants {
  double C_f = 1.0;
  double C_med = 1.0;
  double M = 1.0;
};

/// f_out(z) = 12 C_f int_{-inf}^z (1 - chi_{<R0}) F + 12 C_med int_{-inf}^z R0^{-1} (chi_{<8R0} - chi_{<R0})
struct OuterMultiplier {
  double z0 = 0.0, dz = 1.0;
  std::vector<double> values;
  Envelope F;
  double R0 = 1.0;
  MultiplierConstants c;
  double operator()(double z) const;
  double derivative(double z) const;
};
OuterMultiplier f_out(const Envelope& F, double R0, const MultiplierConstants& c, double half_extent = 0.0);

/// int_{-inf}^0 chi_{<2R0}(X^3(t)) |Xi(t)| dt along the backward bicharacteristic of p_B
double doi_multiplier(const FieldEvaluator& B, double R0, const PhasePoint& p, bool* truncated = nullptr,
                      double t_max = 400.0);

/// -sigma d_a B^b xi_a xi_b |xi| / <xi>^2
double commutator_symbol(const FieldSample& s, double sigma, const Vec3& xi);

/// q(z) = int_0^z R^{-1} (w(-z'/8R) + w(z'/8R)) dz' with w the (1,2) window
double renorm_q(double R, double z);

struct RenormValue {
  double psi_tilde = 0.0;
  double psi = 0.0;  // psi_+ or psi_- according to the sign argument
  bool truncated = false;
};
/// psi_+- = chi_{>1}(xi)(chi_{<16R}(x^3) psi~ +- sigma C0 A q(x^3)) with psi~ the two-sided weighted
/// integral of the commutator symbol
RenormValue renorm_psi(const FieldEvaluator& B, double sigma, double R, int sign, const PhasePoint& p,
                       double C0 = 1.0, double A = 1.0, double t_max = 400.0);

struct PositivityReport {
  int rays = 0;
  int samples = 0;
  int violations = 0;
  double min_rate = 0.0;  // min over samples of d/dt[f_out + C_f M chi_{<4R0} f_in] / |Xi|
  double C_med = 0.0;
  double max_f_in = 0.0;
};
/// Derivative of f_out + C_f M chi_{<4R0} f_in along sampled rays where |X^3| <= 8 R0.
/// When c.C_med <= 0 it is set to C_f M sup|chi'_{<1}| sup f_in / 24 from the sampled rays.
PositivityReport positivity_probe(const FieldEvaluator& B, const SpectralVectorField& Bgrid, double R0,
                                  MultiplierConstants c, int ray_count = 1000, double tolerance = 1e-8);

}  // namespace emhd
