#pragma once

#include <functional>
#include <string>
#include <vector>

#include "emhd/grid.hpp"

namespace emhd {

// ---------------------------------------------------------------- periodic lattices

/// Periodic line (dims = 1) or cube (dims = 3) of side 2 pi lambda with n points per axis.
struct Lattice {
  int dims = 1;
  int n = 256;
  double lambda = 1.0;

  Lattice() = default;
  Lattice(int dims_, int n_, double lambda_);
  std::size_t size() const;
  double box_length() const;
  double spacing() const { return box_length() / n; }
  double kmax() const { return n / (2.0 * lambda); }
  /// physical position of flat index idx (unused axes are zero)
  Vec3 point(std::size_t idx) const;
  /// effective wavevector of flat index idx (Nyquist components zeroed)
  Vec3 wave(std::size_t idx) const;
  /// exact lattice wavevector used for synthesis phases
  Vec3 wave_phase(std::size_t idx) const;
};

using CField = std::vector<cplx>;

CField lattice_fft(const Lattice& L, const CField& u, bool forward);
/// m(D) u
CField apply_fourier_multiplier(const Lattice& L, const CField& u, const std::function<cplx(const Vec3&)>& m);
CField sample_lattice(const Lattice& L, const std::function<cplx(const Vec3&)>& f);
double lattice_norm(const CField& u);
cplx lattice_inner(const CField& a, const CField& b);
/// P_k on the lattice
CField lattice_shell(const Lattice& L, const CField& u, int k);
/// P_{>k} = I - P_{<k+1}
CField lattice_above(const Lattice& L, const CField& u, int k);

// ---------------------------------------------------------------- symbols

using CoefFn = std::function<cplx(const Vec3&)>;
using MultFn = std::function<cplx(const Vec3&)>;

struct SeparableTerm {
  CoefFn c;  // x dependence
  MultFn m;  // xi dependence
};

/// Symbol a(x, xi) with order m. If terms is nonempty a equals sum_j c_j(x) m_j(xi)
/// and quantization runs through the FFT, otherwise by direct summation.
struct SymbolFn {
  std::function<cplx(const Vec3&, const Vec3&)> eval;
  double order = 0.0;
  std::vector<SeparableTerm> terms;
  std::string label;

  static SymbolFn multiplier(MultFn m, double order, std::string label = "multiplier");
  static SymbolFn coefficient(CoefFn c, std::string label = "coefficient");
  static SymbolFn separable(std::vector<SeparableTerm> terms, double order, std::string label = "separable");
  static SymbolFn general(std::function<cplx(const Vec3&, const Vec3&)> f, double order, std::string label = "general");
  bool is_separable() const { return !terms.empty(); }
  SymbolFn conj() const;
};

/// Op(a)u(x) = sum_xi a(x, xi) u^(xi) e^{i xi x}
CField quantize_left(const Lattice& L, const SymbolFn& a, const CField& u);
/// Op^r(a)u(x) = sum_xi e^{i xi x} (sum_y a(y, xi) u(y) e^{-i xi y}) / N
CField quantize_right(const Lattice& L, const SymbolFn& a, const CField& u);
/// shellwise quantization with the x dependence filtered below 2^{k-3} on shell k (separable symbols)
CField quantize_para(const Lattice& L, const SymbolFn& a, const CField& u);

/// Sampled seminorm sum_{|alpha|+|beta| <= N} sup <xi>^{|beta| - m} |d_x^alpha d_xi^beta a| by central differences.
double symbol_seminorm(const SymbolFn& a, int dims, int N, const std::vector<Vec3>& xs, const std::vector<Vec3>& xis,
                       double x_scale = 1.0, double xi_scale = 1.0);
/// sampled sup of |d_x^alpha d_xi^beta a| for one pair of orders along axis 0
double derivative_sup(const SymbolFn& a, int alpha, int beta, const std::vector<Vec3>& xs,
                      const std::vector<Vec3>& xis, double x_scale, double xi_scale);

// ---------------------------------------------------------------- operator norms

struct LinOp {
  std::function<CField(const CField&)> apply;
  std::function<CField(const CField&)> adjoint;
  std::size_t dim = 0;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool linear = true;
};

struct PowerOptions {
  int max_iter = 400;
  int restarts = 2;
  double rel_tol = 1e-9;
  unsigned seed = 12345;
};

/// largest singular value by power iteration on A*A
NormEstimate op_norm_estimate(const LinOp& A, const PowerOptions& opt = {});

LinOp compose(const LinOp& a, const LinOp& b);  // a after b
LinOp subtract(const LinOp& a, const LinOp& b);
LinOp left_op(const Lattice& L, const SymbolFn& a);
LinOp shell_op(const Lattice& L, int k);
LinOp above_op(const Lattice& L, int k);

// ---------------------------------------------------------------- paraproducts on vector fields

/// sum_k P_{<k-gap} g P_k u for a scalar g
SpectralVectorField paraproduct(const SpectralScalarField& g, const SpectralVectorField& u, int gap = 10);
/// sum_k P_{<k-gap} a x P_k u
SpectralVectorField paraproduct_cross(const SpectralVectorField& a, const SpectralVectorField& u, int gap = 10);
/// dealiased physical product a x b
SpectralVectorField cross_product(const SpectralVectorField& a, const SpectralVectorField& b);

/// curl(b x curl b) - curl(T_b x curl b) + curl(T_{curl b} x b)
SpectralVectorField paralin_error(const SpectralVectorField& b, int gap = 10);
/// curl sum_k P_{[k-gap, k+gap]} b x curl P_k b
SpectralVectorField paralin_error_balanced(const SpectralVectorField& b, int gap = 10);

// ---------------------------------------------------------------- calculus experiments

struct CvRow {
  int shell = 0;         // symbol lives on shell j, lambda = 2^j
  double lambda = 0.0;
  double op_norm = 0.0;  // ||Op(a) P_{>j-2}||
  double ratio = 0.0;    // op_norm / c00
  double threshold = 0.0;
  bool above_threshold = false;
  double rescaled_sup = 0.0;  // max sampled derivative sup of the rescaled symbol
};

struct CvReport {
  double c00 = 0.0;
  int max_order = 4;
  std::vector<CvRow> rows;
};

/// (2/3)(1 + sin(M x^1)/2) phi_j(|xi|), sup norm 1
SymbolFn cv_test_symbol(double M, int shell);
/// sweep of the oscillatory test symbol over shells on a periodic line
CvReport hf_cv_check(const Lattice& L, double M, const std::vector<int>& shells, int max_order = 4);
/// threshold max (c_ab / c00)^{2/(a+b)} from sampled constants c_ab = lambda^b sup|d_x^a d_xi^b a|
double cv_threshold(const SymbolFn& a, double lambda, int max_order, const std::vector<Vec3>& xs,
                    const std::vector<Vec3>& xis, double* c00_out = nullptr);
/// max over 1 <= a+b <= N of sampled sups of the rescaled symbol c00^{-1} a(lambda^{-1/2} x, lambda^{1/2} xi)
double rescaled_derivative_sup(const SymbolFn& a, double lambda, double c00, int max_order,
                               const std::vector<Vec3>& xs, const std::vector<Vec3>& xis);

struct CompositionRow {
  int shell = 0;
  double first = 0.0;   // ||(Op(a)Op(b) - Op(ab)) P_k||
  double second = 0.0;  // ||(Op(a)Op(b) - Op(ab) - Op(-i d_xi a d_x b)) P_k||
};

struct CompositionReport {
  std::vector<CompositionRow> rows;
  double first_slope = 0.0;
  double second_slope = 0.0;
};

/// Shell sweep of Op(a)Op(b) - Op(ab) and of the same minus Op(correction), where
/// correction = -i d_xi a . d_x b is supplied by the caller. Slopes are in log2 per shell.
CompositionReport composition_residual(const Lattice& L, const SymbolFn& a, const SymbolFn& b, const SymbolFn& ab,
                                       const SymbolFn& correction, const std::vector<int>& shells,
                                       const PowerOptions& opt = {});

/// a = <xi>^{1/2} and b = 1 + amplitude cos(mode x^1 / lambda) with ab and correction -i d_xi a . d_x b
struct CompositionPair {
  SymbolFn a, b, ab, correction;
};
CompositionPair half_order_pair(const Lattice& L, int mode, double amplitude);

/// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace emhd
