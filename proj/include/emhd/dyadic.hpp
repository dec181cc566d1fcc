#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "emhd/grid.hpp"

namespace emhd {

// ---------------------------------------------------------------- Littlewood-Paley

/// largest k whose multiplier is nonzero somewhere on the grid
int lp_top_shell(const Grid3& g);
/// P_k f. When partial is given it is set if the shell reaches past the Nyquist band (2^{k+1} > kmax).
SpectralVectorField lp_project(int k, const SpectralVectorField& f, bool* partial = nullptr);
/// P_{<k} f
SpectralVectorField lp_below(int k, const SpectralVectorField& f);
/// P_{[k0, k1)} f
SpectralVectorField lp_range(int k0, int k1, const SpectralVectorField& f);

// ---------------------------------------------------------------- slab partitions

/// Intervals [j h, (j+1) h) with h = 2^level tiling the x^3 extent [-L/2, L/2) of the box,
/// with cutoffs chi_j(z) = ramp((z - j h)/h) - ramp((z - (j+1) h)/h) supported in 2I_j.
class SlabPartition {
 public:
  SlabPartition(int level, double box_length);
  int level() const { return level_; }
  double width() const { return h_; }
  int first() const { return first_; }
  int last() const { return last_; }
  int count() const { return last_ - first_ + 1; }
  double lo(int j) const { return j * h_; }
  double hi(int j) const { return (j + 1) * h_; }
  double cutoff(int j, double z) const;
  /// cutoff sampled at the x^3 grid planes
  std::vector<double> cutoff_planes(int j, const Grid3& g) const;
  /// slab containing z in the sharp tiling
  int slab_of(double z) const;

 private:
  int level_;
  double h_, L_;
  int first_, last_;
};

/// floor(log2 box_length), the coarsest level used on the box
int slab_level_max(const Grid3& g);
/// level attached to frequency shell k: min(k, slab_level_max)
int slab_level_for_shell(int k, const Grid3& g);

// ---------------------------------------------------------------- static norms

/// per x^3 plane integral of |u|^2 over (x^1, x^2)
std::vector<double> plane_mass(const RealVectorField& u);
std::vector<double> plane_mass(const SpectralVectorField& u);

struct Ell1HsReport {
  double total = 0.0;
  /// cells[k] = ||chi_I P_k u||_{L^2} for each slab I of the shell's level
  std::vector<std::vector<double>> cells;
  std::vector<int> levels;
};
/// (sum_k (2^{sk} sum_I ||chi_I P_k u||)^2)^{1/2}
Ell1HsReport ell1_hs_report(double s, const SpectralVectorField& u);
double ell1_hs_norm(double s, const SpectralVectorField& u);

/// u multiplied in physical space by a profile w(x^3)
SpectralVectorField multiply_x3(const SpectralVectorField& u, const std::function<double(double)>& w);

// ---------------------------------------------------------------- space-time norms

/// Per-time per-plane masses of a space-time field on a uniform time grid.
/// Time integrals use the trapezoid rule; a single sample carries weight dt.
struct PlaneSeries {
  Grid3 grid;
  double dt = 1.0;
  std::vector<std::vector<double>> mass;  // [time][plane]

  std::size_t steps() const { return mass.size(); }
  std::vector<double> time_weights() const;
  /// plane weights applied to |u|^2 (pass chi^2 to localize)
  PlaneSeries weighted(const std::vector<double>& w) const;
  PlaneSeries scaled(double s) const;  // u -> s u
  /// L^2_t L^2 mass inside x^3 in [a, b)
  double slab_mass(double a, double b) const;
};

struct SpaceTimeProfile {
  Grid3 grid;
  double dt = 1.0;
  PlaneSeries whole;
  std::map<int, PlaneSeries> shells;  // P_k u
  std::vector<PlaneSeries> levels;    // frequency-matched pieces indexed by slab level
};

/// Builds a profile one time sample at a time so that full histories never sit in memory.
class ProfileBuilder {
 public:
  ProfileBuilder(const Grid3& g, double dt, std::vector<int> shells, bool levels);
  void add(const SpectralVectorField& u);
  const SpaceTimeProfile& profile() const { return p_; }

 private:
  SpaceTimeProfile p_;
  std::vector<int> shells_;
  bool levels_;
};

/// every shell 0..lp_top_shell plus the level pieces
SpaceTimeProfile full_profile(const std::vector<SpectralVectorField>& frames, double dt);

double le_norm(const PlaneSeries& u);
double linf_l2(const PlaneSeries& u);
double l1_l2(const PlaneSeries& u);
double l2_l2(const PlaneSeries& u);

struct LeStar {
  double value = 0.0;
  std::string winner;  // "level:<l>" or "frequency-matched"
};
/// Upper bound for LE*: infimum over {all of g at one level} and {g_l = level pieces}.
LeStar le_star_norm(const PlaneSeries& g, const std::vector<PlaneSeries>& levels = {});

/// 2^{k/2} ||b||_LE + ||b||_{L^inf L^2}
double xk_norm(int k, const PlaneSeries& b);
/// min(2^{-k/2} LE*(g), ||g||_{L^1 L^2})
double yk_norm(int k, const PlaneSeries& g, const std::vector<PlaneSeries>& levels = {});
/// (sum_{I in I_k} ||chi_I b||_{X_k}^r)^{1/r}; r = inf gives the supremum
double ell_xk_norm(int k, double r, const PlaneSeries& b);
double ell_yk_norm(int k, double r, const PlaneSeries& g, const std::vector<PlaneSeries>& levels = {});
/// (sum_{I in I_k} ||chi_I b||_{L^inf L^2}^r)^{1/r}
double ell_linf_l2(int k, double r, const PlaneSeries& b);

double xs_norm(double s, const SpaceTimeProfile& p);
double ys_norm(double s, const SpaceTimeProfile& p);
double ell_xs_norm(double s, double r, const SpaceTimeProfile& p);
double ell_ys_norm(double s, double r, const SpaceTimeProfile& p);
double ell_linf_hs_norm(double s, double r, const SpaceTimeProfile& p);

/// JSON report of per-(k, I) contributions for regression snapshots
std::string ell1_report_json(double s, const Ell1HsReport& r);

}  // namespace emhd
