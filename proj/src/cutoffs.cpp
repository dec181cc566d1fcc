#include "emhd/cutoffs.hpp"

#include <cmath>

namespace emhd {

namespace {
double bump_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump_exp(t), b = bump_exp(1.0 - t);
  return a / (a + b);
}

double phi0(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth_step(r - 1.0);
}

double phi_k(int k, double r) {
  if (k < 0) return 0.0;
  if (k == 0) return phi0(r);
  return phi0(std::ldexp(r, -k)) - phi0(std::ldexp(r, -k + 1));
}

double phi_below(int k, double r) {
  if (k <= 0) return 0.0;
  return phi0(std::ldexp(r, -(k - 1)));
}

double chi_lt1(double s) { return phi0(std::abs(s)); }

double chi_gt1(double s) { return 1.0 - phi0(2.0 * std::abs(s)); }

double chi_lt(double R, double s) { return chi_lt1(s / R); }

double chi_gt(double R, double s) { return chi_gt1(s / R); }

double chi_lt1_prime(double s) {
  const double a = std::abs(s);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double t = a - 1.0;
  const double e1 = bump_exp(t), e2 = bump_exp(1.0 - t);
  const double d1 = e1 / (t * t), d2 = e2 / ((1.0 - t) * (1.0 - t));
  const double ds = (d1 * (e1 + e2) - e1 * (d1 - d2)) / ((e1 + e2) * (e1 + e2));
  return (s > 0 ? -1.0 : 1.0) * ds;
}

double chi_window12(double z) {
  if (z <= 0.0) return 0.0;
  return (1.0 - phi0(2.0 * z)) * phi0(0.5 * z);
}

double slab_ramp(double s) {
  if (s <= -0.5) return 0.0;
  if (s >= 0.5) return 1.0;
  const double c = std::cos(0.5 * M_PI * (s + 0.5));
  return 1.0 - c * c;
}

}  // namespace emhd
