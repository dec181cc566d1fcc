#pragma once

namespace emhd {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, increasing in between.
double smooth_step(double t);

/// Littlewood-Paley profile: 1 on [0,1], 0 on [2,inf), nonincreasing.
double phi0(double r);
/// phi_k(r) = phi0(2^-k r) - phi0(2^{-k+1} r) for k >= 1, phi0 for k = 0
double phi_k(int k, double r);
/// multiplier of P_{<k} = sum_{k' < k} P_{k'}; zero for k <= 0
double phi_below(int k, double r);

/// chi_{<1}: 1 for |s| < 1, 0 for |s| > 2
double chi_lt1(double s);
/// chi_{>1}: even, 0 for |s| < 1/2, 1 for |s| > 1
double chi_gt1(double s);
double chi_lt(double R, double s);
double chi_gt(double R, double s);
/// derivative of chi_{<1}
double chi_lt1_prime(double s);

/// tilde-chi_{(1,2)}: 1 on (1,2), supported in [1/2, 4]
double chi_window12(double z);

/// Ramp used for the slab partition: 0 below -1/2, 1 above 1/2, cos^2 taper between.
double slab_ramp(double s);

}  // namespace emhd
