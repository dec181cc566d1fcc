#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "emhd/symbols.hpp"

namespace emhd {

enum class RayEventKind { SlabExitTop, SlabExitBottom, TimeLimit, FrequencyBlowup };
std::string to_string(RayEventKind k);

struct RayEvent {
  RayEventKind kind;
  double t;
  PhasePoint state;
};

struct RaySample {
  double t;
  Vec3 x;
  Vec3 xi;
  std::vector<double> q;  // running quadratures
};

/// Crossing of a watched plane x^3 = height.
struct PlaneCrossing {
  double t;
  double height;
  std::vector<double> q;
};

struct RayTrajectory {
  int sign = 1;
  std::vector<RaySample> samples;
  std::vector<RayEvent> events;
  std::vector<PlaneCrossing> crossings;
  int accepted = 0;
  int rejected = 0;
  double max_local_error = 0.0;
  bool escaped() const;
};

/// extra scalar integrand along the ray: dq/dt = g(x, xi, xdot, sample)
using RayIntegrand = std::function<double(const Vec3&, const Vec3&, const Vec3&, const FieldSample&)>;

struct RayOptions {
  double t_max = 50.0;
  double exit_height = 4.0;  // terminal planes |x^3| = exit_height
  double tol = 1e-9;
  double event_tol = 1e-10;
  double output_dt = 0.0;  // > 0: samples on a uniform time grid, else at accepted steps
  bool backward = false;   // integrate toward negative times
  std::vector<double> watch_heights;  // non-terminal planes x^3 = +-h
  std::vector<RayIntegrand> integrands;
  int max_steps = 2000000;
  double h0 = 0.0;
};

/// Hamiltonian vector field of sign * p_B.
std::pair<Vec3, Vec3> hamiltonian_rhs(const FieldEvaluator& B, int sign, const PhasePoint& p);
std::pair<Vec3, Vec3> hamiltonian_rhs(const FieldSample& s, int sign, const Vec3& xi);

/// Dormand-Prince 5(4) with PI step control, dense output and bisection events.
/// Backward trajectories are stored in increasing t ending at t = 0.
RayTrajectory integrate_ray(const FieldEvaluator& B, int sign, const PhasePoint& start, const RayOptions& opt);

/// forward and backward halves joined at t = 0
RayTrajectory integrate_ray_two_sided(const FieldEvaluator& B, int sign, const PhasePoint& start,
                                      const RayOptions& opt);

struct JacobianSample {
  double t;
  std::array<std::array<double, 6>, 6> J;  // J[r][c] = d(X, Xi)_r / d(x, xi)_c
};

struct VariationalResult {
  RayTrajectory ray;
  std::vector<JacobianSample> jacobians;
};

/// linearized flow along the base ray (no forcing)
VariationalResult variational_flow(const FieldEvaluator& B, int sign, const PhasePoint& start, const RayOptions& opt);

/// max |J^T Omega J - Omega| entry
double symplectic_defect(const std::array<std::array<double, 6>, 6>& J);

/// max over interior samples of |d|Xi|/dt - (-sign) D Xi Xi|; requires uniform samples
double frequency_drift_check(const RayTrajectory& traj, const FieldEvaluator& B);

struct ConeReport {
  double max_angle = 0.0;
  double max_speed_ratio = 0.0;     // |B||Xi| / |Xdot|
  double max_vertical_ratio = 0.0;  // |Xi| / (12 |Xdot^3|), near-uniform samples only
  double max_horizontal_ratio = 0.0;  // 2 max(|Xdot^1|, |Xdot^2|) / |Xi|, near-uniform samples only
  bool near_uniform = true;
};
ConeReport cone_angle(const RayTrajectory& traj, const FieldEvaluator& B);

/// max relative drift of p along the trajectory
double hamiltonian_drift(const RayTrajectory& traj, const FieldEvaluator& B);

/// trajectory CSV: t, x1..x3, xi1..xi3, |xi|, p, event-flag
std::string trajectory_csv(const RayTrajectory& traj, const FieldEvaluator& B);

/// Fibonacci sphere directions
std::vector<Vec3> sphere_directions(int count);

}  // namespace emhd
