#ifndef SYMRED_RECONSTRUCTION_HPP
#define SYMRED_RECONSTRUCTION_HPP

#include "symred/integrate.hpp"

namespace symred {

/// Sampled base curve with velocities; accelerations are optional but raise
/// the interpolation accuracy enough for fourth-order group stepping.
struct BaseCurve {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> xdot;
  std::vector<Vec> xddot;  // optional: empty, or one entry per sample
};

struct GroupCurve {
  std::vector<double> t;
  std::vector<Mat> g;
  IntegrationDiagnostics diag;
};

/// Sampled algebra-valued curve; derivatives optional (estimated by finite
/// differences of the samples when absent).
struct AlgebraCurve {
  std::vector<double> t;
  std::vector<Vec> xi;
  std::vector<Vec> xidot;  // optional
};

struct GroupStepOptions {
  /// rk4 is accepted and treated as lie_rk4_corrected: a plain vector scheme
  /// cannot advance a group factor.
  Method method = Method::lie_rk4_corrected;
  double drift_tolerance = 1e-9;
};

/// Horizontal lift of a base curve through h0: solves
/// hdot h^{-1} = -gamma_i^a xdot^i E_a with Hermite interpolation of the
/// samples between nodes. Output is sampled on the curve's own grid.
GroupCurve horizontal_lift(const ConnectionData& conn, const BaseCurve& curve, const Mat& h0,
                           const GroupStepOptions& opt = {});

/// Body-frame velocity curve xi(t) = A(h(t)) w(t), the algebra coordinates of
/// Ad_{h^{-1}}(w^a E_a) along the lift. When both `wdot` and the lift's
/// right-trivialized velocities `lift_velocity` (coords of hdot h^{-1}) are
/// supplied, exact derivative samples are attached:
///   xidot = A(h) (wdot - [lift_velocity, w]).
AlgebraCurve xi_curve(const LieGroupSpec& spec, const GroupCurve& lift, const std::vector<Vec>& w,
                      const std::vector<Vec>& wdot = {},
                      const std::vector<Vec>& lift_velocity = {});

/// Solve gdot g^{-1} = xi(t), g(0) = g0 on the curve's grid. lie_midpoint
/// freezes xi at interval midpoints (order 2); lie_rk4_corrected uses the
/// two-node Gauss quadrature with one commutator correction (order 4).
GroupCurve solve_group_equation(const LieGroupSpec& spec, const AlgebraCurve& xi, const Mat& g0,
                                const GroupStepOptions& opt = {});

/// Full trajectory from a reduced one: horizontal lift through g0, body
/// velocity from w, group factor from the reconstruction equation, combined
/// as g(t) = h(t) q(t).
FullTrajectory reconstruct(const InvariantSODE& sys, const ReducedTrajectory& reduced,
                           const Mat& g0, const GroupStepOptions& opt = {});

}  // namespace symred

#endif
