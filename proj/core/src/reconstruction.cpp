#include "symred/reconstruction.hpp"

#include <cmath>
#include <sstream>

namespace symred {

namespace {

void check_grid(const std::vector<double>& t, const char* who) {
  if (t.size() < 2)
    throw ValidationError(std::string(who) + ": need at least two samples");
  for (size_t k = 0; k + 1 < t.size(); ++k)
    if (!(t[k] < t[k + 1]))
      throw ValidationError(std::string(who) + ": times must be strictly increasing");
}

// Cubic Hermite basis on [t0, t1].
Vec hermite(double t, double t0, double t1, const Vec& y0, const Vec& y1, const Vec& d0,
            const Vec& d1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * d1;
}

Vec hermite_deriv(double t, double t0, double t1, const Vec& y0, const Vec& y1, const Vec& d0,
                  const Vec& d1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) / h) * y0 + (3 * s2 - 4 * s + 1) * d0 +
         ((-6 * s2 + 6 * s) / h) * y1 + (3 * s2 - 2 * s) * d1;
}

// Node slopes from the derivative of the local quadratic interpolant
// (second-order one-sided at the ends).
std::vector<Vec> estimate_slopes(const std::vector<double>& t, const std::vector<Vec>& y) {
  const size_t n = t.size();
  std::vector<Vec> d(n);
  auto quad_deriv = [&](size_t i0, size_t i1, size_t i2, double at) {
    const double t0 = t[i0], t1 = t[i1], t2 = t[i2];
    const double c0 = (2 * at - t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double c1 = (2 * at - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double c2 = (2 * at - t0 - t1) / ((t2 - t0) * (t2 - t1));
    return Vec(c0 * y[i0] + c1 * y[i1] + c2 * y[i2]);
  };
  if (n == 2) {
    d[0] = (y[1] - y[0]) / (t[1] - t[0]);
    d[1] = d[0];
    return d;
  }
  d[0] = quad_deriv(0, 1, 2, t[0]);
  for (size_t k = 1; k + 1 < n; ++k) d[k] = quad_deriv(k - 1, k, k + 1, t[k]);
  d[n - 1] = quad_deriv(n - 3, n - 2, n - 1, t[n - 1]);
  return d;
}

// One stepper for every linear group equation gdot = (xi(t)^a E_a) g, with
// xi supplied as an evaluator over continuous time.
GroupCurve step_linear_group_ode(const LieGroupSpec& spec, const std::vector<double>& times,
                                 const std::function<Vec(double)>& xi_at, const Mat& g0,
                                 const GroupStepOptions& opt) {
  if (!(opt.drift_tolerance > 0.0))
    throw ValidationError("group stepping: drift_tolerance must be positive");
  if (g0.rows() != spec.matrix_size || g0.cols() != spec.matrix_size)
    throw ValidationError("group stepping: g0 has the wrong shape");
  if (group_residual(spec, g0) > 1e-8)
    throw ValidationError("group stepping: g0 is not a group element");

  GroupCurve out;
  out.t = times;
  out.g.reserve(times.size());
  out.g.push_back(g0);

  static const double gauss_lo = 0.5 - std::sqrt(3.0) / 6.0;
  static const double gauss_hi = 0.5 + std::sqrt(3.0) / 6.0;

  Mat g = g0;
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    const double t0 = times[k], h = times[k + 1] - times[k];
    Vec omega;
    if (opt.method == Method::lie_midpoint) {
      omega = h * xi_at(t0 + 0.5 * h);
    } else {
      // Two-point Gauss quadrature of the Magnus series with its single
      // commutator term; fourth order.
      const Vec x1 = xi_at(t0 + gauss_lo * h);
      const Vec x2 = xi_at(t0 + gauss_hi * h);
      omega = (0.5 * h) * (x1 + x2) +
              (std::sqrt(3.0) * h * h / 12.0) * bracket(spec, x2, x1);
    }
    g = exponential(spec, omega) * g;

    double res = group_residual(spec, g);
    out.diag.max_constraint_drift = std::max(out.diag.max_constraint_drift, res);
    if (res > opt.drift_tolerance / 10.0) {
      g = project_to_group(spec, g);
      ++out.diag.reprojections;
      res = group_residual(spec, g);
      if (res > opt.drift_tolerance) {
        std::ostringstream os;
        os << "constraint drift " << res << " exceeds tolerance " << opt.drift_tolerance
           << " at t=" << times[k + 1] << " even after re-projection";
        throw IntegrationError(os.str());
      }
    }
    out.g.push_back(g);
  }
  out.diag.final_constraint_residual = group_residual(spec, g);
  return out;
}

}  // namespace

GroupCurve horizontal_lift(const ConnectionData& conn, const BaseCurve& curve, const Mat& h0,
                           const GroupStepOptions& opt) {
  conn.validate();
  check_grid(curve.t, "horizontal_lift");
  const size_t n = curve.t.size();
  if (curve.x.size() != n || curve.xdot.size() != n)
    throw ValidationError("horizontal_lift: x and xdot must match the time grid");
  if (!curve.xddot.empty() && curve.xddot.size() != n)
    throw ValidationError("horizontal_lift: xddot must be empty or match the time grid");
  for (const Vec& xk : curve.x)
    if (xk.size() != conn.base_dim)
      throw ValidationError("horizontal_lift: base samples have the wrong dimension");

  const bool have_accel = !curve.xddot.empty();
  const auto xi_h = [&](double t) -> Vec {
    // locate the interval; evaluation times always lie within one step of the
    // grid by construction of the steppers
    size_t k = 0;
    while (k + 2 < curve.t.size() && t > curve.t[k + 1]) ++k;
    const double t0 = curve.t[k], t1 = curve.t[k + 1];
    const Vec x = hermite(t, t0, t1, curve.x[k], curve.x[k + 1], curve.xdot[k], curve.xdot[k + 1]);
    const Vec v = have_accel
                      ? hermite(t, t0, t1, curve.xdot[k], curve.xdot[k + 1], curve.xddot[k],
                                curve.xddot[k + 1])
                      : hermite_deriv(t, t0, t1, curve.x[k], curve.x[k + 1], curve.xdot[k],
                                      curve.xdot[k + 1]);
    return Vec(-(conn.gamma(x).transpose() * v));
  };
  return step_linear_group_ode(conn.group, curve.t, xi_h, h0, opt);
}

AlgebraCurve xi_curve(const LieGroupSpec& spec, const GroupCurve& lift, const std::vector<Vec>& w,
                      const std::vector<Vec>& wdot, const std::vector<Vec>& lift_velocity) {
  const size_t n = lift.t.size();
  if (lift.g.size() != n) throw ValidationError("xi_curve: lift grid is inconsistent");
  if (w.size() != n) throw ValidationError("xi_curve: w must match the lift grid");
  const bool with_deriv = !wdot.empty() || !lift_velocity.empty();
  if (with_deriv && (wdot.size() != n || lift_velocity.size() != n))
    throw ValidationError(
        "xi_curve: wdot and lift_velocity must both match the grid when supplied");

  AlgebraCurve out;
  out.t = lift.t;
  out.xi.reserve(n);
  if (with_deriv) out.xidot.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const Mat a = adjoint_matrix(spec, lift.g[k]);
    out.xi.push_back(a * w[k]);
    if (with_deriv)
      out.xidot.push_back(a * (wdot[k] - bracket(spec, lift_velocity[k], w[k])));
  }
  return out;
}

GroupCurve solve_group_equation(const LieGroupSpec& spec, const AlgebraCurve& xi, const Mat& g0,
                                const GroupStepOptions& opt) {
  check_grid(xi.t, "solve_group_equation");
  const size_t n = xi.t.size();
  if (xi.xi.size() != n) throw ValidationError("solve_group_equation: xi must match the grid");
  if (!xi.xidot.empty() && xi.xidot.size() != n)
    throw ValidationError("solve_group_equation: xidot must be empty or match the grid");
  for (const Vec& v : xi.xi)
    if (v.size() != spec.dim)
      throw ValidationError("solve_group_equation: xi samples have the wrong dimension");

  const std::vector<Vec> slopes = xi.xidot.empty() ? estimate_slopes(xi.t, xi.xi) : xi.xidot;
  const auto xi_at = [&](double t) -> Vec {
    size_t k = 0;
    while (k + 2 < xi.t.size() && t > xi.t[k + 1]) ++k;
    return hermite(t, xi.t[k], xi.t[k + 1], xi.xi[k], xi.xi[k + 1], slopes[k], slopes[k + 1]);
  };
  return step_linear_group_ode(spec, xi.t, xi_at, g0, opt);
}

FullTrajectory reconstruct(const InvariantSODE& sys, const ReducedTrajectory& reduced,
                           const Mat& g0, const GroupStepOptions& opt) {
  sys.validate();
  check_grid(reduced.t, "reconstruct");
  const size_t n = reduced.t.size();
  if (reduced.states.size() != n)
    throw ValidationError("reconstruct: states must match the time grid");

  BaseCurve base;
  base.t = reduced.t;
  base.x.reserve(n);
  base.xdot.reserve(n);
  base.xddot.reserve(n);
  std::vector<Vec> w(n), wdot(n), lift_vel(n);
  for (size_t k = 0; k < n; ++k) {
    const ReducedState& s = reduced.states[k];
    const ReducedState d = reduced_rhs(sys, s);
    base.x.push_back(s.x);
    base.xdot.push_back(s.v);
    base.xddot.push_back(d.v);
    w[k] = s.w;
    wdot[k] = d.w;
    lift_vel[k] = -(sys.conn.gamma(s.x).transpose() * s.v);
  }

  const GroupCurve lift = horizontal_lift(sys.conn, base, g0, opt);
  const AlgebraCurve xi = xi_curve(sys.conn.group, lift, w, wdot, lift_vel);
  const Mat id = Mat::Identity(sys.conn.group.matrix_size, sys.conn.group.matrix_size);
  const GroupCurve q = solve_group_equation(sys.conn.group, xi, id, opt);

  FullTrajectory out;
  out.t = reduced.t;
  out.states.reserve(n);
  for (size_t k = 0; k < n; ++k)
    out.states.push_back(
        FullState{reduced.states[k].x, reduced.states[k].v, lift.g[k] * q.g[k],
                  reduced.states[k].w});
  out.diag.reprojections = lift.diag.reprojections + q.diag.reprojections;
  out.diag.max_constraint_drift =
      std::max(lift.diag.max_constraint_drift, q.diag.max_constraint_drift);
  out.diag.final_constraint_residual =
      group_residual(sys.conn.group, out.states.back().g);
  return out;
}

}  // namespace symred
