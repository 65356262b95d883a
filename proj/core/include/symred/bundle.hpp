#ifndef SYMRED_BUNDLE_HPP
#define SYMRED_BUNDLE_HPP

#include <functional>
#include <vector>

#include "symred/lie_group.hpp"

namespace symred {

/// Axis-aligned coordinate box; the valid domain of the base chart.
struct ChartBox {
  Vec lo, hi;
  bool contains(const Vec& x) const {
    for (int i = 0; i < x.size(); ++i)
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
  }
  static ChartBox cube(int dim, double half_width) {
    ChartBox b;
    b.lo = Vec::Constant(dim, -half_width);
    b.hi = Vec::Constant(dim, half_width);
    return b;
  }
};

/// A principal connection on the trivial bundle (chart) x G, described by its
/// coefficients gamma(x): row i, column a holds gamma_i^a, so that the
/// horizontal lift of d/dx^i is X_i = d/dx^i - gamma_i^a Ehat_a, with Ehat_a
/// the right-invariant frame Ehat_a(x,g) = E_a g.
struct ConnectionData {
  LieGroupSpec group;
  int base_dim = 0;
  /// gamma(x), base_dim x dim.
  std::function<Mat(const Vec&)> gamma;
  /// Optional analytic Jacobian: jac[j] = d(gamma)/dx^j, each base_dim x dim.
  /// When absent, derivatives fall back to central differences (h = 1e-6).
  std::function<std::vector<Mat>(const Vec&)> gamma_jac;
  ChartBox chart;

  void validate() const;
};

struct BundlePoint {
  Vec x;
  Mat g;
};

/// A tangent vector at a bundle point, in chart coordinates and the matrix
/// tangent space at g.
struct BundleTangent {
  Vec xdot;
  Mat gdot;
};

/// Infinitesimal generator of the right action at a point: (0, g (xi^a E_a)).
BundleTangent fundamental_field(const ConnectionData& conn, const BundlePoint& p, const Vec& xi);

/// Connection one-form in algebra coordinates:
///   w(xdot, gdot) = coords(g^{-1} gdot) + Ad_{g^{-1}}(gamma_i^a xdot^i E_a).
Vec connection_form(const ConnectionData& conn, const BundlePoint& p, const BundleTangent& v);

/// Horizontal lift of a base velocity: (xdot, -(gamma_i^a xdot^i E_a) g).
BundleTangent horizontal_rhs(const ConnectionData& conn, const BundlePoint& p, const Vec& xdot);

/// Curvature coefficients, defined through the bracket of the horizontal
/// frame: [X_i, X_j] = K^a_{ij} Ehat_a, which evaluates to
///   K^a_{ij} = d_j gamma_i^a - d_i gamma_j^a - C^a_{bc} gamma_i^b gamma_j^c.
/// Returned as one base_dim x base_dim matrix per algebra index a.
std::vector<Mat> curvature(const ConnectionData& conn, const Vec& x);

/// Mixed-frame bracket coefficients [X_i, Ehat_b] = Upsilon^a_{ib} Ehat_a with
/// Upsilon^a_{ib} = gamma_i^c C^a_{cb}; returned as one dim x dim matrix per
/// base index i (rows a, columns b).
std::vector<Mat> adjoint_connection(const ConnectionData& conn, const Vec& x);

/// Discrete samples of a curve of algebra vectors.
struct CovariantSeries {
  std::vector<double> t;
  std::vector<Vec> value;
};

/// Covariant time derivative of w(t) along x(t) with respect to the adjoint
/// connection: Dw/dt = wdot + Upsilon(xdot) w, evaluated on the interior grid
/// points with centered differences. Needs at least three samples.
CovariantSeries adjoint_covariant_derivative(const ConnectionData& conn,
                                             const std::vector<double>& times,
                                             const std::vector<Vec>& xs,
                                             const std::vector<Vec>& ws);

}  // namespace symred

#endif
