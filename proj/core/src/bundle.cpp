#include "symred/bundle.hpp"

#include <Eigen/LU>
#include <cmath>

namespace symred {

namespace {

constexpr double kFdStep = 1e-6;  // first-derivative central differences

Mat gamma_at(const ConnectionData& conn, const Vec& x) {
  Mat g = conn.gamma(x);
  if (g.rows() != conn.base_dim || g.cols() != conn.group.dim)
    throw ValidationError("connection: gamma(x) must be base_dim x dim");
  return g;
}

std::vector<Mat> gamma_jacobian(const ConnectionData& conn, const Vec& x) {
  if (conn.gamma_jac) {
    std::vector<Mat> jac = conn.gamma_jac(x);
    if (static_cast<int>(jac.size()) != conn.base_dim)
      throw ValidationError("connection: gamma_jac(x) must return one matrix per base direction");
    return jac;
  }
  std::vector<Mat> jac(conn.base_dim);
  Vec xp = x, xm = x;
  for (int j = 0; j < conn.base_dim; ++j) {
    xp[j] = x[j] + kFdStep;
    xm[j] = x[j] - kFdStep;
    jac[j] = (gamma_at(conn, xp) - gamma_at(conn, xm)) / (2.0 * kFdStep);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

void check_point(const ConnectionData& conn, const BundlePoint& p) {
  if (p.x.size() != conn.base_dim)
    throw ValidationError("bundle point: x has dimension " + std::to_string(p.x.size()) +
                          ", chart expects " + std::to_string(conn.base_dim));
  if (p.g.rows() != conn.group.matrix_size || p.g.cols() != conn.group.matrix_size)
    throw ValidationError("bundle point: group element has the wrong shape");
}

}  // namespace

void ConnectionData::validate() const {
  if (!group.finalized())
    throw ValidationError("connection: group spec was not finalized");
  if (base_dim <= 0) throw ValidationError("connection: base_dim must be positive");
  if (!gamma) throw ValidationError("connection: gamma callable is empty");
  if (chart.lo.size() != base_dim || chart.hi.size() != base_dim)
    throw ValidationError("connection: chart box must match base_dim");
  for (int i = 0; i < base_dim; ++i)
    if (!(chart.lo[i] < chart.hi[i]))
      throw ValidationError("connection: chart box is empty in direction " + std::to_string(i));
}

BundleTangent fundamental_field(const ConnectionData& conn, const BundlePoint& p, const Vec& xi) {
  check_point(conn, p);
  return {Vec::Zero(conn.base_dim), p.g * algebra_matrix(conn.group, xi)};
}

Vec connection_form(const ConnectionData& conn, const BundlePoint& p, const BundleTangent& v) {
  check_point(conn, p);
  if (v.xdot.size() != conn.base_dim)
    throw ValidationError("connection_form: xdot has the wrong dimension");
  const Mat gm = gamma_at(conn, p.x);
  const Mat horiz_part = algebra_matrix(conn.group, gm.transpose() * v.xdot);
  Eigen::PartialPivLU<Mat> lu(p.g);
  // g^{-1} gdot + g^{-1} (gamma_i^a xdot^i E_a) g, expanded in the basis.
  const Mat total = lu.solve(v.gdot) + lu.solve(horiz_part * p.g);
  return algebra_coords(conn.group, total);
}

BundleTangent horizontal_rhs(const ConnectionData& conn, const BundlePoint& p, const Vec& xdot) {
  check_point(conn, p);
  if (xdot.size() != conn.base_dim)
    throw ValidationError("horizontal_rhs: xdot has the wrong dimension");
  const Mat gm = gamma_at(conn, p.x);
  return {xdot, -algebra_matrix(conn.group, gm.transpose() * xdot) * p.g};
}

std::vector<Mat> curvature(const ConnectionData& conn, const Vec& x) {
  if (x.size() != conn.base_dim) throw ValidationError("curvature: x has the wrong dimension");
  const Mat gm = gamma_at(conn, x);
  const std::vector<Mat> jac = gamma_jacobian(conn, x);
  std::vector<Mat> k(conn.group.dim);
  for (int a = 0; a < conn.group.dim; ++a) {
    Mat ka(conn.base_dim, conn.base_dim);
    const Mat quad = gm * conn.group.C[a] * gm.transpose();  // gamma_i^b C^a_{bc} gamma_j^c
    for (int i = 0; i < conn.base_dim; ++i)
      for (int j = 0; j < conn.base_dim; ++j) ka(i, j) = jac[j](i, a) - jac[i](j, a) - quad(i, j);
    k[a] = ka;
  }
  return k;
}

std::vector<Mat> adjoint_connection(const ConnectionData& conn, const Vec& x) {
  if (x.size() != conn.base_dim)
    throw ValidationError("adjoint_connection: x has the wrong dimension");
  const Mat gm = gamma_at(conn, x);
  std::vector<Mat> ups(conn.base_dim);
  for (int i = 0; i < conn.base_dim; ++i)
    ups[i] = ad_matrix(conn.group, gm.row(i).transpose());
  return ups;
}

CovariantSeries adjoint_covariant_derivative(const ConnectionData& conn,
                                             const std::vector<double>& times,
                                             const std::vector<Vec>& xs,
                                             const std::vector<Vec>& ws) {
  const size_t n = times.size();
  if (n < 3)
    throw ValidationError("adjoint_covariant_derivative: need at least three samples");
  if (xs.size() != n || ws.size() != n)
    throw ValidationError("adjoint_covariant_derivative: times, xs, ws must have equal length");

  CovariantSeries out;
  out.t.reserve(n - 2);
  out.value.reserve(n - 2);
  for (size_t k = 1; k + 1 < n; ++k) {
    const double t0 = times[k - 1], t1 = times[k], t2 = times[k + 1];
    if (!(t0 < t1 && t1 < t2))
      throw ValidationError("adjoint_covariant_derivative: times must be strictly increasing");
    // Derivative of the quadratic interpolant at the middle node; exact
    // centered difference on uniform grids.
    const double c0 = (t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double c1 = (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double c2 = (t1 - t0) / ((t2 - t0) * (t2 - t1));
    const Vec wdot = c0 * ws[k - 1] + c1 * ws[k] + c2 * ws[k + 1];
    const Vec xdot = c0 * xs[k - 1] + c1 * xs[k] + c2 * xs[k + 1];
    const Mat gm = gamma_at(conn, xs[k]);
    const Mat ups = ad_matrix(conn.group, gm.transpose() * xdot);
    out.t.push_back(t1);
    out.value.push_back(wdot + ups * ws[k]);
  }
  return out;
}

}  // namespace symred
