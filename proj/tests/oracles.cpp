#include "oracles.hpp"

#include <cmath>

namespace oracles {

Vec numerical_field_bracket(const FlatField& F, const FlatField& G, const Vec& z, double h) {
  const int n = static_cast<int>(z.size());
  const Vec Fz = F(z);
  const Vec Gz = G(z);
  Vec out = Vec::Zero(n);
  for (int l = 0; l < n; ++l) {
    Vec zp = z, zm = z;
    zp[l] += h;
    zm[l] -= h;
    const Vec dG = (G(zp) - G(zm)) / (2.0 * h);
    const Vec dF = (F(zp) - F(zm)) / (2.0 * h);
    out += dG * Fz[l] - dF * Gz[l];
  }
  return out;
}

double simpson_line_integral(const std::function<Vec(const Vec&)>& A,
                             const std::function<void(double, Vec&, Vec&)>& curve, int n) {
  if (n % 2 != 0) ++n;
  const double ds = 1.0 / n;
  const auto integrand = [&](double s) {
    Vec x, dx;
    curve(s, x, dx);
    return A(x).dot(dx);
  };
  double sum = integrand(0.0) + integrand(1.0);
  for (int k = 1; k < n; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * integrand(k * ds);
  return sum * ds / 3.0;
}

Vec lorentz_circle_position(double t) {
  Vec x(3);
  x << std::sin(t), std::cos(t) - 1.0, 0.0;
  return x;
}

Vec lorentz_circle_velocity(double t) {
  Vec v(3);
  v << std::cos(t), -std::sin(t), 0.0;
  return v;
}

double lorentz_circle_theta(double t) { return 1.5 * t - 0.5 * std::sin(t); }

namespace {

// State layout: (x[0..2], v[0..2], theta, theta_dot).
Vec kk_rhs(const std::function<Vec(const Vec&)>& A, const std::function<Mat(const Vec&)>& A_jac,
           const Vec& y) {
  const Vec x = y.segment(0, 3);
  const Vec v = y.segment(3, 3);
  const double theta_dot = y[7];
  const Mat J = A_jac(x);  // J(i,j) = d_j A_i
  const double w = A(x).dot(v) + theta_dot;
  Vec vdot(3);
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += (J(j, i) - J(i, j)) * v[j];
    vdot[i] = w * s;
  }
  // theta_ddot = -d/dt(A . v) = -(v . (J v) + A . vdot)
  const double theta_ddot = -(v.dot(J * v) + A(x).dot(vdot));
  Vec dy(8);
  dy.segment(0, 3) = v;
  dy.segment(3, 3) = vdot;
  dy[6] = theta_dot;
  dy[7] = theta_ddot;
  return dy;
}

}  // namespace

KkGeodesicResult kk_geodesic_rk4(const std::function<Vec(const Vec&)>& A,
                                 const std::function<Mat(const Vec&)>& A_jac, const Vec& x0,
                                 const Vec& v0, double w0, double t_end, double h) {
  Vec y(8);
  y.segment(0, 3) = x0;
  y.segment(3, 3) = v0;
  y[6] = 0.0;
  y[7] = w0 - A(x0).dot(v0);

  KkGeodesicResult out;
  const auto push = [&](double t) {
    out.t.push_back(t);
    out.x.push_back(y.segment(0, 3));
    out.v.push_back(y.segment(3, 3));
    out.theta.push_back(y[6]);
    out.theta_dot.push_back(y[7]);
  };
  push(0.0);
  double t = 0.0;
  while (t < t_end - 1e-12) {
    const double step = std::min(h, t_end - t);
    const Vec k1 = kk_rhs(A, A_jac, y);
    const Vec k2 = kk_rhs(A, A_jac, Vec(y + 0.5 * step * k1));
    const Vec k3 = kk_rhs(A, A_jac, Vec(y + 0.5 * step * k2));
    const Vec k4 = kk_rhs(A, A_jac, Vec(y + step * k3));
    y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
    push(t);
  }
  return out;
}

Mat fd_matrix_derivative(const std::function<Mat(const Vec&)>& f, const Vec& x, int j, double h) {
  Vec xp = x, xm = x;
  xp[j] += h;
  xm[j] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

Vec uniform_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace oracles
