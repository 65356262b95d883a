#include "symred/mechanical.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace symred {

namespace {

constexpr double kFdStep = 1e-6;

Mat metric_block(const std::function<Mat(const Vec&)>& f, const Vec& x, int n, const char* who) {
  Mat m = f(x);
  if (m.rows() != n || m.cols() != n)
    throw ValidationError(std::string(who) + ": block has the wrong shape");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw ValidationError(std::string(who) + ": block is not symmetric");
  return m;
}

Mat spd_inverse(const Mat& m, const char* who) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success)
    throw ValidationError(std::string(who) + ": block is not positive definite");
  return llt.solve(Mat::Identity(m.rows(), m.cols()));
}

std::vector<Mat> block_jacobian(const std::function<Mat(const Vec&)>& f,
                                const std::function<std::vector<Mat>(const Vec&)>& jac,
                                const Vec& x, int n, int base_dim, const char* who) {
  if (jac) {
    std::vector<Mat> d = jac(x);
    if (static_cast<int>(d.size()) != base_dim)
      throw ValidationError(std::string(who) + ": jacobian must have one block per base direction");
    return d;
  }
  std::vector<Mat> d(base_dim);
  Vec xp = x, xm = x;
  for (int j = 0; j < base_dim; ++j) {
    xp[j] = x[j] + kFdStep;
    xm[j] = x[j] - kFdStep;
    d[j] = (metric_block(f, xp, n, who) - metric_block(f, xm, n, who)) / (2.0 * kFdStep);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return d;
}

}  // namespace

void InvariantMetric::validate() const {
  conn.validate();
  if (!k_base || !k_vert) throw ValidationError("invariant metric: block callables are empty");
  // Spot checks at the chart center; per-point shape and definiteness are
  // re-verified at every evaluation.
  const Vec x0 = 0.5 * (conn.chart.lo + conn.chart.hi);
  (void)spd_inverse(metric_block(k_base, x0, conn.base_dim, "k_base"), "k_base");
  (void)spd_inverse(metric_block(k_vert, x0, conn.group.dim, "k_vert"), "k_vert");
}

ForceField zero_force(int base_dim, int dim) {
  return {[base_dim](const Vec&, const Vec&, const Vec&) { return Vec::Zero(base_dim).eval(); },
          [dim](const Vec&, const Vec&, const Vec&) { return Vec::Zero(dim).eval(); }};
}

ChristoffelTable christoffel_table(const InvariantMetric& metric, const Vec& x) {
  const int m = metric.conn.base_dim;
  const int r = metric.conn.group.dim;
  if (x.size() != m) throw ValidationError("christoffel_table: x has the wrong dimension");

  const Mat kb = metric_block(metric.k_base, x, m, "k_base");
  const Mat kv = metric_block(metric.k_vert, x, r, "k_vert");
  const Mat kbi = spd_inverse(kb, "k_base");
  const Mat kvi = spd_inverse(kv, "k_vert");
  const std::vector<Mat> dkb =
      block_jacobian(metric.k_base, metric.k_base_jac, x, m, m, "k_base");
  const std::vector<Mat> dkv =
      block_jacobian(metric.k_vert, metric.k_vert_jac, x, r, m, "k_vert");
  const std::vector<Mat> K = curvature(metric.conn, x);
  const std::vector<Mat> ups = adjoint_connection(metric.conn, x);
  const std::vector<Mat>& C = metric.conn.group.C;

  ChristoffelTable table;
  table.base_dim = m;
  table.dim = r;
  table.coeff.assign(m + r, Mat::Zero(m + r, m + r));

  // Horizontal-horizontal: the base Levi-Civita part and half the curvature.
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m; ++i) {
        double sum = 0.0;
        for (int l = 0; l < m; ++l)
          sum += kbi(i, l) * (dkb[j](l, k) + dkb[k](l, j) - dkb[l](j, k));
        table.coeff[i](j, k) = 0.5 * sum;
      }
      for (int a = 0; a < r; ++a) table.coeff[m + a](j, k) = 0.5 * K[a](j, k);
    }

  // Mixed slots. The horizontal component is shared between nabla_X Ehat and
  // nabla_Ehat X; the vertical components differ by the mixed bracket.
  for (int j = 0; j < m; ++j)
    for (int b = 0; b < r; ++b) {
      for (int i = 0; i < m; ++i) {
        double sum = 0.0;
        for (int l = 0; l < m; ++l)
          for (int c = 0; c < r; ++c) sum += kbi(i, l) * kv(b, c) * K[c](j, l);
        table.coeff[i](j, m + b) = -0.5 * sum;
        table.coeff[i](m + b, j) = -0.5 * sum;
      }
      for (int a = 0; a < r; ++a) {
        double sym = 0.0, anti = 0.0;
        for (int c = 0; c < r; ++c) {
          double t1 = dkv[j](b, c);
          double t2 = 0.0, t3 = 0.0;
          for (int d = 0; d < r; ++d) {
            t2 += kv(b, d) * ups[j](d, c);
            t3 += kv(c, d) * ups[j](d, b);
          }
          sym += kvi(a, c) * (t1 - t2);
          anti += kvi(a, c) * t3;
        }
        table.coeff[m + a](j, m + b) = 0.5 * (sym + anti);
        table.coeff[m + a](m + b, j) = 0.5 * (sym - anti);
      }
    }

  // Vertical-vertical slots.
  for (int b = 0; b < r; ++b)
    for (int c = 0; c < r; ++c) {
      for (int i = 0; i < m; ++i) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          double inner = -dkv[j](b, c);
          for (int d = 0; d < r; ++d)
            inner += kv(b, d) * ups[j](d, c) + kv(c, d) * ups[j](d, b);
          sum += kbi(i, j) * inner;
        }
        table.coeff[i](m + b, m + c) = 0.5 * sum;
      }
      for (int a = 0; a < r; ++a) {
        double sum = -C[a](b, c);
        for (int d = 0; d < r; ++d) {
          double inner = 0.0;
          for (int e = 0; e < r; ++e) inner += kv(b, e) * C[e](c, d) + kv(c, e) * C[e](b, d);
          sum += kvi(a, d) * inner;
        }
        table.coeff[m + a](m + b, m + c) = 0.5 * sum;
      }
    }

  return table;
}

InvariantSODE mechanical_sode(const InvariantMetric& metric, const ForceField& force) {
  metric.validate();
  if (!force.base || !force.vert)
    throw ValidationError("mechanical_sode: force callables are empty");
  const int m = metric.conn.base_dim;
  const int r = metric.conn.group.dim;

  // Geodesic spray in the adapted frame, contracted against the frame
  // velocity u = (v, w), plus forcing. The algebra forcing G is defined by
  // wdot = G - Upsilon(v) w, so the bracket term is added back here.
  const auto spray = [metric, m, r](const Vec& x, const Vec& v, const Vec& w) {
    const ChristoffelTable table = christoffel_table(metric, x);
    Vec u(m + r);
    u << v, w;
    Vec acc = Vec::Zero(m + r);
    for (int alpha = 0; alpha < m + r; ++alpha)
      acc[alpha] = -u.dot(table.coeff[alpha] * u);
    return acc;
  };

  InvariantSODE sys;
  sys.conn = metric.conn;
  sys.base_force = [spray, force, m](const Vec& x, const Vec& v, const Vec& w) {
    return Vec(spray(x, v, w).segment(0, m) + force.base(x, v, w));
  };
  sys.vert_force = [spray, force, metric, m, r](const Vec& x, const Vec& v, const Vec& w) {
    const Vec wacc = spray(x, v, w).segment(m, r);
    const Vec ups_vw = bracket(metric.conn.group, metric.conn.gamma(x).transpose() * v, w);
    return Vec(wacc + force.vert(x, v, w) + ups_vw);
  };
  return sys;
}

double kinetic_energy(const InvariantMetric& metric, const ReducedState& s) {
  const Mat kb = metric_block(metric.k_base, s.x, metric.conn.base_dim, "k_base");
  const Mat kv = metric_block(metric.k_vert, s.x, metric.conn.group.dim, "k_vert");
  return 0.5 * s.v.dot(kb * s.v) + 0.5 * s.w.dot(kv * s.w);
}

GyroscopicTensor gyroscopic_tensor(const InvariantMetric& metric, const Vec& x) {
  const int m = metric.conn.base_dim;
  const int r = metric.conn.group.dim;
  if (r != 1)
    throw ValidationError("gyroscopic_tensor: defined for one-dimensional groups only");
  const Mat kb = metric_block(metric.k_base, x, m, "k_base");
  const Mat kv = metric_block(metric.k_vert, x, 1, "k_vert");
  const Mat kbi = spd_inverse(kb, "k_base");
  const Mat K = curvature(metric.conn, x)[0];

  GyroscopicTensor out;
  out.mixed = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += kbi(i, k) * K(j, k);
      out.mixed(i, j) = kv(0, 0) * sum;
    }
  out.lowered = kb * out.mixed;  // equals kv * K^T, antisymmetric
  return out;
}

bool is_bi_invariant(const LieGroupSpec& spec, const Mat& k, double tol) {
  if (k.rows() != spec.dim || k.cols() != spec.dim)
    throw ValidationError("is_bi_invariant: k has the wrong shape");
  for (int a = 0; a < spec.dim; ++a)
    for (int b = 0; b < spec.dim; ++b)
      for (int c = 0; c < spec.dim; ++c) {
        double sum = 0.0;
        for (int d = 0; d < spec.dim; ++d)
          sum += spec.C[d](a, b) * k(d, c) + spec.C[d](a, c) * k(b, d);
        if (std::abs(sum) > tol) return false;
      }
  return true;
}

}  // namespace symred
