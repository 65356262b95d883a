#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "symred/bundle.hpp"
#include "symred/scenario.hpp"

using namespace symred;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// A curved SO(3) connection with simple hand-differentiable entries.
ConnectionData curved_so3_connection() {
  ConnectionData conn;
  conn.group = so3_spec();
  conn.base_dim = 3;
  conn.gamma = [](const Vec& x) {
    Mat g = Mat::Zero(3, 3);
    g(0, 0) = 0.5;
    g(0, 1) = 0.1 * x[1];
    g(1, 1) = 0.4;
    g(1, 2) = 0.2 * x[2];
    g(2, 0) = 0.3 * x[0];
    g(2, 2) = 0.6;
    return g;
  };
  conn.gamma_jac = [](const Vec&) {
    std::vector<Mat> jac(3, Mat::Zero(3, 3));
    jac[0](2, 0) = 0.3;
    jac[1](0, 1) = 0.1;
    jac[2](1, 2) = 0.2;
    return jac;
  };
  conn.chart = ChartBox::cube(3, 10.0);
  return conn;
}

ConnectionData magnetic_connection(double B) {
  ConnectionData conn;
  conn.group = u1_spec();
  conn.base_dim = 3;
  conn.gamma = [B](const Vec& x) {
    Mat g(3, 1);
    g << -0.5 * B * x[1], 0.5 * B * x[0], 0.0;
    return g;
  };
  conn.gamma_jac = [B](const Vec&) {
    std::vector<Mat> jac(3, Mat::Zero(3, 1));
    jac[0](1, 0) = 0.5 * B;
    jac[1](0, 0) = -0.5 * B;
    return jac;
  };
  conn.chart = ChartBox::cube(3, 10.0);
  return conn;
}

// Flatten (x, g) into one vector so generic finite-difference machinery can
// treat frame fields as fields on R^(m + n^2).
Vec flatten(const Vec& x, const Mat& g) {
  Vec z(x.size() + g.size());
  z.head(x.size()) = x;
  z.tail(g.size()) = Eigen::Map<const Vec>(g.data(), g.size());
  return z;
}

}  // namespace

TEST_SUITE("bundle") {

TEST_CASE("chart box membership") {
  const ChartBox box = ChartBox::cube(2, 1.5);
  Vec inside(2), outside(2), edge(2);
  inside << 0.3, -1.2;
  outside << 0.0, 1.6;
  edge << 1.5, -1.5;
  CHECK(box.contains(inside));
  CHECK_FALSE(box.contains(outside));
  CHECK(box.contains(edge));
}

TEST_CASE("connection validation catches incomplete data") {
  ConnectionData conn = curved_so3_connection();
  CHECK_NOTHROW(conn.validate());

  ConnectionData no_gamma = curved_so3_connection();
  no_gamma.gamma = nullptr;
  CHECK_THROWS_AS(no_gamma.validate(), ValidationError);

  ConnectionData bad_chart = curved_so3_connection();
  bad_chart.chart = ChartBox::cube(2, 1.0);
  CHECK_THROWS_AS(bad_chart.validate(), ValidationError);

  ConnectionData unfinalized = curved_so3_connection();
  unfinalized.group.basis_pinv = Mat();
  CHECK_THROWS_AS(unfinalized.validate(), ValidationError);
}

TEST_CASE("fundamental field generates the right action") {
  const ConnectionData conn = curved_so3_connection();
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const BundlePoint p{oracles::uniform_vec(rng, 3),
                        exponential(conn.group, oracles::uniform_vec(rng, 3))};
    const Vec xi = oracles::uniform_vec(rng, 3);
    const BundleTangent v = fundamental_field(conn, p, xi);
    CHECK(max_abs(v.xdot) == 0.0);
    CHECK(max_abs(v.gdot - p.g * algebra_matrix(conn.group, xi)) <= 1e-14);
  }
}

TEST_CASE("connection form: fundamental fields, horizontal lifts, equivariance") {
  std::mt19937_64 rng(43);
  const ConnectionData so3_conn = curved_so3_connection();
  const ConnectionData u1_conn = magnetic_connection(1.0);
  const std::vector<const ConnectionData*> conns = {&so3_conn, &u1_conn};
  for (const ConnectionData* cp : conns) {
    const ConnectionData& conn = *cp;
    const int r = conn.group.dim;
    for (int trial = 0; trial < 25; ++trial) {
      const BundlePoint p{oracles::uniform_vec(rng, 3),
                          exponential(conn.group, oracles::uniform_vec(rng, r))};
      const Vec xi = oracles::uniform_vec(rng, r);
      const Vec xdot = oracles::uniform_vec(rng, 3);

      CHECK(max_abs(connection_form(conn, p, fundamental_field(conn, p, xi)) - xi) <= 1e-12);
      CHECK(max_abs(connection_form(conn, p, horizontal_rhs(conn, p, xdot))) <= 1e-12);

      // A general tangent, its value, and the same tangent pushed along the
      // action of h: values must be related by the adjoint.
      const Vec eta = oracles::uniform_vec(rng, r);
      const BundleTangent tangent{xdot, algebra_matrix(conn.group, eta) * p.g};
      const Vec w1 = connection_form(conn, p, tangent);
      const Mat h = exponential(conn.group, oracles::uniform_vec(rng, r));
      const BundlePoint shifted{p.x, p.g * h};
      const BundleTangent pushed{tangent.xdot, tangent.gdot * h};
      const Vec w2 = connection_form(conn, shifted, pushed);
      CHECK(max_abs(w2 - adjoint_matrix(conn.group, h) * w1) <= 1e-12);
    }
  }
}

TEST_CASE("curvature of the uniform magnetic potential") {
  const double B = 1.7;
  const ConnectionData conn = magnetic_connection(B);
  std::mt19937_64 rng(47);
  const std::vector<Mat> K = curvature(conn, oracles::uniform_vec(rng, 3, -5.0, 5.0));
  REQUIRE(K.size() == 1);
  CHECK(K[0](0, 1) == doctest::Approx(-B).epsilon(1e-14));
  CHECK(K[0](1, 0) == doctest::Approx(B).epsilon(1e-14));
  CHECK(std::abs(K[0](0, 2)) <= 1e-14);
  CHECK(std::abs(K[0](1, 2)) <= 1e-14);
  CHECK(max_abs(K[0] + K[0].transpose()) <= 1e-14);
}

TEST_CASE("curvature of a constant connection is the negated bracket term") {
  ConnectionData conn;
  conn.group = so3_spec();
  conn.base_dim = 3;
  conn.gamma = [](const Vec&) { return Mat::Identity(3, 3).eval(); };
  conn.chart = ChartBox::cube(3, 10.0);
  const std::vector<Mat> K = curvature(conn, Vec::Zero(3));
  for (int a = 0; a < 3; ++a) CHECK(max_abs(K[a] + conn.group.C[a]) <= 1e-9);
}

TEST_CASE("curvature matches the numerical bracket of the horizontal frame") {
  const ConnectionData conn = curved_so3_connection();
  const LieGroupSpec& spec = conn.group;
  std::mt19937_64 rng(53);
  const Vec x0 = oracles::uniform_vec(rng, 3);
  const Mat g0 = exponential(spec, oracles::uniform_vec(rng, 3));
  const Vec z0 = flatten(x0, g0);

  const auto frame_field = [&](int i) {
    return oracles::FlatField([&conn, &spec, i](const Vec& z) {
      const Vec x = z.head(3);
      const Mat g = Eigen::Map<const Mat>(z.tail(9).data(), 3, 3);
      const Mat gamma = conn.gamma(x);
      Mat omega = Mat::Zero(3, 3);
      for (int a = 0; a < 3; ++a) omega += gamma(i, a) * spec.basis[a];
      return flatten(Vec::Unit(3, i), Mat(-omega * g));
    });
  };

  const std::vector<Mat> K = curvature(conn, x0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Vec lhs = oracles::numerical_field_bracket(frame_field(i), frame_field(j), z0);
      Mat expected_gdot = Mat::Zero(3, 3);
      for (int a = 0; a < 3; ++a) expected_gdot += K[a](i, j) * (spec.basis[a] * g0);
      const Vec expected = flatten(Vec::Zero(3), expected_gdot);
      CHECK(max_abs(lhs - expected) <= 5e-5);
    }
  }
}

TEST_CASE("curvature finite-difference fallback agrees with analytic derivatives") {
  ConnectionData with_jac = curved_so3_connection();
  ConnectionData without_jac = curved_so3_connection();
  without_jac.gamma_jac = nullptr;
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = oracles::uniform_vec(rng, 3, -2.0, 2.0);
    const std::vector<Mat> Ka = curvature(with_jac, x);
    const std::vector<Mat> Kf = curvature(without_jac, x);
    for (int a = 0; a < 3; ++a) CHECK(max_abs(Ka[a] - Kf[a]) <= 1e-8);
  }
}

TEST_CASE("adjoint connection coefficients") {
  ConnectionData conn;
  conn.group = so3_spec();
  conn.base_dim = 2;
  conn.gamma = [](const Vec&) {
    Mat g = Mat::Zero(2, 3);
    g(0, 0) = 1.0;  // first base direction lifts along E_1
    g(1, 2) = 2.0;
    return g;
  };
  conn.chart = ChartBox::cube(2, 10.0);
  const std::vector<Mat> ups = adjoint_connection(conn, Vec::Zero(2));
  REQUIRE(ups.size() == 2);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      CHECK(ups[0](a, b) == doctest::Approx(conn.group.C[a](0, b)).epsilon(1e-14));
      CHECK(ups[1](a, b) == doctest::Approx(2.0 * conn.group.C[a](2, b)).epsilon(1e-14));
    }

  // Contraction against a base velocity is ad of the contracted connection.
  const ConnectionData curved = curved_so3_connection();
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = oracles::uniform_vec(rng, 3);
    const Vec v = oracles::uniform_vec(rng, 3);
    const Vec w = oracles::uniform_vec(rng, 3);
    const std::vector<Mat> u = adjoint_connection(curved, x);
    Mat contracted = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) contracted += v[i] * u[i];
    const Vec xi = curved.gamma(x).transpose() * v;
    CHECK(max_abs(contracted * w - bracket(curved.group, xi, w)) <= 1e-13);
  }
}

TEST_CASE("covariant derivative vanishes on parallel-transported sections") {
  // x(t) = x0 + t v with a constant connection: w(t) = A(exp(t xi0)) w0 solves
  // wdot + ad(xi0) w = 0, so the covariant derivative along the curve is zero.
  ConnectionData conn;
  conn.group = so3_spec();
  conn.base_dim = 3;
  Mat g0 = Mat::Zero(3, 3);
  g0(0, 0) = 0.7;
  g0(1, 2) = -0.4;
  g0(2, 1) = 0.9;
  conn.gamma = [g0](const Vec&) { return g0; };
  conn.chart = ChartBox::cube(3, 50.0);

  Vec x0(3), v(3), w0(3);
  x0 << 0.1, -0.2, 0.3;
  v << 1.0, 0.5, -0.25;
  w0 << 0.3, -0.8, 0.5;
  const Vec xi0 = g0.transpose() * v;

  std::vector<double> times;
  std::vector<Vec> xs, ws;
  const double h = 1e-3;
  for (int k = 0; k <= 400; ++k) {
    const double t = k * h;
    times.push_back(t);
    xs.push_back(x0 + t * v);
    ws.push_back(adjoint_matrix(conn.group, exponential(conn.group, xi0, t)) * w0);
  }
  const CovariantSeries series = adjoint_covariant_derivative(conn, times, xs, ws);
  REQUIRE(series.t.size() == times.size() - 2);
  for (const Vec& val : series.value) CHECK(max_abs(val) <= 1e-6);
}

TEST_CASE("covariant derivative of the charge along reduced trajectories") {
  const Scenario sc = scenario_library("wong", R"({"gamma_style": "full"})");
  IntegratorConfig cfg = sc.integrator;
  cfg.t_end = 2.0;
  cfg.step = 5e-4;  // the centered-difference defect scales with the grid step squared
  const ReducedTrajectory traj = integrate_reduced(sc.sode, sc.initial_reduced(), cfg);
  std::vector<Vec> xs, ws;
  for (const ReducedState& s : traj.states) {
    xs.push_back(s.x);
    ws.push_back(s.w);
  }
  const CovariantSeries series =
      adjoint_covariant_derivative(sc.metric.conn, traj.t, xs, ws);
  double worst = 0.0;
  for (const Vec& val : series.value) worst = std::max(worst, max_abs(val));
  CHECK(worst <= 1e-6);
}

TEST_CASE("covariant derivative needs at least three samples") {
  const ConnectionData conn = curved_so3_connection();
  std::vector<double> times = {0.0, 0.1};
  std::vector<Vec> xs = {Vec::Zero(3), Vec::Zero(3)};
  std::vector<Vec> ws = {Vec::Ones(3), Vec::Ones(3)};
  CHECK_THROWS_AS(adjoint_covariant_derivative(conn, times, xs, ws), ValidationError);
}

}  // TEST_SUITE
