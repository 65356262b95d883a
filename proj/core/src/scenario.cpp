#include "symred/scenario.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

namespace symred {

namespace {

using nlohmann::json;

json parse_params(const std::string& text) {
  try {
    json j = text.empty() ? json::object() : json::parse(text);
    if (!j.is_object()) throw ValidationError("scenario params must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario params: ") + e.what());
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scenario) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ValidationError("scenario '" + scenario + "': unknown parameter '" + item.key() + "'");
}

double number_param(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ValidationError(std::string("scenario parameter '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string string_param(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw ValidationError(std::string("scenario parameter '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Mat matrix_param(const json& j, const char* key, int rows, int cols) {
  const auto& node = j.at(key);
  if (!node.is_array() || static_cast<int>(node.size()) != rows)
    throw ValidationError(std::string("scenario parameter '") + key + "' must be a " +
                          std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!node[r].is_array() || static_cast<int>(node[r].size()) != cols)
      throw ValidationError(std::string("scenario parameter '") + key + "' has a malformed row");
    for (int c = 0; c < cols; ++c) m(r, c) = node[r][c].get<double>();
  }
  return m;
}

std::function<Mat(const Vec&)> constant_fn(const Mat& m) {
  return [m](const Vec&) { return m; };
}

std::function<std::vector<Mat>(const Vec&)> zero_jac_fn(int count, int rows, int cols) {
  const std::vector<Mat> zeros(count, Mat::Zero(rows, cols));
  return [zeros](const Vec&) { return zeros; };
}

Scenario assemble(const std::string& name, InvariantMetric metric, ForceField force,
                  FullState initial, IntegratorConfig integ) {
  Scenario s;
  s.name = name;
  s.metric = std::move(metric);
  s.force = std::move(force);
  s.sode = mechanical_sode(s.metric, s.force);
  s.initial = std::move(initial);
  s.integrator = integ;
  return s;
}

Scenario make_wong(const json& p) {
  reject_unknown_keys(p, {"kappa", "gamma_amplitude", "gamma_style", "k_vert", "chart_half_width"},
                      "wong");
  const double kappa = number_param(p, "kappa", 1.0);
  const double mu = number_param(p, "gamma_amplitude", 1.0);
  const std::string style = string_param(p, "gamma_style", "axial");
  const double half_width = number_param(p, "chart_half_width", 50.0);
  if (!(kappa > 0.0)) throw ValidationError("scenario 'wong': kappa must be positive");
  if (style != "axial" && style != "full")
    throw ValidationError("scenario 'wong': gamma_style must be 'axial' or 'full'");

  const LieGroupSpec group = so3_spec();
  Mat kv = kappa * Mat::Identity(3, 3);
  if (p.contains("k_vert")) kv = matrix_param(p, "k_vert", 3, 3);
  if (!is_bi_invariant(group, kv))
    throw ValidationError(
        "scenario 'wong': the fiber metric must be bi-invariant on so(3); "
        "only multiples of the identity qualify");

  ConnectionData conn;
  conn.group = group;
  conn.base_dim = 3;
  conn.chart = ChartBox::cube(3, half_width);
  if (style == "axial") {
    // Gauge potential valued along the third generator, with the planar
    // uniform-field profile; curvature is nonzero while the potential stays
    // in one abelian direction.
    conn.gamma = [mu](const Vec& x) {
      Mat g = Mat::Zero(3, 3);
      g(0, 2) = -0.5 * mu * x[1];
      g(1, 2) = 0.5 * mu * x[0];
      return g;
    };
    conn.gamma_jac = [mu](const Vec&) {
      std::vector<Mat> jac(3, Mat::Zero(3, 3));
      jac[0](1, 2) = 0.5 * mu;
      jac[1](0, 2) = -0.5 * mu;
      return jac;
    };
  } else {
    // Components along all three generators; the commutator term contributes
    // to the curvature and the charge genuinely rotates.
    conn.gamma = [mu](const Vec& x) {
      Mat g(3, 3);
      g << mu, 0.3 * mu * x[2], 0.0,
           0.0, mu, 0.3 * mu * x[0],
           0.3 * mu * x[1], 0.0, mu;
      return g;
    };
    conn.gamma_jac = [mu](const Vec&) {
      std::vector<Mat> jac(3, Mat::Zero(3, 3));
      jac[0](1, 2) = 0.3 * mu;
      jac[1](2, 0) = 0.3 * mu;
      jac[2](0, 1) = 0.3 * mu;
      return jac;
    };
  }

  InvariantMetric metric;
  metric.conn = conn;
  metric.k_base = constant_fn(Mat::Identity(3, 3));
  metric.k_vert = constant_fn(kv);
  metric.k_base_jac = zero_jac_fn(3, 3, 3);
  metric.k_vert_jac = zero_jac_fn(3, 3, 3);

  FullState init;
  init.x = Vec::Zero(3);
  init.v = Vec(3);
  init.v << 1.0, 0.0, 0.2;
  init.w = Vec(3);
  if (style == "axial")
    init.w << 0.0, 0.0, 1.0;
  else
    init.w << 0.4, 0.3, 0.5;
  init.g = Mat::Identity(3, 3);

  IntegratorConfig integ;
  integ.step = 1e-3;
  integ.t_end = 10.0;
  integ.method = Method::rk4;
  return assemble("wong", std::move(metric), zero_force(3, 3), std::move(init), integ);
}

Scenario make_magnetic(const json& p) {
  reject_unknown_keys(p, {"B", "chart_half_width"}, "magnetic_particle");
  const double B = number_param(p, "B", 1.0);
  const double half_width = number_param(p, "chart_half_width", 10.0);

  ConnectionData conn;
  conn.group = u1_spec();
  conn.base_dim = 3;
  conn.chart = ChartBox::cube(3, half_width);
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

  InvariantMetric metric;
  metric.conn = conn;
  metric.k_base = constant_fn(Mat::Identity(3, 3));
  metric.k_vert = constant_fn(Mat::Identity(1, 1));
  metric.k_base_jac = zero_jac_fn(3, 3, 3);
  metric.k_vert_jac = zero_jac_fn(3, 1, 1);

  FullState init;
  init.x = Vec::Zero(3);
  init.v = Vec(3);
  init.v << 1.0, 0.0, 0.0;
  init.w = Vec::Constant(1, 1.0);
  init.g = Mat::Identity(2, 2);

  IntegratorConfig integ;
  integ.step = 1e-3;
  integ.t_end = 10.0;
  integ.method = Method::rk4;
  return assemble("magnetic_particle", std::move(metric), zero_force(3, 1), std::move(init),
                  integ);
}

Scenario make_bullo_lewis(const json& p) {
  reject_unknown_keys(p, {"lambda", "alpha", "chart_half_width"}, "bullo_lewis");
  const double lambda = number_param(p, "lambda", 1.0);
  const double alpha = number_param(p, "alpha", 0.3);
  const double half_width = number_param(p, "chart_half_width", 20.0);
  if (1.0 + alpha * 2.0 * half_width * half_width <= 0.0)
    throw ValidationError(
        "scenario 'bullo_lewis': fiber inertia 1 + alpha |x|^2 is not positive on the chart");

  ConnectionData conn;
  conn.group = u1_spec();
  conn.base_dim = 2;
  conn.chart = ChartBox::cube(2, half_width);
  conn.gamma = [lambda](const Vec& x) {
    Mat g(2, 1);
    g << -0.5 * lambda * x[1], 0.5 * lambda * x[0];
    return g;
  };
  conn.gamma_jac = [lambda](const Vec&) {
    std::vector<Mat> jac(2, Mat::Zero(2, 1));
    jac[0](1, 0) = 0.5 * lambda;
    jac[1](0, 0) = -0.5 * lambda;
    return jac;
  };

  InvariantMetric metric;
  metric.conn = conn;
  metric.k_base = constant_fn(Mat::Identity(2, 2));
  metric.k_vert = [alpha](const Vec& x) {
    return Mat::Constant(1, 1, 1.0 + alpha * x.squaredNorm());
  };
  metric.k_base_jac = zero_jac_fn(2, 2, 2);
  metric.k_vert_jac = [alpha](const Vec& x) {
    std::vector<Mat> jac(2);
    for (int j = 0; j < 2; ++j) jac[j] = Mat::Constant(1, 1, 2.0 * alpha * x[j]);
    return jac;
  };

  FullState init;
  init.x = Vec(2);
  init.x << 0.5, 0.0;
  init.v = Vec(2);
  init.v << 0.0, 0.7;
  init.w = Vec::Constant(1, 0.8);
  init.g = Mat::Identity(2, 2);

  IntegratorConfig integ;
  integ.step = 1e-3;
  integ.t_end = 10.0;
  integ.method = Method::rk4;
  return assemble("bullo_lewis", std::move(metric), zero_force(2, 1), std::move(init), integ);
}

Scenario make_free(const json& p) {
  reject_unknown_keys(p, {"group", "base_dim", "chart_half_width"}, "free_invariant");
  const std::string group_name = string_param(p, "group", "SO(3)");
  const int base_dim = static_cast<int>(number_param(p, "base_dim", 3.0));
  const double half_width = number_param(p, "chart_half_width", 1e6);
  if (base_dim < 1 || base_dim > 16)
    throw ValidationError("scenario 'free_invariant': base_dim out of range");

  LieGroupSpec group;
  if (group_name == "SO(3)")
    group = so3_spec();
  else if (group_name == "U(1)")
    group = u1_spec();
  else if (group_name == "SE(2)")
    group = se2_spec();
  else
    throw ValidationError("scenario 'free_invariant': group must be SO(3), U(1), or SE(2)");

  const int r = group.dim;
  ConnectionData conn;
  conn.group = group;
  conn.base_dim = base_dim;
  conn.chart = ChartBox::cube(base_dim, half_width);
  conn.gamma = [base_dim, r](const Vec&) { return Mat::Zero(base_dim, r).eval(); };
  conn.gamma_jac = zero_jac_fn(base_dim, base_dim, r);

  InvariantMetric metric;
  metric.conn = conn;
  metric.k_base = constant_fn(Mat::Identity(base_dim, base_dim));
  metric.k_vert = constant_fn(Mat::Identity(r, r));
  metric.k_base_jac = zero_jac_fn(base_dim, base_dim, base_dim);
  metric.k_vert_jac = zero_jac_fn(base_dim, r, r);

  FullState init;
  init.x = Vec::Zero(base_dim);
  init.v = Vec::Zero(base_dim);
  init.v[0] = 1.0;
  if (base_dim > 1) init.v[1] = 0.1;
  init.w = Vec(r);
  for (int a = 0; a < r; ++a) init.w[a] = 0.5 - 0.2 * a;
  init.g = Mat::Identity(group.matrix_size, group.matrix_size);

  IntegratorConfig integ;
  integ.step = 1e-3;
  integ.t_end = 5.0;
  integ.method = Method::rk4;
  return assemble("free_invariant", std::move(metric), zero_force(base_dim, r), std::move(init),
                  integ);
}

}  // namespace

Scenario scenario_library(const std::string& name, const std::string& params_json) {
  const json p = parse_params(params_json);
  if (name == "wong") return make_wong(p);
  if (name == "magnetic_particle") return make_magnetic(p);
  if (name == "bullo_lewis") return make_bullo_lewis(p);
  if (name == "free_invariant") return make_free(p);
  throw ValidationError("unknown scenario '" + name +
                        "' (expected wong | magnetic_particle | bullo_lewis | free_invariant)");
}

}  // namespace symred
