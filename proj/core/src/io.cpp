#include "symred/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace symred {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ValidationError("config field '" + field + "': " + what);
}

const json& require_node(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) field_error(path, "missing");
  return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& path) {
  const json& node = require_node(j, key, path);
  if (!node.is_number()) field_error(path, "must be a number");
  return node.get<double>();
}

double optional_number(const json& j, const std::string& key, const std::string& path,
                       double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) field_error(path, "must be a number");
  return j.at(key).get<double>();
}

std::string optional_string(const json& j, const std::string& key, const std::string& path,
                            const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) field_error(path, "must be a string");
  return j.at(key).get<std::string>();
}

Vec vector_field(const json& node, const std::string& path, int expected = -1) {
  if (!node.is_array()) field_error(path, "must be an array of numbers");
  Vec v(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) field_error(path, "must be an array of numbers");
    v[i] = node[i].get<double>();
  }
  if (expected >= 0 && v.size() != expected)
    field_error(path, "expected length " + std::to_string(expected) + ", got " +
                          std::to_string(v.size()));
  return v;
}

Mat matrix_field(const json& node, const std::string& path, int rows = -1, int cols = -1) {
  if (!node.is_array() || node.empty()) field_error(path, "must be a matrix (array of rows)");
  const int r = static_cast<int>(node.size());
  if (!node[0].is_array() || node[0].empty()) field_error(path, "rows must be arrays of numbers");
  const int c = static_cast<int>(node[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!node[i].is_array() || static_cast<int>(node[i].size()) != c)
      field_error(path, "rows have inconsistent lengths");
    for (int k = 0; k < c; ++k) {
      if (!node[i][k].is_number()) field_error(path, "entries must be numbers");
      m(i, k) = node[i][k].get<double>();
    }
  }
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols))
    field_error(path, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                          ", got " + std::to_string(r) + "x" + std::to_string(c));
  return m;
}

// ---- custom system builders ------------------------------------------------

LieGroupSpec group_from_config(const json& node, const std::string& path) {
  if (!node.is_object()) field_error(path, "must be an object");
  if (node.contains("builtin")) {
    const std::string name = node.at("builtin").get<std::string>();
    if (name == "SO(3)") return so3_spec();
    if (name == "U(1)") return u1_spec();
    if (name == "SE(2)") return se2_spec();
    field_error(path + ".builtin", "must be SO(3) | U(1) | SE(2)");
  }
  try {
    return lie_group_from_json(node.dump());
  } catch (const ValidationError& e) {
    field_error(path, e.what());
  } catch (const RepresentationError& e) {
    field_error(path, e.what());
  }
}

struct TabulatedGrid {
  std::vector<std::vector<double>> axes;
  std::vector<double> values;  // flattened, last grid axis fastest, then (i,a)
  int rows = 0, cols = 0;

  Mat eval(Vec x) const {
    const int m = static_cast<int>(axes.size());
    // Clamp into the hull, then locate cells and blend 2^m corners.
    std::vector<int> cell(m);
    std::vector<double> frac(m);
    for (int d = 0; d < m; ++d) {
      const auto& ax = axes[d];
      double xd = std::min(std::max(x[d], ax.front()), ax.back());
      int lo = 0;
      while (lo + 2 < static_cast<int>(ax.size()) && xd > ax[lo + 1]) ++lo;
      cell[d] = lo;
      frac[d] = (xd - ax[lo]) / (ax[lo + 1] - ax[lo]);
    }
    Mat out = Mat::Zero(rows, cols);
    const int corners = 1 << m;
    for (int mask = 0; mask < corners; ++mask) {
      double weight = 1.0;
      size_t flat = 0;
      for (int d = 0; d < m; ++d) {
        const int pick = (mask >> d) & 1;
        weight *= pick ? frac[d] : (1.0 - frac[d]);
        flat = flat * axes[d].size() + static_cast<size_t>(cell[d] + pick);
      }
      if (weight == 0.0) continue;
      const size_t base = flat * static_cast<size_t>(rows) * static_cast<size_t>(cols);
      for (int i = 0; i < rows; ++i)
        for (int a = 0; a < cols; ++a)
          out(i, a) += weight * values[base + static_cast<size_t>(i) * cols + a];
    }
    return out;
  }
};

TabulatedGrid tabulated_from_config(const json& node, const std::string& path, int base_dim,
                                    int rows, int cols) {
  TabulatedGrid tab;
  tab.rows = rows;
  tab.cols = cols;
  const json& grid = require_node(node, "grid", path + ".grid");
  if (!grid.is_array() || static_cast<int>(grid.size()) != base_dim)
    field_error(path + ".grid", "must hold one axis per base dimension");
  size_t points = 1;
  for (int d = 0; d < base_dim; ++d) {
    const Vec ax = vector_field(grid[d], path + ".grid");
    if (ax.size() < 2) field_error(path + ".grid", "each axis needs at least two points");
    for (int i = 0; i + 1 < ax.size(); ++i)
      if (!(ax[i] < ax[i + 1])) field_error(path + ".grid", "axes must be strictly increasing");
    tab.axes.emplace_back(ax.data(), ax.data() + ax.size());
    points *= static_cast<size_t>(ax.size());
  }
  const Vec flat = vector_field(require_node(node, "values", path + ".values"), path + ".values");
  const size_t expected = points * static_cast<size_t>(rows) * static_cast<size_t>(cols);
  if (static_cast<size_t>(flat.size()) != expected)
    field_error(path + ".values", "expected " + std::to_string(expected) + " entries, got " +
                                      std::to_string(flat.size()));
  tab.values.assign(flat.data(), flat.data() + flat.size());
  return tab;
}

void gamma_from_config(ConnectionData& conn, const json& node, const std::string& path) {
  if (!node.is_object()) field_error(path, "must be an object");
  const std::string type = optional_string(node, "type", path + ".type", "");
  if (type.empty()) field_error(path + ".type", "missing");
  const int m = conn.base_dim, r = conn.group.dim;
  if (type == "zero") {
    conn.gamma = [m, r](const Vec&) { return Mat::Zero(m, r).eval(); };
    const std::vector<Mat> zeros(m, Mat::Zero(m, r));
    conn.gamma_jac = [zeros](const Vec&) { return zeros; };
  } else if (type == "constant") {
    const Mat g = matrix_field(require_node(node, "matrix", path + ".matrix"), path + ".matrix",
                               m, r);
    conn.gamma = [g](const Vec&) { return g; };
    const std::vector<Mat> zeros(m, Mat::Zero(m, r));
    conn.gamma_jac = [zeros](const Vec&) { return zeros; };
  } else if (type == "kaluza_klein") {
    if (m != 3 || r != 1)
      field_error(path, "kaluza_klein needs base_dim 3 and a one-dimensional group");
    const double B = optional_number(node, "B", path + ".B", 1.0);
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
  } else if (type == "tabulated") {
    const TabulatedGrid tab = tabulated_from_config(node, path, m, m, r);
    conn.gamma = [tab](const Vec& x) { return tab.eval(x); };
    conn.gamma_jac = nullptr;  // finite differences
  } else {
    field_error(path + ".type", "must be zero | constant | kaluza_klein | tabulated");
  }
}

std::function<Mat(const Vec&)> metric_block_from_config(
    const json& node, const std::string& path, int n, int base_dim,
    std::function<std::vector<Mat>(const Vec&)>& jac_out) {
  if (!node.is_object()) field_error(path, "must be an object");
  const std::string type = optional_string(node, "type", path + ".type", "");
  if (type.empty()) field_error(path + ".type", "missing");
  const std::vector<Mat> zeros(base_dim, Mat::Zero(n, n));
  if (type == "identity") {
    Mat m = Mat::Identity(n, n);
    jac_out = [zeros](const Vec&) { return zeros; };
    return [m](const Vec&) { return m; };
  }
  if (type == "scaled_identity") {
    const double s = require_number(node, "scale", path + ".scale");
    Mat m = s * Mat::Identity(n, n);
    jac_out = [zeros](const Vec&) { return zeros; };
    return [m](const Vec&) { return m; };
  }
  if (type == "constant") {
    const Mat m = matrix_field(require_node(node, "matrix", path + ".matrix"), path + ".matrix",
                               n, n);
    jac_out = [zeros](const Vec&) { return zeros; };
    return [m](const Vec&) { return m; };
  }
  if (type == "radial_quadratic") {
    const double alpha = require_number(node, "alpha", path + ".alpha");
    Mat base = Mat::Identity(n, n);
    if (node.contains("base"))
      base = matrix_field(node.at("base"), path + ".base", n, n);
    jac_out = [alpha, base](const Vec& x) {
      std::vector<Mat> jac(x.size());
      for (int j = 0; j < x.size(); ++j) jac[j] = 2.0 * alpha * x[j] * base;
      return jac;
    };
    return [alpha, base](const Vec& x) { return Mat((1.0 + alpha * x.squaredNorm()) * base); };
  }
  if (type == "tabulated") {
    const TabulatedGrid tab = tabulated_from_config(node, path, base_dim, n, n);
    jac_out = nullptr;
    return [tab](const Vec& x) { return tab.eval(x); };
  }
  field_error(path + ".type",
              "must be identity | scaled_identity | constant | radial_quadratic | tabulated");
}

Scenario custom_scenario(const json& root) {
  const json& sys = require_node(root, "system", "system");
  if (!sys.is_object()) field_error("system", "must be an object");

  ConnectionData conn;
  conn.group = group_from_config(require_node(sys, "group", "system.group"), "system.group");
  const double bd = require_number(sys, "base_dim", "system.base_dim");
  conn.base_dim = static_cast<int>(bd);
  if (conn.base_dim < 1 || conn.base_dim > 16 || bd != conn.base_dim)
    field_error("system.base_dim", "must be an integer in [1, 16]");
  conn.chart = ChartBox::cube(conn.base_dim, 1e6);
  gamma_from_config(conn, require_node(sys, "gamma", "system.gamma"), "system.gamma");

  InvariantMetric metric;
  metric.conn = conn;
  const json& mnode = require_node(sys, "metric", "system.metric");
  metric.k_base = metric_block_from_config(require_node(mnode, "k_base", "system.metric.k_base"),
                                           "system.metric.k_base", conn.base_dim, conn.base_dim,
                                           metric.k_base_jac);
  metric.k_vert = metric_block_from_config(require_node(mnode, "k_vert", "system.metric.k_vert"),
                                           "system.metric.k_vert", conn.group.dim, conn.base_dim,
                                           metric.k_vert_jac);

  ForceField force = zero_force(conn.base_dim, conn.group.dim);
  if (sys.contains("force")) {
    const json& fnode = sys.at("force");
    const std::string type = optional_string(fnode, "type", "system.force.type", "zero");
    if (type == "constant") {
      const Vec fb = vector_field(require_node(fnode, "base", "system.force.base"),
                                  "system.force.base", conn.base_dim);
      const Vec fv = vector_field(require_node(fnode, "vert", "system.force.vert"),
                                  "system.force.vert", conn.group.dim);
      force.base = [fb](const Vec&, const Vec&, const Vec&) { return fb; };
      force.vert = [fv](const Vec&, const Vec&, const Vec&) { return fv; };
    } else if (type != "zero") {
      field_error("system.force.type", "must be zero | constant");
    }
  }

  Scenario s;
  s.name = "custom";
  s.metric = std::move(metric);
  s.force = std::move(force);
  // sode is assembled by the caller after chart/initial overrides.
  s.initial.x = Vec::Zero(conn.base_dim);
  s.initial.v = Vec::Zero(conn.base_dim);
  s.initial.w = Vec::Zero(conn.group.dim);
  s.initial.g = Mat::Identity(conn.group.matrix_size, conn.group.matrix_size);
  s.integrator = IntegratorConfig{};
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("config: top level must be a JSON object");

  RunConfig cfg;
  const std::string name = optional_string(root, "scenario", "scenario", "");
  if (name.empty()) field_error("scenario", "missing");

  if (name == "custom") {
    cfg.scenario = custom_scenario(root);
  } else {
    const std::string params = root.contains("params") ? root.at("params").dump() : "{}";
    cfg.scenario = scenario_library(name, params);
    if (root.contains("system"))
      field_error("system", "only allowed with scenario = custom");
  }
  Scenario& sc = cfg.scenario;
  const int m = sc.metric.conn.base_dim;
  const int r = sc.metric.conn.group.dim;
  const int n = sc.metric.conn.group.matrix_size;

  if (root.contains("chart")) {
    const json& chart = root.at("chart");
    ChartBox box;
    box.lo = vector_field(require_node(chart, "lo", "chart.lo"), "chart.lo", m);
    box.hi = vector_field(require_node(chart, "hi", "chart.hi"), "chart.hi", m);
    for (int i = 0; i < m; ++i)
      if (!(box.lo[i] < box.hi[i])) field_error("chart", "lo must be strictly below hi");
    sc.metric.conn.chart = box;
  }

  if (root.contains("initial")) {
    const json& init = root.at("initial");
    if (init.contains("x0")) sc.initial.x = vector_field(init.at("x0"), "initial.x0", m);
    if (init.contains("v0")) sc.initial.v = vector_field(init.at("v0"), "initial.v0", m);
    if (init.contains("w0")) sc.initial.w = vector_field(init.at("w0"), "initial.w0", r);
    if (init.contains("g0")) {
      const json& g0 = init.at("g0");
      if (g0.contains("matrix"))
        sc.initial.g = matrix_field(g0.at("matrix"), "initial.g0.matrix", n, n);
      else if (g0.contains("exp"))
        sc.initial.g =
            exponential(sc.metric.conn.group, vector_field(g0.at("exp"), "initial.g0.exp", r));
      else
        field_error("initial.g0", "must hold 'matrix' or 'exp'");
      const double res = group_residual(sc.metric.conn.group, sc.initial.g);
      if (res > 1e-8)
        field_error("initial.g0", "not a group element (constraint residual " +
                                      std::to_string(res) + ")");
    }
  }

  if (root.contains("integrator")) {
    const json& integ = root.at("integrator");
    sc.integrator.step = optional_number(integ, "step", "integrator.step", sc.integrator.step);
    sc.integrator.t_end =
        optional_number(integ, "t_end", "integrator.t_end", sc.integrator.t_end);
    sc.integrator.drift_tolerance = optional_number(integ, "drift_tolerance",
                                                    "integrator.drift_tolerance",
                                                    sc.integrator.drift_tolerance);
    if (integ.contains("method"))
      sc.integrator.method = method_from_string(
          optional_string(integ, "method", "integrator.method", "rk4"));
  }
  sc.integrator.validate();

  // Rebuild the reduced equations so every copy of the connection carries the
  // final chart.
  sc.sode = mechanical_sode(sc.metric, sc.force);

  if (root.contains("compare"))
    cfg.compare_tolerance = optional_number(root.at("compare"), "tolerance", "compare.tolerance",
                                            cfg.compare_tolerance);
  if (root.contains("audit"))
    cfg.audit_tolerance =
        optional_number(root.at("audit"), "tolerance", "audit.tolerance", cfg.audit_tolerance);
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) field_error("seed", "must be a nonnegative integer");
    cfg.seed = root.at("seed").get<unsigned long long>();
  }
  cfg.input_path = optional_string(root, "input", "input", "");
  cfg.output_path = optional_string(root, "output", "output", "");

  if (sc.initial.x.size() != m) field_error("initial.x0", "wrong dimension");
  if (!sc.metric.conn.chart.contains(sc.initial.x))
    field_error("initial.x0", "outside the chart box");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

// ---- CSV -------------------------------------------------------------------

namespace {

void append_number(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

std::string reduced_header(int m, int r) {
  std::string h = "t";
  for (int i = 1; i <= m; ++i) h += ",x" + std::to_string(i);
  for (int i = 1; i <= m; ++i) h += ",v" + std::to_string(i);
  for (int a = 1; a <= r; ++a) h += ",w" + std::to_string(a);
  return h;
}

std::string full_header(int m, int r, int n) {
  std::string h = reduced_header(m, r);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) h += ",g" + std::to_string(i) + std::to_string(j);
  return h;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& path, size_t lineno) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ValidationError("csv '" + path + "' line " + std::to_string(lineno) +
                          ": bad number '" + field + "'");
  return value;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               const std::string& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("csv '" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw ValidationError("csv '" + path + "': header mismatch (expected '" + expected_header +
                          "', got '" + line + "')");
  const size_t ncols = split_csv(expected_header).size();
  std::vector<std::vector<double>> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != ncols)
      throw ValidationError("csv '" + path + "' line " + std::to_string(lineno) + ": expected " +
                            std::to_string(ncols) + " columns, got " +
                            std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) row[i] = parse_double(fields[i], path, lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("csv '" + path + "': no data rows");
  return rows;
}

}  // namespace

void write_reduced_csv(const std::string& path, const ReducedTrajectory& traj) {
  if (traj.states.empty()) throw ValidationError("write_reduced_csv: empty trajectory");
  const int m = static_cast<int>(traj.states.front().x.size());
  const int r = static_cast<int>(traj.states.front().w.size());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("csv: cannot write '" + path + "'");
  out << reduced_header(m, r) << "\n";
  std::string line;
  for (size_t k = 0; k < traj.t.size(); ++k) {
    line.clear();
    append_number(line, traj.t[k]);
    const ReducedState& s = traj.states[k];
    for (int i = 0; i < m; ++i) { line += ','; append_number(line, s.x[i]); }
    for (int i = 0; i < m; ++i) { line += ','; append_number(line, s.v[i]); }
    for (int a = 0; a < r; ++a) { line += ','; append_number(line, s.w[a]); }
    out << line << "\n";
  }
}

ReducedTrajectory read_reduced_csv(const std::string& path, int base_dim, int dim) {
  const auto rows = read_csv_rows(path, reduced_header(base_dim, dim));
  ReducedTrajectory traj;
  for (const auto& row : rows) {
    ReducedState s;
    size_t c = 0;
    traj.t.push_back(row[c++]);
    s.x = Vec(base_dim);
    for (int i = 0; i < base_dim; ++i) s.x[i] = row[c++];
    s.v = Vec(base_dim);
    for (int i = 0; i < base_dim; ++i) s.v[i] = row[c++];
    s.w = Vec(dim);
    for (int a = 0; a < dim; ++a) s.w[a] = row[c++];
    traj.states.push_back(std::move(s));
  }
  return traj;
}

void write_full_csv(const std::string& path, const FullTrajectory& traj, int matrix_size) {
  if (traj.states.empty()) throw ValidationError("write_full_csv: empty trajectory");
  const int m = static_cast<int>(traj.states.front().x.size());
  const int r = static_cast<int>(traj.states.front().w.size());
  const int n = matrix_size;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("csv: cannot write '" + path + "'");
  out << full_header(m, r, n) << "\n";
  std::string line;
  for (size_t k = 0; k < traj.t.size(); ++k) {
    line.clear();
    append_number(line, traj.t[k]);
    const FullState& s = traj.states[k];
    for (int i = 0; i < m; ++i) { line += ','; append_number(line, s.x[i]); }
    for (int i = 0; i < m; ++i) { line += ','; append_number(line, s.v[i]); }
    for (int a = 0; a < r; ++a) { line += ','; append_number(line, s.w[a]); }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) { line += ','; append_number(line, s.g(i, j)); }
    out << line << "\n";
  }
}

FullTrajectory read_full_csv(const std::string& path, int base_dim, int dim, int matrix_size) {
  const auto rows = read_csv_rows(path, full_header(base_dim, dim, matrix_size));
  FullTrajectory traj;
  for (const auto& row : rows) {
    FullState s;
    size_t c = 0;
    traj.t.push_back(row[c++]);
    s.x = Vec(base_dim);
    for (int i = 0; i < base_dim; ++i) s.x[i] = row[c++];
    s.v = Vec(base_dim);
    for (int i = 0; i < base_dim; ++i) s.v[i] = row[c++];
    s.w = Vec(dim);
    for (int a = 0; a < dim; ++a) s.w[a] = row[c++];
    s.g = Mat(matrix_size, matrix_size);
    for (int i = 0; i < matrix_size; ++i)
      for (int j = 0; j < matrix_size; ++j) s.g(i, j) = row[c++];
    traj.states.push_back(std::move(s));
  }
  return traj;
}

void write_diagnostics_json(const std::string& path, const RunDiagnostics& diag) {
  json j;
  j["scenario"] = diag.scenario;
  j["command"] = diag.command;
  j["method"] = diag.method;
  j["step"] = diag.step;
  j["t_end"] = diag.t_end;
  j["samples"] = diag.samples;
  j["reprojections"] = diag.reprojections;
  j["max_constraint_drift"] = diag.max_constraint_drift;
  j["final_constraint_residual"] = diag.final_constraint_residual;
  j["chart_ok"] = diag.chart_ok;
  j["conserved"] = json::object();
  for (const auto& [key, value] : diag.conserved) j["conserved"][key] = value;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("diagnostics: cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace symred
