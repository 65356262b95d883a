// Command line driver: reduce, reconstruct, direct, compare, audit.
//
// Exit codes: 0 success / comparison PASS, 1 configuration or validation
// problem, 2 integration failure (chart exit, constraint drift), 3 comparison
// or audit FAIL.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symred/io.hpp"

namespace {

using namespace symred;

// ---- logging ----------------------------------------------------------------

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel g_log_level = LogLevel::warn;

void init_logging() {
  const char* env = std::getenv("SYMRED_LOG");
  if (!env) return;
  const std::string v(env);
  if (v == "error") g_log_level = LogLevel::error;
  else if (v == "warn") g_log_level = LogLevel::warn;
  else if (v == "info") g_log_level = LogLevel::info;
  else if (v == "debug") g_log_level = LogLevel::debug;
  else std::fprintf(stderr, "symred: ignoring unknown SYMRED_LOG value '%s'\n", env);
}

void log_at(LogLevel level, const char* tag, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(g_log_level))
    std::fprintf(stderr, "symred [%s] %s\n", tag, msg.c_str());
}

void log_info(const std::string& msg) { log_at(LogLevel::info, "info", msg); }
void log_debug(const std::string& msg) { log_at(LogLevel::debug, "debug", msg); }

// ---- shared plumbing ---------------------------------------------------------

struct CliOptions {
  std::string config_path;
  std::string out_path;
  std::string in_path;
  double step = 0.0;    // 0 = keep config value
  double t_end = 0.0;
  std::string method;
  long long seed = -1;
  double tolerance = 0.0;
};

RunConfig load_with_overrides(const CliOptions& opt) {
  RunConfig cfg = load_run_config(opt.config_path);
  if (opt.step > 0.0) cfg.scenario.integrator.step = opt.step;
  if (opt.t_end > 0.0) cfg.scenario.integrator.t_end = opt.t_end;
  if (!opt.method.empty()) cfg.scenario.integrator.method = method_from_string(opt.method);
  if (opt.seed >= 0) cfg.seed = static_cast<unsigned long long>(opt.seed);
  if (opt.tolerance > 0.0) cfg.compare_tolerance = opt.tolerance;
  if (!opt.in_path.empty()) cfg.input_path = opt.in_path;
  if (!opt.out_path.empty()) cfg.output_path = opt.out_path;
  cfg.scenario.integrator.validate();
  log_debug("config loaded: scenario=" + cfg.scenario.name +
            " method=" + method_name(cfg.scenario.integrator.method));
  return cfg;
}

std::string sidecar_path(const std::string& out) {
  const std::string suffix = ".csv";
  if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".diag.json";
  return out + ".diag.json";
}

std::string require_output(const RunConfig& cfg) {
  if (cfg.output_path.empty())
    throw ValidationError("no output path: pass --out or set 'output' in the config");
  return cfg.output_path;
}

RunDiagnostics base_diagnostics(const RunConfig& cfg, const char* command, long long samples) {
  RunDiagnostics d;
  d.scenario = cfg.scenario.name;
  d.command = command;
  d.method = method_name(cfg.scenario.integrator.method);
  d.step = cfg.scenario.integrator.step;
  d.t_end = cfg.scenario.integrator.t_end;
  d.samples = samples;
  return d;
}

void add_conserved_reduced(RunDiagnostics& d, const Scenario& sc,
                           const std::vector<double>& t, const std::vector<ReducedState>& states) {
  (void)t;
  const double e0 = kinetic_energy(sc.metric, states.front());
  double emax_drift = 0.0;
  for (const ReducedState& s : states)
    emax_drift = std::max(emax_drift, std::abs(kinetic_energy(sc.metric, s) - e0));
  d.conserved["energy_initial"] = e0;
  d.conserved["energy_final"] = kinetic_energy(sc.metric, states.back());
  d.conserved["energy_max_drift"] = emax_drift;
  const int r = sc.metric.conn.group.dim;
  if (r == 1) {
    const auto momentum = [&](const ReducedState& s) {
      return sc.metric.k_vert(s.x)(0, 0) * s.w[0];
    };
    d.conserved["vertical_momentum_initial"] = momentum(states.front());
    d.conserved["vertical_momentum_final"] = momentum(states.back());
  } else {
    const auto charge_norm = [&](const ReducedState& s) {
      return s.w.dot(sc.metric.k_vert(s.x) * s.w);
    };
    d.conserved["charge_norm_initial"] = charge_norm(states.front());
    d.conserved["charge_norm_final"] = charge_norm(states.back());
  }
}

std::vector<ReducedState> reduced_view(const FullTrajectory& traj) {
  std::vector<ReducedState> out;
  out.reserve(traj.states.size());
  for (const FullState& s : traj.states) out.push_back({s.x, s.v, s.w});
  return out;
}

// ---- commands ----------------------------------------------------------------

int cmd_reduce(const CliOptions& opt) {
  const RunConfig cfg = load_with_overrides(opt);
  const std::string out = require_output(cfg);
  const ReducedTrajectory traj =
      integrate_reduced(cfg.scenario.sode, cfg.scenario.initial_reduced(), cfg.scenario.integrator);
  write_reduced_csv(out, traj);
  RunDiagnostics diag = base_diagnostics(cfg, "reduce", static_cast<long long>(traj.t.size()));
  add_conserved_reduced(diag, cfg.scenario, traj.t, traj.states);
  write_diagnostics_json(sidecar_path(out), diag);
  log_info("reduce: wrote " + std::to_string(traj.t.size()) + " samples to " + out);
  return 0;
}

int cmd_direct(const CliOptions& opt) {
  const RunConfig cfg = load_with_overrides(opt);
  const std::string out = require_output(cfg);
  const FullTrajectory traj =
      integrate_full(cfg.scenario.sode, cfg.scenario.initial, cfg.scenario.integrator);
  write_full_csv(out, traj, cfg.scenario.metric.conn.group.matrix_size);
  RunDiagnostics diag = base_diagnostics(cfg, "direct", static_cast<long long>(traj.t.size()));
  diag.reprojections = traj.diag.reprojections;
  diag.max_constraint_drift = traj.diag.max_constraint_drift;
  diag.final_constraint_residual = traj.diag.final_constraint_residual;
  add_conserved_reduced(diag, cfg.scenario, traj.t, reduced_view(traj));
  write_diagnostics_json(sidecar_path(out), diag);
  log_info("direct: wrote " + std::to_string(traj.t.size()) + " samples to " + out);
  return 0;
}

int cmd_reconstruct(const CliOptions& opt) {
  const RunConfig cfg = load_with_overrides(opt);
  const std::string out = require_output(cfg);
  if (cfg.input_path.empty())
    throw ValidationError("no input path: pass --in or set 'input' in the config");
  const ReducedTrajectory reduced = read_reduced_csv(
      cfg.input_path, cfg.scenario.metric.conn.base_dim, cfg.scenario.metric.conn.group.dim);
  GroupStepOptions gopt;
  gopt.method = cfg.scenario.integrator.method;
  gopt.drift_tolerance = cfg.scenario.integrator.drift_tolerance;
  const FullTrajectory full = reconstruct(cfg.scenario.sode, reduced, cfg.scenario.initial.g, gopt);
  write_full_csv(out, full, cfg.scenario.metric.conn.group.matrix_size);
  RunDiagnostics diag =
      base_diagnostics(cfg, "reconstruct", static_cast<long long>(full.t.size()));
  diag.reprojections = full.diag.reprojections;
  diag.max_constraint_drift = full.diag.max_constraint_drift;
  diag.final_constraint_residual = full.diag.final_constraint_residual;
  write_diagnostics_json(sidecar_path(out), diag);
  log_info("reconstruct: wrote " + std::to_string(full.t.size()) + " samples to " + out);
  return 0;
}

struct BlockDeviation {
  double max_x = 0.0, max_v = 0.0, max_w = 0.0, max_g = 0.0;
  double rms_x = 0.0, rms_v = 0.0, rms_w = 0.0, rms_g = 0.0;
  size_t samples = 0;
  double max_all() const { return std::max({max_x, max_v, max_w, max_g}); }
};

BlockDeviation staged_vs_direct(const Scenario& sc, const IntegratorConfig& integ) {
  const ReducedTrajectory reduced = integrate_reduced(sc.sode, sc.initial_reduced(), integ);
  GroupStepOptions gopt;
  gopt.method = integ.method;
  gopt.drift_tolerance = integ.drift_tolerance;
  const FullTrajectory staged = reconstruct(sc.sode, reduced, sc.initial.g, gopt);
  const FullTrajectory direct = integrate_full(sc.sode, sc.initial, integ);

  BlockDeviation d;
  d.samples = staged.t.size();
  double sx = 0.0, sv = 0.0, sw = 0.0, sg = 0.0;
  for (size_t k = 0; k < staged.t.size(); ++k) {
    const Vec dx = staged.states[k].x - direct.states[k].x;
    const Vec dv = staged.states[k].v - direct.states[k].v;
    const Vec dw = staged.states[k].w - direct.states[k].w;
    const Mat dg = staged.states[k].g - direct.states[k].g;
    d.max_x = std::max(d.max_x, dx.cwiseAbs().maxCoeff());
    d.max_v = std::max(d.max_v, dv.cwiseAbs().maxCoeff());
    d.max_w = std::max(d.max_w, dw.cwiseAbs().maxCoeff());
    d.max_g = std::max(d.max_g, dg.cwiseAbs().maxCoeff());
    sx += dx.squaredNorm();
    sv += dv.squaredNorm();
    sw += dw.squaredNorm();
    sg += dg.squaredNorm();
  }
  const double n = static_cast<double>(std::max<size_t>(d.samples, 1));
  d.rms_x = std::sqrt(sx / n);
  d.rms_v = std::sqrt(sv / n);
  d.rms_w = std::sqrt(sw / n);
  d.rms_g = std::sqrt(sg / n);
  return d;
}

int cmd_compare(const CliOptions& opt) {
  const RunConfig cfg = load_with_overrides(opt);
  const Scenario& sc = cfg.scenario;

  const BlockDeviation base = staged_vs_direct(sc, sc.integrator);
  const bool pass = base.max_all() <= cfg.compare_tolerance;

  std::printf("compare: scenario=%s method=%s step=%g t_end=%g samples=%zu\n", sc.name.c_str(),
              method_name(sc.integrator.method).c_str(), sc.integrator.step, sc.integrator.t_end,
              base.samples);
  std::printf("  %-6s %13s %13s\n", "block", "max dev", "rms dev");
  std::printf("  %-6s %13.5e %13.5e\n", "x", base.max_x, base.rms_x);
  std::printf("  %-6s %13.5e %13.5e\n", "v", base.max_v, base.rms_v);
  std::printf("  %-6s %13.5e %13.5e\n", "w", base.max_w, base.rms_w);
  std::printf("  %-6s %13.5e %13.5e\n", "g", base.max_g, base.rms_g);

  IntegratorConfig half = sc.integrator;
  half.step = sc.integrator.step / 2.0;
  IntegratorConfig quarter = sc.integrator;
  quarter.step = sc.integrator.step / 4.0;
  const BlockDeviation d2 = staged_vs_direct(sc, half);
  const BlockDeviation d4 = staged_vs_direct(sc, quarter);
  const auto order_of = [](double coarse, double fine) {
    if (coarse <= 0.0 || fine <= 0.0) return 0.0;
    return std::log2(coarse / fine);
  };
  std::printf("  convergence under step halving (max dev over all blocks):\n");
  std::printf("    %-11s %13s %9s\n", "step", "max dev", "order");
  std::printf("    %-11.5g %13.5e %9s\n", sc.integrator.step, base.max_all(), "-");
  std::printf("    %-11.5g %13.5e %9.3f\n", half.step, d2.max_all(),
              order_of(base.max_all(), d2.max_all()));
  std::printf("    %-11.5g %13.5e %9.3f\n", quarter.step, d4.max_all(),
              order_of(d2.max_all(), d4.max_all()));
  std::printf("  tolerance %.5e\n", cfg.compare_tolerance);
  std::printf("%s\n", pass ? "PASS" : "FAIL");

  if (!cfg.output_path.empty()) {
    RunDiagnostics diag =
        base_diagnostics(cfg, "compare", static_cast<long long>(base.samples));
    diag.conserved["deviation_x"] = base.max_x;
    diag.conserved["deviation_v"] = base.max_v;
    diag.conserved["deviation_w"] = base.max_w;
    diag.conserved["deviation_g"] = base.max_g;
    diag.conserved["deviation_half_step"] = d2.max_all();
    diag.conserved["deviation_quarter_step"] = d4.max_all();
    diag.conserved["tolerance"] = cfg.compare_tolerance;
    diag.conserved["pass"] = pass ? 1.0 : 0.0;
    write_diagnostics_json(cfg.output_path, diag);
  }
  return pass ? 0 : 3;
}

int cmd_audit(const CliOptions& opt) {
  const RunConfig cfg = load_with_overrides(opt);
  const Scenario& sc = cfg.scenario;
  const ConnectionData& conn = sc.metric.conn;
  const LieGroupSpec& spec = conn.group;
  bool ok = true;
  const auto report = [&ok](const char* name, double residual, double tol) {
    const bool pass = residual <= tol;
    ok = ok && pass;
    std::printf("  [%s] %-32s residual=%.3e tolerance=%.1e\n", pass ? "ok" : "FAIL", name,
                residual, tol);
  };

  std::printf("audit: scenario=%s seed=%llu\n", sc.name.c_str(), cfg.seed);

  const StructureReport sr = check_structure(spec);
  report("structure.antisymmetry", sr.antisymmetry, 1e-9);
  report("structure.jacobi", sr.jacobi, 1e-9);
  report("structure.closure", sr.closure, 1e-9);
  report("structure.consistency", sr.consistency, 1e-9);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int m = conn.base_dim, r = spec.dim;
  const Vec center = 0.5 * (conn.chart.lo + conn.chart.hi);
  Vec span = 0.5 * (conn.chart.hi - conn.chart.lo);
  for (int i = 0; i < m; ++i) span[i] = std::min(span[i], 2.0);

  double dev_fund = 0.0, dev_horiz = 0.0, dev_equiv = 0.0, dev_eqnfora = 0.0;
  const double fd = 1e-6;
  for (int trial = 0; trial < 25; ++trial) {
    Vec x(m), xdot(m), xi(r), eta(r), zeta(r);
    for (int i = 0; i < m; ++i) x[i] = center[i] + span[i] * unit(rng);
    for (int i = 0; i < m; ++i) xdot[i] = unit(rng);
    for (int a = 0; a < r; ++a) xi[a] = unit(rng);
    for (int a = 0; a < r; ++a) eta[a] = unit(rng);
    for (int a = 0; a < r; ++a) zeta[a] = unit(rng);
    const Mat g = exponential(spec, eta);
    const Mat h = exponential(spec, zeta);
    const BundlePoint p{x, g};

    dev_fund = std::max(dev_fund,
                        (connection_form(conn, p, fundamental_field(conn, p, xi)) - xi)
                            .cwiseAbs().maxCoeff());
    dev_horiz = std::max(dev_horiz,
                         connection_form(conn, p, horizontal_rhs(conn, p, xdot))
                             .cwiseAbs().maxCoeff());

    BundleTangent tangent{xdot, algebra_matrix(spec, xi) * g};
    const Vec w1 = connection_form(conn, p, tangent);
    const BundlePoint p_shift{x, g * h};
    const BundleTangent tangent_shift{xdot, tangent.gdot * h};
    const Vec w2 = connection_form(conn, p_shift, tangent_shift);
    dev_equiv = std::max(dev_equiv,
                         (w2 - adjoint_matrix(spec, h) * w1).cwiseAbs().maxCoeff());

    // Left-invariant derivative of the adjoint matrix field.
    for (int a = 0; a < r; ++a) {
      const Mat gp = g * exponential(spec, Vec(Vec::Unit(r, a)), fd);
      const Mat gm = g * exponential(spec, Vec(Vec::Unit(r, a)), -fd);
      const Mat da = (adjoint_matrix(spec, gp) - adjoint_matrix(spec, gm)) / (2.0 * fd);
      const Mat resid = da + ad_matrix(spec, Vec(Vec::Unit(r, a))) * adjoint_matrix(spec, g);
      dev_eqnfora = std::max(dev_eqnfora, resid.cwiseAbs().maxCoeff());
    }
  }
  report("connection.fundamental", dev_fund, 1e-10);
  report("connection.horizontal", dev_horiz, 1e-10);
  report("connection.equivariance", dev_equiv, 1e-10);
  report("adjoint.derivative", dev_eqnfora, 1e-6);

  Vec shift_coords(r);
  for (int a = 0; a < r; ++a) shift_coords[a] = unit(rng);
  const AuditReport ar =
      invariance_audit(sc.sode, sc.initial, exponential(spec, shift_coords), sc.integrator);
  report("invariance.reduced", ar.max_dev_reduced, cfg.audit_tolerance);
  report("invariance.group_equivariance", ar.max_dev_group_equivariance, cfg.audit_tolerance);

  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();

  CLI::App app{"symmetry reduction, reconstruction, and audit of invariant mechanical systems"};
  app.require_subcommand(1);

  CliOptions opt;
  const auto add_common = [&opt](CLI::App* sub, bool with_out, bool with_in) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_out) sub->add_option("--out", opt.out_path, "output path");
    if (with_in) sub->add_option("--in", opt.in_path, "reduced trajectory CSV input");
    sub->add_option("--step", opt.step, "override integrator step");
    sub->add_option("--t-end", opt.t_end, "override integration horizon");
    sub->add_option("--method", opt.method, "override method: rk4 | lie_midpoint | lie_rk4_corrected");
    sub->add_option("--seed", opt.seed, "override RNG seed");
  };

  CLI::App* reduce = app.add_subcommand("reduce", "integrate the reduced dynamics, write CSV");
  add_common(reduce, true, false);
  CLI::App* reconstruct_cmd =
      app.add_subcommand("reconstruct", "rebuild a full trajectory from a reduced CSV");
  add_common(reconstruct_cmd, true, true);
  CLI::App* direct = app.add_subcommand("direct", "integrate the full dynamics, write CSV");
  add_common(direct, true, false);
  CLI::App* compare =
      app.add_subcommand("compare", "staged (reduce + reconstruct) versus direct integration");
  add_common(compare, true, false);
  compare->add_option("--tolerance", opt.tolerance, "override comparison tolerance");
  CLI::App* audit =
      app.add_subcommand("audit", "structure, connection, and invariance consistency checks");
  add_common(audit, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (reduce->parsed()) return cmd_reduce(opt);
    if (reconstruct_cmd->parsed()) return cmd_reconstruct(opt);
    if (direct->parsed()) return cmd_direct(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (audit->parsed()) return cmd_audit(opt);
  } catch (const IntegrationError& e) {
    std::fprintf(stderr, "symred: integration error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "symred: config error: %s\n", e.what());
    return 1;
  } catch (const RepresentationError& e) {
    std::fprintf(stderr, "symred: representation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "symred: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
