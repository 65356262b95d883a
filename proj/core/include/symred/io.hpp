#ifndef SYMRED_IO_HPP
#define SYMRED_IO_HPP

#include <map>
#include <string>

#include "symred/reconstruction.hpp"
#include "symred/scenario.hpp"

namespace symred {

/// A fully parsed run description: the system plus tool-level settings.
struct RunConfig {
  Scenario scenario;
  unsigned long long seed = 0;
  double compare_tolerance = 1e-5;
  double audit_tolerance = 1e-8;
  std::string input_path;   ///< reduced-trajectory input, for reconstruction
  std::string output_path;  ///< default output target
};

/// Parse a JSON run configuration. Errors name the offending field.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Trajectory CSV layout: header row, comma separators, LF line endings,
/// numbers written with 17 significant digits so a write/read cycle is
/// bit-exact. Reduced columns: t, x1..xm, v1..vm, w1..wr. Full trajectories
/// append the group element row-major: g11..gnn.
void write_reduced_csv(const std::string& path, const ReducedTrajectory& traj);
ReducedTrajectory read_reduced_csv(const std::string& path, int base_dim, int dim);
void write_full_csv(const std::string& path, const FullTrajectory& traj, int matrix_size);
FullTrajectory read_full_csv(const std::string& path, int base_dim, int dim, int matrix_size);

struct RunDiagnostics {
  std::string scenario;
  std::string command;
  std::string method;
  double step = 0.0;
  double t_end = 0.0;
  long long samples = 0;
  int reprojections = 0;
  double max_constraint_drift = 0.0;
  double final_constraint_residual = 0.0;
  bool chart_ok = true;
  std::map<std::string, double> conserved;  ///< energies, momenta, drifts
};

void write_diagnostics_json(const std::string& path, const RunDiagnostics& diag);

}  // namespace symred

#endif
