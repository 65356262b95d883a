#ifndef SYMRED_SCENARIO_HPP
#define SYMRED_SCENARIO_HPP

#include "symred/integrate.hpp"
#include "symred/mechanical.hpp"

namespace symred {

/// A ready-to-run invariant mechanical system: metric, forcing, the derived
/// reduced equations, default initial data, and default integrator settings.
struct Scenario {
  std::string name;
  InvariantMetric metric;
  ForceField force;
  InvariantSODE sode;
  FullState initial;
  IntegratorConfig integrator;

  ReducedState initial_reduced() const { return {initial.x, initial.v, initial.w}; }
};

/// Built-in scenarios by name, with a JSON object of parameters:
///
///  - "wong": charged particle in a nonabelian gauge field. Group SO(3),
///    base dimension 3, flat base metric, fiber metric kappa*I (any
///    bi-invariant override is accepted, anything else is rejected).
///    Params: kappa (1.0), gamma_amplitude (1.0),
///    gamma_style "axial" | "full" ("axial").
///  - "magnetic_particle": abelian gauge field on U(1), uniform field
///    strength B (1.0); circular Larmor orbits in the base plane.
///  - "bullo_lewis": one-dimensional group U(1) over a planar base with a
///    position-dependent fiber inertia 1 + alpha |x|^2.
///    Params: lambda (1.0), alpha (0.3).
///  - "free_invariant": zero connection and constant metrics; straight-line
///    base motion. Params: group "SO(3)" | "U(1)" | "SE(2)", base_dim (3).
///
/// All scenarios also accept chart_half_width. Unknown scenario names and
/// unknown parameter keys are rejected.
Scenario scenario_library(const std::string& name, const std::string& params_json = "{}");

}  // namespace symred

#endif
