#ifndef SYMRED_REDUCTION_HPP
#define SYMRED_REDUCTION_HPP

#include <functional>

#include "symred/bundle.hpp"

namespace symred {

/// State of the reduced dynamics: base point, base velocity, and the algebra
/// coordinates w of the body-frame vertical velocity (the connection form of
/// the full velocity, expressed in the right-invariant frame).
struct ReducedState {
  Vec x, v, w;
};

/// State of the full dynamics on the bundle.
struct FullState {
  Vec x, v;
  Mat g;
  Vec w;
};

/// A G-invariant second-order system in reduced form. `base_force` is the
/// base acceleration D^i(x,v,w); `vert_force` is the algebra-valued forcing
/// G^a(x,v,w) entering wdot^a = G^a - Upsilon^a_{ib} v^i w^b.
struct InvariantSODE {
  ConnectionData conn;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> base_force;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> vert_force;

  void validate() const;
};

/// Time derivative of the reduced state:
///   xdot = v, vdot = D(x,v,w), wdot^a = G^a - gamma_i^c C^a_{cb} v^i w^b.
ReducedState reduced_rhs(const InvariantSODE& sys, const ReducedState& s);

/// Time derivative of the full state: the reduced part together with the
/// group reconstruction equation gdot = ((w^a - gamma_i^a v^i) E_a) g.
FullState full_rhs(const InvariantSODE& sys, const FullState& s);

/// The full second-order field split into its invariant blocks at a state.
struct DecomposedRhs {
  Vec base_velocity;      ///< xdot components
  Vec base_accel;         ///< D^i
  Vec vertical_accel;     ///< D^a = A(g) wdot + Adot(g) w, the derivative of A(g) w
  Vec vertical_velocity;  ///< v^a = A(g) w, the connection form of the velocity
};

DecomposedRhs decompose(const InvariantSODE& sys, const FullState& s);

}  // namespace symred

#endif
