#include "symred/reduction.hpp"

namespace symred {

namespace {

void check_reduced(const InvariantSODE& sys, const Vec& x, const Vec& v, const Vec& w) {
  if (x.size() != sys.conn.base_dim || v.size() != sys.conn.base_dim)
    throw ValidationError("reduced state: x and v must have the base dimension");
  if (w.size() != sys.conn.group.dim)
    throw ValidationError("reduced state: w must have the algebra dimension");
}

}  // namespace

void InvariantSODE::validate() const {
  conn.validate();
  if (!base_force || !vert_force)
    throw ValidationError("invariant sode: force callables are empty");
}

ReducedState reduced_rhs(const InvariantSODE& sys, const ReducedState& s) {
  check_reduced(sys, s.x, s.v, s.w);
  const Mat gm = sys.conn.gamma(s.x);
  ReducedState d;
  d.x = s.v;
  d.v = sys.base_force(s.x, s.v, s.w);
  // wdot^a = G^a - Upsilon^a_{ib} v^i w^b, with Upsilon(v) = ad_{gamma^T v}.
  d.w = sys.vert_force(s.x, s.v, s.w) - bracket(sys.conn.group, gm.transpose() * s.v, s.w);
  return d;
}

FullState full_rhs(const InvariantSODE& sys, const FullState& s) {
  check_reduced(sys, s.x, s.v, s.w);
  const ReducedState r = reduced_rhs(sys, {s.x, s.v, s.w});
  FullState d;
  d.x = r.x;
  d.v = r.v;
  d.w = r.w;
  const Mat gm = sys.conn.gamma(s.x);
  const Vec eta = s.w - gm.transpose() * s.v;
  d.g = algebra_matrix(sys.conn.group, eta) * s.g;
  return d;
}

DecomposedRhs decompose(const InvariantSODE& sys, const FullState& s) {
  check_reduced(sys, s.x, s.v, s.w);
  const ReducedState r = reduced_rhs(sys, {s.x, s.v, s.w});
  const Mat a = adjoint_matrix(sys.conn.group, s.g);
  const Mat gm = sys.conn.gamma(s.x);
  const Vec eta = s.w - gm.transpose() * s.v;

  DecomposedRhs parts;
  parts.base_velocity = s.v;
  parts.base_accel = r.v;
  // d/dt [A(g) w] with Adot = -A ad_eta along gdot = (eta^a E_a) g.
  parts.vertical_accel = a * r.w - a * bracket(sys.conn.group, eta, s.w);
  parts.vertical_velocity = a * s.w;
  return parts;
}

}  // namespace symred
