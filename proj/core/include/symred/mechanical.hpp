#ifndef SYMRED_MECHANICAL_HPP
#define SYMRED_MECHANICAL_HPP

#include "symred/reduction.hpp"

namespace symred {

/// An invariant kinetic-energy metric in the adapted frame {X_i, Ehat_a}:
/// block k_base(x) on the horizontal frame, block k_vert(x) on the vertical
/// frame, zero cross terms. Both blocks must be symmetric positive definite
/// on the chart.
struct InvariantMetric {
  ConnectionData conn;
  std::function<Mat(const Vec&)> k_base;
  std::function<Mat(const Vec&)> k_vert;
  /// Optional analytic derivatives: jac[j] = d(k)/dx^j. Central differences
  /// (h = 1e-6) are used when absent.
  std::function<std::vector<Mat>(const Vec&)> k_base_jac;
  std::function<std::vector<Mat>(const Vec&)> k_vert_jac;

  void validate() const;
};

/// External forcing in frame components, as functions of (x, v, w).
struct ForceField {
  std::function<Vec(const Vec&, const Vec&, const Vec&)> base;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> vert;
};

ForceField zero_force(int base_dim, int dim);

/// Connection coefficients of the Levi-Civita connection of an invariant
/// metric, in the anholonomic frame Z = (X_1..X_m, Ehat_1..Ehat_r):
/// nabla_{Z_beta} Z_gamma = coeff[alpha](beta, gamma) Z_alpha.
/// Frame indices: 0..m-1 horizontal, m..m+r-1 vertical.
struct ChristoffelTable {
  int base_dim = 0;
  int dim = 0;
  std::vector<Mat> coeff;

  int size() const { return base_dim + dim; }
  double operator()(int alpha, int beta, int gamma) const { return coeff[alpha](beta, gamma); }
};

ChristoffelTable christoffel_table(const InvariantMetric& metric, const Vec& x);

/// The reduced equations of motion of the invariant mechanical system: the
/// geodesic spray of the metric in the adapted frame plus the force field,
/// packaged as the (D, G) pair of an InvariantSODE.
InvariantSODE mechanical_sode(const InvariantMetric& metric, const ForceField& force);

/// (1/2) v^T k_base(x) v + (1/2) w^T k_vert(x) w.
double kinetic_energy(const InvariantMetric& metric, const ReducedState& s);

/// For one-dimensional groups only: the gyroscopic coupling
/// force^i = w C^i_j v^j appearing in the base equation, with
/// C^i_j = k_vert(x) kbar^{ik} K_{jk}; `lowered` is kbar_{il} C^l_j, which is
/// antisymmetric.
struct GyroscopicTensor {
  Mat mixed;
  Mat lowered;
};

GyroscopicTensor gyroscopic_tensor(const InvariantMetric& metric, const Vec& x);

/// Whether k is an invariant (bi-invariant) inner product on the algebra:
/// k([xi,eta],zeta) + k(eta,[xi,zeta]) = 0 for all basis triples.
bool is_bi_invariant(const LieGroupSpec& spec, const Mat& k, double tol = 1e-12);

}  // namespace symred

#endif
