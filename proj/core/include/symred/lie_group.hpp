#ifndef SYMRED_LIE_GROUP_HPP
#define SYMRED_LIE_GROUP_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "symred/errors.hpp"

namespace symred {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// How group membership is checked and restored for elements stored as plain
/// matrices.
enum class GroupConstraint {
  none,              ///< any invertible matrix
  orthogonal,        ///< g^T g = I, det g = +1
  special_euclidean  ///< planar rigid motions: rotation block + last row (0..0,1)
};

/// A matrix Lie group together with a basis of its algebra.
///
/// Algebra elements are handled as coordinate vectors with respect to
/// `basis`; group elements are `matrix_size x matrix_size` matrices. The
/// structure constants follow [E_a, E_b] = C^c_{ab} E_c and are stored as
/// one matrix per upper index: C[c](a,b) = C^c_{ab}.
struct LieGroupSpec {
  std::string name;
  int dim = 0;          ///< algebra dimension
  int matrix_size = 0;  ///< n for the n x n representation
  std::vector<Mat> basis;
  std::vector<Mat> C;
  GroupConstraint constraint = GroupConstraint::none;

  // Least-squares expansion operator onto the basis, precomputed by finalize():
  // coords(M) = basis_pinv * vec(M).
  Mat basis_pinv;

  /// Validates dimensions, computes structure constants from commutators when
  /// `C` is empty (or cross-checks a user-supplied set), and precomputes the
  /// basis expansion operator. Throws RepresentationError if the basis does
  /// not close under commutators and ValidationError on shape problems.
  void finalize(double closure_tol = 1e-9);

  bool finalized() const { return basis_pinv.size() > 0; }
};

/// Residuals of the algebraic consistency checks for a spec.
struct StructureReport {
  double antisymmetry = 0.0;  ///< max |C^c_{ab} + C^c_{ba}|
  double jacobi = 0.0;        ///< max cyclic-sum residual of the Jacobi identity
  double closure = 0.0;       ///< max distance of [E_a,E_b] from span(basis)
  double consistency = 0.0;   ///< max |coords([E_a,E_b]) - C^._{ab}|
  bool ok(double tol = 1e-9) const {
    return antisymmetry <= tol && jacobi <= tol && closure <= tol && consistency <= tol;
  }
};

// Built-in groups.
LieGroupSpec u1_spec();   ///< U(1) as 2x2 rotation matrices, one generator
LieGroupSpec so3_spec();  ///< SO(3) with the standard hat basis
LieGroupSpec se2_spec();  ///< SE(2) homogeneous 3x3: rotation, x- and y-translation

/// [xi, eta] in coordinates, via the structure constants.
Vec bracket(const LieGroupSpec& spec, const Vec& xi, const Vec& eta);

/// xi^a E_a.
Mat algebra_matrix(const LieGroupSpec& spec, const Vec& xi);

/// Expand a matrix in the algebra basis (least squares). Throws
/// RepresentationError when the residual exceeds `tol`.
Vec algebra_coords(const LieGroupSpec& spec, const Mat& m, double tol = 1e-8);

/// exp(t xi^a E_a). Uses the axis-angle closed form on 3x3 skew input and
/// scaling-and-squaring with a degree-13 Taylor polynomial otherwise.
Mat exponential(const LieGroupSpec& spec, const Vec& xi, double t = 1.0);

/// Matrix of ad_xi acting on coordinates: column b holds [xi, E_b].
Mat ad_matrix(const LieGroupSpec& spec, const Vec& xi);

/// Matrix A(g) of Ad_{g^{-1}} acting on coordinates: (A(g) w) are the
/// coordinates of g^{-1} (w^a E_a) g. With this operator convention
/// A(g1 g2) = A(g2) A(g1), and for SO(3) with the hat basis A(R) = R^T.
Mat adjoint_matrix(const LieGroupSpec& spec, const Mat& g);

/// Sup-norm violation of the group membership constraint for g.
double group_residual(const LieGroupSpec& spec, const Mat& g);

/// Nearest group element (polar projection for the orthogonal block;
/// identity for unconstrained specs).
Mat project_to_group(const LieGroupSpec& spec, const Mat& g);

/// Antisymmetry, Jacobi, closure, and commutator-consistency residuals.
StructureReport check_structure(const LieGroupSpec& spec);

/// Serialize a spec to a JSON string (basis row-major, structure constants as
/// a flat indexed list); `lie_group_from_json` parses the same layout and
/// finalizes the result.
std::string lie_group_to_json(const LieGroupSpec& spec);
LieGroupSpec lie_group_from_json(const std::string& text);

}  // namespace symred

#endif
