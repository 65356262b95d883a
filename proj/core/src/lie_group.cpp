#include "symred/lie_group.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace symred {

namespace {

Vec vectorize(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

// Tolerance-free helpers used repeatedly below.
Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

bool is_skew(const Mat& m, double tol = 1e-12) {
  return (m + m.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + m.cwiseAbs().maxCoeff());
}

// Rotation about the axis encoded by a 3x3 skew matrix, exact up to roundoff.
Mat exp_skew3(const Mat& m) {
  const double wx = m(2, 1), wy = m(0, 2), wz = m(1, 0);
  const double theta2 = wx * wx + wy * wy + wz * wz;
  const double theta = std::sqrt(theta2);
  double c1, c2;  // sin(t)/t and (1-cos(t))/t^2
  if (theta < 1e-4) {
    c1 = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    c2 = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    c1 = std::sin(theta) / theta;
    c2 = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat::Identity(3, 3) + c1 * m + c2 * (m * m);
}

Mat exp_skew2(const Mat& m) {
  const double a = m(1, 0);
  Mat r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

Mat exp_series(Mat m) {
  const double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (nrm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    m /= std::pow(2.0, squarings);
  }
  const int n = static_cast<int>(m.rows());
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 13; ++k) {
    term = (term * m) / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace

void LieGroupSpec::finalize(double closure_tol) {
  if (dim <= 0 || matrix_size <= 0)
    throw ValidationError("lie group spec: dim and matrix_size must be positive");
  if (static_cast<int>(basis.size()) != dim)
    throw ValidationError("lie group spec '" + name + "': expected " + std::to_string(dim) +
                          " basis matrices, got " + std::to_string(basis.size()));
  for (const Mat& e : basis)
    if (e.rows() != matrix_size || e.cols() != matrix_size)
      throw ValidationError("lie group spec '" + name + "': basis matrix has wrong shape");

  Mat b(matrix_size * matrix_size, dim);
  for (int a = 0; a < dim; ++a) b.col(a) = vectorize(basis[a]);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(b);
  if (cod.rank() < dim)
    throw ValidationError("lie group spec '" + name + "': basis matrices are linearly dependent");
  basis_pinv = cod.pseudoInverse();

  // Structure constants from commutators; cross-check a user-supplied set.
  std::vector<Mat> computed(dim, Mat::Zero(dim, dim));
  double worst_closure = 0.0;
  for (int a = 0; a < dim; ++a) {
    for (int bidx = 0; bidx < dim; ++bidx) {
      const Mat comm = commutator(basis[a], basis[bidx]);
      const Vec coords = basis_pinv * vectorize(comm);
      const double resid = (vectorize(comm) - b * coords).cwiseAbs().maxCoeff();
      worst_closure = std::max(worst_closure, resid);
      for (int c = 0; c < dim; ++c) computed[c](a, bidx) = coords[c];
    }
  }
  if (worst_closure > closure_tol)
    throw RepresentationError("lie group spec '" + name +
                              "': basis does not close under commutators (residual " +
                              std::to_string(worst_closure) + ")");
  if (C.empty()) {
    C = std::move(computed);
  } else {
    if (static_cast<int>(C.size()) != dim)
      throw ValidationError("lie group spec '" + name + "': structure constant table has wrong size");
    double worst = 0.0;
    for (int c = 0; c < dim; ++c) {
      if (C[c].rows() != dim || C[c].cols() != dim)
        throw ValidationError("lie group spec '" + name + "': structure constant block has wrong shape");
      worst = std::max(worst, (C[c] - computed[c]).cwiseAbs().maxCoeff());
    }
    if (worst > closure_tol)
      throw RepresentationError("lie group spec '" + name +
                                "': declared structure constants disagree with basis commutators (max |diff| " +
                                std::to_string(worst) + ")");
  }
}

LieGroupSpec u1_spec() {
  LieGroupSpec s;
  s.name = "U(1)";
  s.dim = 1;
  s.matrix_size = 2;
  Mat e(2, 2);
  e << 0, -1, 1, 0;
  s.basis = {e};
  s.constraint = GroupConstraint::orthogonal;
  s.finalize();
  return s;
}

LieGroupSpec so3_spec() {
  LieGroupSpec s;
  s.name = "SO(3)";
  s.dim = 3;
  s.matrix_size = 3;
  Mat e1 = Mat::Zero(3, 3), e2 = Mat::Zero(3, 3), e3 = Mat::Zero(3, 3);
  e1(2, 1) = 1;
  e1(1, 2) = -1;
  e2(0, 2) = 1;
  e2(2, 0) = -1;
  e3(1, 0) = 1;
  e3(0, 1) = -1;
  s.basis = {e1, e2, e3};
  s.constraint = GroupConstraint::orthogonal;
  s.finalize();
  return s;
}

LieGroupSpec se2_spec() {
  LieGroupSpec s;
  s.name = "SE(2)";
  s.dim = 3;
  s.matrix_size = 3;
  Mat rot = Mat::Zero(3, 3), tx = Mat::Zero(3, 3), ty = Mat::Zero(3, 3);
  rot(1, 0) = 1;
  rot(0, 1) = -1;
  tx(0, 2) = 1;
  ty(1, 2) = 1;
  s.basis = {rot, tx, ty};
  s.constraint = GroupConstraint::special_euclidean;
  s.finalize();
  return s;
}

Vec bracket(const LieGroupSpec& spec, const Vec& xi, const Vec& eta) {
  if (xi.size() != spec.dim || eta.size() != spec.dim)
    throw ValidationError("bracket: coordinate vectors must have the algebra dimension");
  Vec out(spec.dim);
  for (int c = 0; c < spec.dim; ++c) out[c] = xi.dot(spec.C[c] * eta);
  return out;
}

Mat algebra_matrix(const LieGroupSpec& spec, const Vec& xi) {
  if (xi.size() != spec.dim)
    throw ValidationError("algebra_matrix: coordinate vector must have the algebra dimension");
  Mat m = Mat::Zero(spec.matrix_size, spec.matrix_size);
  for (int a = 0; a < spec.dim; ++a) m += xi[a] * spec.basis[a];
  return m;
}

Vec algebra_coords(const LieGroupSpec& spec, const Mat& m, double tol) {
  if (m.rows() != spec.matrix_size || m.cols() != spec.matrix_size)
    throw ValidationError("algebra_coords: matrix has the wrong shape");
  const Vec coords = spec.basis_pinv * vectorize(m);
  Mat recon = Mat::Zero(spec.matrix_size, spec.matrix_size);
  for (int a = 0; a < spec.dim; ++a) recon += coords[a] * spec.basis[a];
  const double resid = (recon - m).cwiseAbs().maxCoeff();
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (resid > tol * scale)
    throw RepresentationError("algebra_coords: matrix lies outside the algebra (residual " +
                              std::to_string(resid) + ")");
  return coords;
}

Mat exponential(const LieGroupSpec& spec, const Vec& xi, double t) {
  const Mat m = t * algebra_matrix(spec, xi);
  if (spec.matrix_size == 3 && is_skew(m)) return exp_skew3(m);
  if (spec.matrix_size == 2 && is_skew(m)) return exp_skew2(m);
  return exp_series(m);
}

Mat ad_matrix(const LieGroupSpec& spec, const Vec& xi) {
  if (xi.size() != spec.dim)
    throw ValidationError("ad_matrix: coordinate vector must have the algebra dimension");
  Mat ad(spec.dim, spec.dim);
  for (int c = 0; c < spec.dim; ++c) ad.row(c) = (spec.C[c].transpose() * xi).transpose();
  return ad;
}

Mat adjoint_matrix(const LieGroupSpec& spec, const Mat& g) {
  if (g.rows() != spec.matrix_size || g.cols() != spec.matrix_size)
    throw ValidationError("adjoint_matrix: group element has the wrong shape");
  Eigen::PartialPivLU<Mat> lu(g);
  Mat a(spec.dim, spec.dim);
  for (int idx = 0; idx < spec.dim; ++idx)
    a.col(idx) = algebra_coords(spec, lu.solve(spec.basis[idx] * g));
  return a;
}

double group_residual(const LieGroupSpec& spec, const Mat& g) {
  if (g.rows() != spec.matrix_size || g.cols() != spec.matrix_size)
    throw ValidationError("group_residual: element has the wrong shape");
  switch (spec.constraint) {
    case GroupConstraint::none:
      return 0.0;
    case GroupConstraint::orthogonal: {
      const int n = spec.matrix_size;
      const double ortho = (g.transpose() * g - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
      return std::max(ortho, std::abs(g.determinant() - 1.0));
    }
    case GroupConstraint::special_euclidean: {
      const Mat r = g.topLeftCorner(2, 2);
      const double ortho = (r.transpose() * r - Mat::Identity(2, 2)).cwiseAbs().maxCoeff();
      Eigen::RowVector3d last(0, 0, 1);
      const double row = (g.row(2) - last).cwiseAbs().maxCoeff();
      return std::max({ortho, std::abs(r.determinant() - 1.0), row});
    }
  }
  return 0.0;
}

namespace {

Mat polar_rotation(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat u = svd.matrixU();
    u.col(u.cols() - 1) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace

Mat project_to_group(const LieGroupSpec& spec, const Mat& g) {
  switch (spec.constraint) {
    case GroupConstraint::none:
      return g;
    case GroupConstraint::orthogonal:
      return polar_rotation(g);
    case GroupConstraint::special_euclidean: {
      Mat out = g;
      out.topLeftCorner(2, 2) = polar_rotation(g.topLeftCorner(2, 2));
      out(2, 0) = 0.0;
      out(2, 1) = 0.0;
      out(2, 2) = 1.0;
      return out;
    }
  }
  return g;
}

StructureReport check_structure(const LieGroupSpec& spec) {
  StructureReport rep;
  const int n = spec.dim;
  for (int c = 0; c < n; ++c)
    rep.antisymmetry =
        std::max(rep.antisymmetry, (spec.C[c] + spec.C[c].transpose()).cwiseAbs().maxCoeff());

  // Jacobi identity in coordinates: sum over the cyclic permutations of
  // (a,b,c) of C^e_{ab} C^d_{ec} must vanish for every d.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double sum = 0.0;
          for (int e = 0; e < n; ++e)
            sum += spec.C[e](a, b) * spec.C[d](e, c) + spec.C[e](b, c) * spec.C[d](e, a) +
                   spec.C[e](c, a) * spec.C[d](e, b);
          rep.jacobi = std::max(rep.jacobi, std::abs(sum));
        }

  Mat bmat(spec.matrix_size * spec.matrix_size, n);
  for (int a = 0; a < n; ++a) bmat.col(a) = vectorize(spec.basis[a]);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Mat comm = commutator(spec.basis[a], spec.basis[b]);
      const Vec coords = spec.basis_pinv * vectorize(comm);
      rep.closure =
          std::max(rep.closure, (vectorize(comm) - bmat * coords).cwiseAbs().maxCoeff());
      for (int c = 0; c < n; ++c)
        rep.consistency = std::max(rep.consistency, std::abs(coords[c] - spec.C[c](a, b)));
    }
  return rep;
}

std::string lie_group_to_json(const LieGroupSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  j["matrix_size"] = spec.matrix_size;
  switch (spec.constraint) {
    case GroupConstraint::none: j["constraint"] = "none"; break;
    case GroupConstraint::orthogonal: j["constraint"] = "orthogonal"; break;
    case GroupConstraint::special_euclidean: j["constraint"] = "special_euclidean"; break;
  }
  auto& basis = j["basis"] = nlohmann::json::array();
  for (const Mat& e : spec.basis) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < e.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < e.cols(); ++c) row.push_back(e(r, c));
      rows.push_back(row);
    }
    basis.push_back(rows);
  }
  auto& sc = j["structure_constants"] = nlohmann::json::array();
  for (int c = 0; c < spec.dim; ++c)
    for (int a = 0; a < spec.dim; ++a)
      for (int b = 0; b < spec.dim; ++b)
        if (spec.C[c](a, b) != 0.0)
          sc.push_back({{"a", a}, {"b", b}, {"c", c}, {"value", spec.C[c](a, b)}});
  return j.dump(2);
}

LieGroupSpec lie_group_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("lie group json: parse failure: ") + e.what());
  }
  LieGroupSpec s;
  try {
    s.name = j.value("name", "user");
    s.dim = j.at("dim").get<int>();
    s.matrix_size = j.at("matrix_size").get<int>();
    const std::string cons = j.value("constraint", "none");
    if (cons == "none")
      s.constraint = GroupConstraint::none;
    else if (cons == "orthogonal")
      s.constraint = GroupConstraint::orthogonal;
    else if (cons == "special_euclidean")
      s.constraint = GroupConstraint::special_euclidean;
    else
      throw ValidationError("lie group json: unknown constraint '" + cons + "'");
    for (const auto& mat : j.at("basis")) {
      Mat e(s.matrix_size, s.matrix_size);
      if (static_cast<int>(mat.size()) != s.matrix_size)
        throw ValidationError("lie group json: basis matrix row count mismatch");
      for (int r = 0; r < s.matrix_size; ++r) {
        if (static_cast<int>(mat[r].size()) != s.matrix_size)
          throw ValidationError("lie group json: basis matrix column count mismatch");
        for (int c = 0; c < s.matrix_size; ++c) e(r, c) = mat[r][c].get<double>();
      }
      s.basis.push_back(e);
    }
    if (j.contains("structure_constants")) {
      s.C.assign(s.dim, Mat::Zero(s.dim, s.dim));
      for (const auto& entry : j.at("structure_constants")) {
        const int a = entry.at("a").get<int>();
        const int b = entry.at("b").get<int>();
        const int c = entry.at("c").get<int>();
        if (a < 0 || b < 0 || c < 0 || a >= s.dim || b >= s.dim || c >= s.dim)
          throw ValidationError("lie group json: structure constant index out of range");
        s.C[c](a, b) = entry.at("value").get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("lie group json: ") + e.what());
  }
  s.finalize();
  return s;
}

}  // namespace symred
