#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "symred/lie_group.hpp"

using namespace symred;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// Strictly upper-triangular 3x3 matrices. Nilpotent of order three, so the
// exponential is exactly I + M + M^2/2 and every identity can be checked in
// closed form.
LieGroupSpec heisenberg_spec() {
  LieGroupSpec s;
  s.name = "H3";
  s.dim = 3;
  s.matrix_size = 3;
  Mat e12 = Mat::Zero(3, 3), e23 = Mat::Zero(3, 3), e13 = Mat::Zero(3, 3);
  e12(0, 1) = 1.0;
  e23(1, 2) = 1.0;
  e13(0, 2) = 1.0;
  s.basis = {e12, e23, e13};
  s.finalize();
  return s;
}

}  // namespace

TEST_SUITE("lie") {

TEST_CASE("built-in specs pass the structure checks") {
  for (const LieGroupSpec& s : {u1_spec(), so3_spec(), se2_spec()}) {
    CAPTURE(s.name);
    const StructureReport r = check_structure(s);
    CHECK(r.ok(1e-9));
    CHECK(r.antisymmetry <= 1e-12);
    CHECK(r.jacobi <= 1e-12);
    CHECK(r.closure <= 1e-12);
    CHECK(r.consistency <= 1e-12);
  }
}

TEST_CASE("so(3) brackets follow the cross-product rule") {
  const LieGroupSpec so3 = so3_spec();
  Vec e1 = Vec::Unit(3, 0), e2 = Vec::Unit(3, 1), e3 = Vec::Unit(3, 2);
  CHECK(max_abs(bracket(so3, e1, e2) - e3) <= 1e-15);
  CHECK(max_abs(bracket(so3, e2, e3) - e1) <= 1e-15);
  CHECK(max_abs(bracket(so3, e3, e1) - e2) <= 1e-15);
  // Coordinates and the matrix commutator must agree.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec xi = oracles::uniform_vec(rng, 3);
    const Vec eta = oracles::uniform_vec(rng, 3);
    const Mat commutator = algebra_matrix(so3, xi) * algebra_matrix(so3, eta) -
                           algebra_matrix(so3, eta) * algebra_matrix(so3, xi);
    CHECK(max_abs(algebra_matrix(so3, bracket(so3, xi, eta)) - commutator) <= 1e-14);
  }
}

TEST_CASE("se(2) brackets: rotation turns the translations") {
  const LieGroupSpec se2 = se2_spec();
  Vec rot = Vec::Unit(3, 0), tx = Vec::Unit(3, 1), ty = Vec::Unit(3, 2);
  CHECK(max_abs(bracket(se2, rot, tx) - ty) <= 1e-15);
  CHECK(max_abs(bracket(se2, rot, ty) + tx) <= 1e-15);
  CHECK(max_abs(bracket(se2, tx, ty)) <= 1e-15);
}

TEST_CASE("bracket is antisymmetric and satisfies the Jacobi identity") {
  const LieGroupSpec se2 = se2_spec();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec a = oracles::uniform_vec(rng, 3);
    const Vec b = oracles::uniform_vec(rng, 3);
    const Vec c = oracles::uniform_vec(rng, 3);
    CHECK(max_abs(bracket(se2, a, b) + bracket(se2, b, a)) <= 1e-14);
    const Vec cyc = bracket(se2, a, bracket(se2, b, c)) +
                    bracket(se2, b, bracket(se2, c, a)) +
                    bracket(se2, c, bracket(se2, a, b));
    CHECK(max_abs(cyc) <= 1e-13);
  }
}

TEST_CASE("finalize derives structure constants from commutators") {
  const LieGroupSpec h3 = heisenberg_spec();
  // [e12, e23] = e13 and everything else vanishes.
  CHECK(h3.C.size() == 3);
  CHECK(h3.C[2](0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h3.C[2](1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(max_abs(h3.C[0]) <= 1e-14);
  CHECK(max_abs(h3.C[1]) <= 1e-14);
  double off = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (!((a == 0 && b == 1) || (a == 1 && b == 0))) off = std::max(off, std::abs(h3.C[2](a, b)));
  CHECK(off <= 1e-14);
}

TEST_CASE("finalize cross-checks user-supplied structure constants") {
  LieGroupSpec good = so3_spec();
  LieGroupSpec again;
  again.name = good.name;
  again.dim = good.dim;
  again.matrix_size = good.matrix_size;
  again.basis = good.basis;
  again.C = good.C;
  again.constraint = good.constraint;
  CHECK_NOTHROW(again.finalize());

  LieGroupSpec bad;
  bad.name = good.name;
  bad.dim = good.dim;
  bad.matrix_size = good.matrix_size;
  bad.basis = good.basis;
  bad.C = good.C;
  bad.C[0](1, 2) += 0.25;
  bad.constraint = good.constraint;
  CHECK_THROWS_AS(bad.finalize(), RepresentationError);
}

TEST_CASE("finalize rejects a basis that does not close") {
  LieGroupSpec s;
  s.name = "open";
  s.dim = 2;
  s.matrix_size = 2;
  Mat up = Mat::Zero(2, 2), down = Mat::Zero(2, 2);
  up(0, 1) = 1.0;
  down(1, 0) = 1.0;
  s.basis = {up, down};  // [up, down] = diag(1, -1), outside the span
  CHECK_THROWS_AS(s.finalize(), RepresentationError);
}

TEST_CASE("algebra coordinates invert the basis expansion") {
  std::mt19937_64 rng(3);
  for (const LieGroupSpec& s : {so3_spec(), se2_spec(), heisenberg_spec()}) {
    CAPTURE(s.name);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec xi = oracles::uniform_vec(rng, s.dim, -2.0, 2.0);
      const Vec back = algebra_coords(s, algebra_matrix(s, xi));
      CHECK(max_abs(back - xi) <= 1e-12);
    }
  }
}

TEST_CASE("algebra coordinates reject matrices outside the algebra") {
  const LieGroupSpec so3 = so3_spec();
  Mat sym = Mat::Identity(3, 3);
  CHECK_THROWS_AS(algebra_coords(so3, sym), RepresentationError);
}

TEST_CASE("exponential: one-parameter group property") {
  std::mt19937_64 rng(5);
  for (const LieGroupSpec& s : {so3_spec(), se2_spec(), u1_spec()}) {
    CAPTURE(s.name);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec xi = oracles::uniform_vec(rng, s.dim, -2.0, 2.0);
      const Mat lhs = exponential(s, xi, 0.7) * exponential(s, xi, 0.4);
      const Mat rhs = exponential(s, xi, 1.1);
      CHECK(max_abs(lhs - rhs) <= 1e-10);
    }
    CHECK(max_abs(exponential(s, Vec::Zero(s.dim)) -
                  Mat::Identity(s.matrix_size, s.matrix_size)) <= 1e-15);
  }
}

TEST_CASE("exponential lands on the group constraint") {
  std::mt19937_64 rng(13);
  for (const LieGroupSpec& s : {so3_spec(), se2_spec(), u1_spec()}) {
    CAPTURE(s.name);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec xi = oracles::uniform_vec(rng, s.dim, -3.0, 3.0);
      CHECK(group_residual(s, exponential(s, xi)) <= 1e-12);
    }
  }
}

TEST_CASE("exponential matches the closed form on a nilpotent algebra") {
  const LieGroupSpec h3 = heisenberg_spec();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec xi = oracles::uniform_vec(rng, 3, -2.0, 2.0);
    const Mat M = algebra_matrix(h3, xi);
    const Mat expected = Mat::Identity(3, 3) + M + 0.5 * M * M;  // M^3 = 0
    CHECK(max_abs(exponential(h3, xi) - expected) <= 1e-13);
  }
}

TEST_CASE("exponential is accurate near zero") {
  const LieGroupSpec so3 = so3_spec();
  Vec xi(3);
  xi << 1e-9, -2e-9, 5e-10;
  const Mat M = algebra_matrix(so3, xi);
  const Mat expected = Mat::Identity(3, 3) + M + 0.5 * M * M;
  CHECK(max_abs(exponential(so3, xi) - expected) <= 1e-18);
}

TEST_CASE("ad matrix represents the bracket") {
  std::mt19937_64 rng(19);
  for (const LieGroupSpec& s : {so3_spec(), se2_spec()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vec xi = oracles::uniform_vec(rng, s.dim);
      const Vec eta = oracles::uniform_vec(rng, s.dim);
      CHECK(max_abs(ad_matrix(s, xi) * eta - bracket(s, xi, eta)) <= 1e-13);
    }
  }
}

TEST_CASE("adjoint matrix: rotation transpose on SO(3)") {
  const LieGroupSpec so3 = so3_spec();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat R = exponential(so3, oracles::uniform_vec(rng, 3, -2.0, 2.0));
    CHECK(max_abs(adjoint_matrix(so3, R) - R.transpose()) <= 1e-12);
  }
  CHECK(max_abs(adjoint_matrix(so3, Mat::Identity(3, 3)) - Mat::Identity(3, 3)) <= 1e-14);
}

TEST_CASE("adjoint matrix composes contravariantly") {
  std::mt19937_64 rng(29);
  for (const LieGroupSpec& s : {so3_spec(), se2_spec()}) {
    CAPTURE(s.name);
    for (int trial = 0; trial < 10; ++trial) {
      const Mat g1 = exponential(s, oracles::uniform_vec(rng, s.dim));
      const Mat g2 = exponential(s, oracles::uniform_vec(rng, s.dim));
      const Mat lhs = adjoint_matrix(s, Mat(g1 * g2));
      const Mat rhs = adjoint_matrix(s, g2) * adjoint_matrix(s, g1);
      CHECK(max_abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("adjoint matrix derivative at the identity is minus ad") {
  std::mt19937_64 rng(31);
  const double h = 1e-6;
  for (const LieGroupSpec& s : {so3_spec(), se2_spec()}) {
    CAPTURE(s.name);
    const Vec xi = oracles::uniform_vec(rng, s.dim);
    const Mat plus = adjoint_matrix(s, exponential(s, xi, h));
    const Mat minus = adjoint_matrix(s, exponential(s, xi, -h));
    const Mat deriv = (plus - minus) / (2.0 * h);
    CHECK(max_abs(deriv + ad_matrix(s, xi)) <= 1e-6);
  }
}

TEST_CASE("structure report flags corrupted constants") {
  LieGroupSpec s = so3_spec();
  s.C[0](1, 2) += 0.1;
  s.C[0](2, 1) -= 0.1;  // keep antisymmetry so the damage shows up elsewhere
  const StructureReport r = check_structure(s);
  CHECK_FALSE(r.ok(1e-9));
  CHECK(r.consistency >= 0.05);
}

TEST_CASE("group residual and projection") {
  const LieGroupSpec so3 = so3_spec();
  std::mt19937_64 rng(37);
  const Mat R = exponential(so3, oracles::uniform_vec(rng, 3));
  CHECK(group_residual(so3, R) <= 1e-13);

  Mat noisy = R;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) noisy(i, j) += 1e-4 * oracles::uniform_vec(rng, 1)[0];
  CHECK(group_residual(so3, noisy) > 1e-6);
  const Mat fixed = project_to_group(so3, noisy);
  CHECK(group_residual(so3, fixed) <= 1e-12);
  CHECK(max_abs(fixed - R) <= 1e-3);

  const LieGroupSpec se2 = se2_spec();
  Mat g = exponential(se2, oracles::uniform_vec(rng, 3));
  Mat bad = g;
  bad(0, 0) += 2e-4;
  bad(2, 1) += 1e-4;  // damage the affine row too
  const Mat repaired = project_to_group(se2, bad);
  CHECK(group_residual(se2, repaired) <= 1e-12);
  CHECK(repaired(2, 0) == 0.0);
  CHECK(repaired(2, 1) == 0.0);
  CHECK(repaired(2, 2) == 1.0);
}

TEST_CASE("json serialization round-trips a spec") {
  for (const LieGroupSpec& s : {so3_spec(), heisenberg_spec()}) {
    CAPTURE(s.name);
    const LieGroupSpec back = lie_group_from_json(lie_group_to_json(s));
    CHECK(back.name == s.name);
    CHECK(back.dim == s.dim);
    CHECK(back.matrix_size == s.matrix_size);
    CHECK(back.constraint == s.constraint);
    REQUIRE(back.basis.size() == s.basis.size());
    for (size_t i = 0; i < s.basis.size(); ++i) CHECK(max_abs(back.basis[i] - s.basis[i]) == 0.0);
    for (size_t c = 0; c < s.C.size(); ++c) CHECK(max_abs(back.C[c] - s.C[c]) <= 1e-15);
    CHECK(back.finalized());
  }
}

}  // TEST_SUITE
