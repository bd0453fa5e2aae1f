// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "cfm/error.hpp"
#include "cfm/hp_solver.hpp"
#include "helpers.hpp"

using namespace cfm;
using cfm::test::kPi;

namespace {

BcMap all_neumann(const HpMesh& m) {
  BcMap bc;
  for (const auto& e : m.elements)
    for (int i = 0; i < e.num_vertices(); ++i)
      if (e.tag[i].is_boundary()) bc[e.tag[i]] = BoundaryCondition::neumann();
  return bc;
}

HpMesh single_quad(int p) {
  MeshOptions o;
  o.grid_u = o.grid_v = 1;
  return assign_degrees(initial_mesh(make_rect(0, 1, 0, 1), o), DegreeRule::uniform(p));
}

}  // namespace

TEST_CASE("dof counts") {
  const HpMesh q3 = single_quad(3);
  CHECK(HpSpace(q3, all_neumann(q3)).num_dofs() == 16);

  const Quadrilateral sq = test::unit_square();
  const HpMesh grid = assign_degrees(initial_mesh(sq.domain, 4), DegreeRule::uniform(1));
  const HpSpace s(grid, modulus_bcs(sq, grid));
  CHECK(s.num_dofs() == 9);
  CHECK(s.num_free() == 3);

  BcMap partial = all_neumann(grid);
  partial.erase(BoundaryTag::side(3));
  CHECK_THROWS_AS(HpSpace(grid, partial), Error);
}

TEST_CASE("bilinear element stiffness") {
  const HpMesh m = single_quad(1);
  const HpSpace s(m, all_neumann(m));
  const Eigen::MatrixXd K = Eigen::MatrixXd(assemble_full(s, make_catalog_surface("plane")));
  REQUIRE(K.rows() == 4);
  // Vertex dofs follow the mesh vertices; opposite corners differ in both coordinates.
  for (int i = 0; i < 4; ++i) {
    CHECK(K(i, i) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const Point2 d = m.vertices[s.key(i).a] - m.vertices[s.key(j).a];
      const double want = (std::abs(d.x()) > 0.5 && std::abs(d.y()) > 0.5) ? -1.0 / 3 : -1.0 / 6;
      CHECK(K(i, j) == doctest::Approx(want).epsilon(1e-14));
    }
  }
}

TEST_CASE("stiffness is symmetric and SPD") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 3), 5);
  const HpSpace s(m, modulus_bcs(q, m));
  const SparseMatrix K = assemble_full(s, q.surface);
  const double kmax = Eigen::MatrixXd(K).cwiseAbs().maxCoeff();
  CHECK(Eigen::MatrixXd(K - SparseMatrix(K.transpose())).cwiseAbs().maxCoeff() <= 1e-14 * kmax);
  const LinearSystem sys = reduce(s, K, s.lift());
  CHECK_NOTHROW(CholeskySolver{sys.K});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(sys.K));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("Cholesky solver") {
  SparseMatrix one(1, 1);
  one.insert(0, 0) = 2.0 / 3;
  CHECK(solve(one, Eigen::VectorXd::Ones(1))(0) == doctest::Approx(1.5).epsilon(1e-15));
  SparseMatrix I(3, 3);
  I.setIdentity();
  const Eigen::VectorXd f(Eigen::Vector3d(1, -2, 3));
  CHECK((solve(I, f) - f).norm() == 0.0);
  SparseMatrix bad(2, 2);
  bad.insert(0, 0) = 1;
  bad.insert(1, 1) = -1;
  CHECK_THROWS_AS(solve(bad, Eigen::VectorXd::Ones(2)), Error);
}

TEST_CASE("identity coefficient reproduces the planar matrix") {
  for (const char* name : {"catenoid", "helicoid_isothermal"}) {
    const Quadrilateral q = test::strip(name);
    const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 2), 4);
    const HpSpace s(m, modulus_bcs(q, m));
    const SparseMatrix K = assemble_full(s, q.surface), P = assemble_full(s, make_catalog_surface("plane"));
    const double rel = Eigen::MatrixXd(K - P).cwiseAbs().maxCoeff() / Eigen::MatrixXd(P).cwiseAbs().maxCoeff();
    CAPTURE(name);
    CHECK(rel <= 1e-12);
  }
}

TEST_CASE("quadrature extension is exact for polynomial integrands") {
  const Quadrilateral q = test::unit_square();
  // Affine elements keep the stiffness integrand polynomial.
  MeshRecipe rec;
  rec.options.grid_u = rec.options.grid_v = 3;
  const HpMesh m = build_mesh(q.domain, rec, 4);
  const HpSpace s(m, modulus_bcs(q, m));
  const Eigen::MatrixXd K5 = Eigen::MatrixXd(assemble_full(s, q.surface, 5));
  const Eigen::MatrixXd K6 = Eigen::MatrixXd(assemble_full(s, q.surface, 6));
  CHECK((K5 - K6).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("planar energies") {
  CHECK(modulus(test::unit_square(), MeshRecipe{}, 1).M == doctest::Approx(1.0).epsilon(1e-14));
  for (double h : {0.5, 2.0}) {
    const ModulusResult r = modulus(test::unit_square(h), MeshRecipe{}, 2);
    CHECK(std::abs(r.M - h) <= 1e-12);
    CHECK(std::abs(energy(r.field, make_catalog_surface("plane")) - h) <= 1e-12);
  }
}

TEST_CASE("isothermal p=1 solution is affine") {
  for (const char* name : {"catenoid", "helicoid_isothermal"}) {
    const Quadrilateral q = test::strip(name);
    const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 2), 1);
    const ModulusResult r = modulus(q, m);
    CHECK(std::abs(r.M - 1 / kPi) <= 1e-12);
    // Dirichlet 0 on the top (v = 2pi), 1 on the bottom.
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
      const int dof = r.field.space->find({0, static_cast<int>(i), 0, 0});
      REQUIRE(dof >= 0);
      CHECK(std::abs(r.field.coeffs[dof] - (1 - m.vertices[i].y() / (2 * kPi))) <= 1e-12);
    }
    // Values at quadrature points stay in [0, 1].
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> du(-1, 1), dv(0, 2 * kPi);
    for (int k = 0; k < 200; ++k) {
      const double val = evaluate(r.field, {du(rng), dv(rng)}).value;
      CHECK(val >= -1e-10);
      CHECK(val <= 1 + 1e-10);
    }
  }
}

TEST_CASE("Galerkin orthogonality") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 4), 6);
  auto space = std::make_shared<const HpSpace>(m, modulus_bcs(q, m));
  const SparseMatrix K = assemble_full(*space, q.surface);
  const SolutionField u = DirichletProblem(space, K).solve();
  const Eigen::VectorXd r = K * u.coeffs;
  double worst = 0.0;
  for (int d : space->free_dofs()) worst = std::max(worst, std::abs(r[d]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("energy matches the bilinear form") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 3), 5);
  const ModulusResult r = modulus(q, m);
  const double e = energy(r.field, q.surface);
  const SparseMatrix K = assemble_full(*r.field.space, q.surface);
  const double a = r.field.coeffs.dot(K * r.field.coeffs);
  CHECK(std::abs(r.M - a) <= 1e-12 * a);
  CHECK(std::abs(e - a) <= 1e-12 * a);
}

TEST_CASE("evaluate: constants and gradients") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 3), 6);
  const ModulusResult r = modulus(q, m);

  // Vertex modes sum to one; higher modes vanish at vertices.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(r.field.space->num_dofs());
  for (int d = 0; d < r.field.space->num_dofs(); ++d)
    if (r.field.space->key(d).type == 0) c[d] = 1.0;
  const SolutionField ones(r.field.space, c);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> du(0.02, kPi / 2 - 0.02), dv(0.02, 2 * kPi - 0.02);
  for (int k = 0; k < 100; ++k) {
    const Point2 p(du(rng), dv(rng));
    const PointValue pv = evaluate(ones, p);
    CHECK(std::abs(pv.value - 1) <= 1e-13);
    CHECK(pv.grad.norm() <= 1e-11);

    const double h = 1e-6;
    const PointValue g = evaluate(r.field, p);
    const double fu = (evaluate(r.field, p + Point2(h, 0)).value - evaluate(r.field, p - Point2(h, 0)).value) / (2 * h);
    const double fv = (evaluate(r.field, p + Point2(0, h)).value - evaluate(r.field, p - Point2(0, h)).value) / (2 * h);
    CHECK(std::abs(g.grad.x() - fu) <= 1e-6 * std::max(1.0, std::abs(fu)));
    CHECK(std::abs(g.grad.y() - fv) <= 1e-6 * std::max(1.0, std::abs(fv)));
  }
  CHECK_THROWS_AS(evaluate(r.field, {2.0, 1.0}), Error);
}

TEST_CASE("energy is non-increasing in p") {
  const Quadrilateral q = test::schwarz();
  const HpMesh base = build_mesh(q.domain, test::corner_recipe(q, 4), 1);
  double prev = 1e300;
  for (int p = 1; p <= 8; ++p) {
    const double M = modulus(q, assign_degrees(base, DegreeRule::uniform(p))).M;
    CHECK(M <= prev + 1e-12);
    prev = M;
  }
}

TEST_CASE("solver residual") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 3), 5);
  const HpSpace s(m, modulus_bcs(q, m));
  const LinearSystem sys = reduce(s, assemble_full(s, q.surface), s.lift());
  const Eigen::VectorXd x = solve(sys.K, sys.f);
  CHECK((sys.K * x - sys.f).cwiseAbs().maxCoeff() <= 1e-10 * sys.f.cwiseAbs().maxCoeff());
}

TEST_CASE("assembly is bitwise reproducible") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 3), 6);
  const HpSpace s(m, modulus_bcs(q, m));
  const SparseMatrix a = assemble_full(s, q.surface), b = assemble_full(s, q.surface);
  CHECK(Eigen::MatrixXd(a - b).cwiseAbs().maxCoeff() == 0.0);
}
