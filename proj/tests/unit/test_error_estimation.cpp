// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cfm/basis.hpp"
#include "cfm/error_estimation.hpp"
#include "cfm/quadrature.hpp"
#include "helpers.hpp"

using namespace cfm;
using cfm::test::kPi;

namespace {

// Load functional of a constant source f over all dofs of the space.
Eigen::VectorXd constant_load(const HpSpace& s, double f) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s.num_dofs());
  const HpMesh& m = s.mesh();
  for (std::size_t k = 0; k < m.elements.size(); ++k) {
    const Element& e = m.elements[k];
    const int n = s.element_degree(static_cast<int>(k)) + kQuadratureExtension;
    const QuadratureRule& rule = element_rule(e.kind, n);
    const BasisTable& tab = tabulate(s.element_basis(static_cast<int>(k)), n);
    const auto& dofs = s.element_dofs(static_cast<int>(k));
    const auto& sg = s.element_signs(static_cast<int>(k));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Point2 x;
      Eigen::Matrix2d DF;
      element_map(m, e, rule.points[q], x, DF);
      const double w = rule.weights[q] * std::abs(DF.determinant()) * f;
      for (std::size_t i = 0; i < dofs.size(); ++i) b[dofs[i]] += sg[i] * w * tab.value[q][i];
    }
  }
  return b;
}

const double kHelicoidConj = kPi / std::asinh(1.0);

}  // namespace

TEST_CASE("exact solution gives a zero estimate") {
  const Quadrilateral q = test::strip("catenoid");
  const HpMesh m = build_mesh(q.domain, {}, 1);
  const ModulusResult r = modulus(q, m);
  const ErrorEstimate e = estimate(*r.field.space, q.surface, r.field);
  CHECK(e.estimate <= 1e-10);
  CHECK(error_energy_of_modulus(e) <= 1e-20);
  CHECK(error_energy_of_modulus(ErrorEstimate{}) == 0.0);
}

TEST_CASE("manufactured load on one bilinear element") {
  // -u'' = 2 with u = 0 at x = 0 and x = 1: u = x(1 - x), energy error of u_h = 0 is 1/3.
  MeshOptions o;
  o.grid_u = o.grid_v = 1;
  const Quadrilateral q = test::unit_square();
  const HpMesh m = assign_degrees(initial_mesh(q.domain, o), DegreeRule::uniform(1));
  BcMap bc = modulus_bcs(q, m);
  bc[q.side(4)] = BoundaryCondition::dirichlet(0.0);
  auto space = std::make_shared<const HpSpace>(m, bc);
  REQUIRE(space->num_free() == 0);
  const SolutionField uh(space, Eigen::VectorXd::Zero(space->num_dofs()));
  const HpSpace enr = space->enriched();
  const ErrorEstimate e = estimate(*space, q.surface, uh, constant_load(enr, 2.0));
  const double exact = std::sqrt(1.0 / 3.0);
  CHECK(e.estimate >= exact / 3);
  CHECK(e.estimate <= exact * 3);
}

TEST_CASE("Schwarz estimates track the exact error") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 8), 8);
  const auto reps = convergence_study(q, m, {2, 3, 4, 5, 6, 7, 8});
  double prev = 1e300;
  for (const auto& r : reps) {
    CAPTURE(r.p);
    const double err = std::abs(r.M_Q - 1.0);
    CHECK(r.est_err_Q >= 0.0);
    CHECK(r.est_err_Q <= 10 * err);
    CHECK(r.est_err_Q >= err / 10);
    CHECK(r.est_err_Q <= 1.1 * prev);
    prev = r.est_err_Q;
  }
}

TEST_CASE("helicoid conjugate estimates are two-sided") {
  const Quadrilateral q = test::strip("helicoid_general");
  MeshRecipe rec;
  rec.options.grid_u = 2;
  rec.options.grid_v = 4;
  const HpMesh m = build_mesh(q.domain, rec, 8);
  double prev = 1e300;
  for (const auto& r : convergence_study(q, m, {2, 3, 4, 5, 6, 7, 8})) {
    CAPTURE(r.p);
    const double err = std::abs(r.M_conj - kHelicoidConj);
    CHECK(r.est_err_conj <= 100 * err);
    CHECK(r.est_err_conj >= err / 100);
    // Odd and even degrees alternate near roundoff, so compare even steps.
    if (r.p % 2 == 0) {
      CHECK(r.est_err_conj <= 1.1 * prev);
      prev = r.est_err_conj;
    }
    // The primal potential is a function of v alone and lies in every space.
    CHECK(std::abs(r.M_Q - std::asinh(1.0) / kPi) <= 1e-14);
  }
}

TEST_CASE("quarter sphere estimator ratio is recorded") {
  const DomainSpec d = make_rect(0, kPi / 2, 0, kPi,
                                 {Point2(kPi / 2, 0.75 * kPi), Point2(0, 0), Point2(kPi / 2, 0), Point2(kPi / 2, 0.25 * kPi)});
  const Quadrilateral q(d, make_catalog_surface("sphere"));
  MeshRecipe rec;
  rec.options.grid_u = 2;
  rec.options.grid_v = 4;
  rec.steps.push_back({RefineStep::Kind::Edge, Point2::Zero(), "u_min", 8, 0.15});
  const HpMesh m = build_mesh(d, rec, 8);
  for (const auto& r : convergence_study(q, m, {2, 4, 6, 8})) {
    const double err = std::abs(r.M_Q - std::sqrt(2.0));
    MESSAGE("p = " << r.p << " est/err = " << r.est_err_Q / err);
    CHECK(r.est_err_Q > 0.0);
  }
}

TEST_CASE("auxiliary energy of a Galerkin solution on its own space") {
  const Quadrilateral q = test::schwarz();
  const HpMesh m = build_mesh(q.domain, test::corner_recipe(q, 3), 4);
  const ModulusResult r = modulus(q, m);
  const ErrorEstimate e = estimate(*r.field.space, q.surface, r.field);
  CHECK(e.aux_dofs > 0);
  CHECK(std::abs(e.energy - e.estimate * e.estimate) <= 1e-15 + 1e-12 * e.energy);
  CHECK(error_energy_of_modulus(e) == e.energy);
}
