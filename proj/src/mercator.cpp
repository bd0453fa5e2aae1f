// SPDX-License-Identifier: Apache-2.0
#include "cfm/mercator.hpp"

#include <cmath>

#include "cfm/basis.hpp"
#include "cfm/error.hpp"
#include "cfm/quadrature.hpp"

namespace cfm {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// Normalized reference and its colatitude derivative.
void reference(double theta, double eps, double& value, double& dtheta) {
  const double emax = std::log(std::tan(kPi / 2 - eps / 2));
  const double lat = kPi / 2 - theta;
  value = (std::log(std::tan(kPi / 4 + lat / 2)) + emax) / (2 * emax);
  // d/dlat ln tan(pi/4 + lat/2) = 1 / cos(lat)
  dtheta = -1.0 / (std::cos(lat) * 2 * emax);
}
}  // namespace

Eigen::Vector2d mercator_reference(double lambda, double phi) {
  const double a = kPi / 4 + phi / 2;
  if (!(a > 0.0 && a < kPi / 2)) throw Error(ErrorCode::DomainError, "Mercator projection is singular at the poles");
  return {lambda, std::log(std::tan(a))};
}

double mercator_normalized(double theta, double eps) {
  if (!(eps > 0.0 && eps < kPi / 2)) throw Error(ErrorCode::InvalidArgument, "cap size must lie in (0, pi/2)");
  if (!(theta > 0.0 && theta < kPi)) throw Error(ErrorCode::DomainError, "colatitude outside (0, pi)");
  double v, d;
  reference(theta, eps, v, d);
  return v;
}

Quadrilateral mercator_quadrilateral(double a, double b, double c, double eps) {
  if (!(eps > 0.0 && eps < kPi / 2)) throw Error(ErrorCode::InvalidArgument, "cap size must lie in (0, pi/2)");
  const double t0 = eps, t1 = kPi - eps;
  DomainSpec d = make_rect(0.0, 2 * kPi, t0, t1,
                           {Point2(2 * kPi, t0), Point2(2 * kPi, t1), Point2(0.0, t1), Point2(0.0, t0)});
  d.name = "mercator";
  return Quadrilateral(std::move(d), make_catalog_surface("ellipsoid", {a, b, c}));
}

MeshRecipe mercator_recipe(int levels, double grading) {
  MeshRecipe r;
  r.options.grid_u = 1;
  r.options.grid_v = 2;
  for (const char* edge : {"v_min", "v_max"}) {
    RefineStep s;
    s.kind = RefineStep::Kind::Edge;
    s.selector = edge;
    s.levels = levels;
    s.grading = grading;
    r.steps.push_back(s);
  }
  return r;
}

MercatorErrors mercator_errors(const SolutionField& u, double eps) {
  const HpSpace& space = *u.space;
  const HpMesh& mesh = space.mesh();
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& e = mesh.elements[k];
    const int order = space.element_degree(static_cast<int>(k)) + kQuadratureExtension;
    const QuadratureRule& rule = element_rule(e.kind, order);
    const BasisTable& tab = tabulate(space.element_basis(static_cast<int>(k)), order);
    const auto& dofs = space.element_dofs(static_cast<int>(k));
    const auto& s = space.element_signs(static_cast<int>(k));
    Eigen::VectorXd c(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) c[i] = s[i] * u.coeffs[dofs[i]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Point2 x;
      Eigen::Matrix2d DF;
      element_map(mesh, e, rule.points[q], x, DF);
      const double w = rule.weights[q] * std::abs(DF.determinant());
      const Eigen::Vector2d g = DF.transpose().inverse() * (tab.grad[q].transpose() * c);
      double ref, dref;
      reference(x.y(), eps, ref, dref);
      const double diff = tab.value[q].dot(c) - ref;
      l2 += w * diff * diff;
      h1 += w * (g.x() * g.x() + (g.y() - dref) * (g.y() - dref));
    }
  }
  MercatorErrors out;
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(h1);
  out.dofs = space.num_dofs();
  return out;
}

std::vector<MercatorErrors> mercator_validate(const Quadrilateral& q, const MeshRecipe& recipe,
                                              const std::vector<int>& ps, double eps) {
  std::vector<MercatorErrors> out;
  for (int p : ps) {
    const ModulusResult r = modulus(q, recipe, p);
    MercatorErrors e = mercator_errors(r.field, eps);
    e.p = p;
    e.M = r.M;
    out.push_back(e);
  }
  return out;
}

std::vector<std::pair<double, double>> mercator_discrepancy(const SolutionField& u, double eps, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  std::vector<std::pair<double, double>> out;
  for (int i = 1; i <= n; ++i) {
    const double theta = eps + (kPi - 2 * eps) * i / (n + 1);
    out.emplace_back(theta, evaluate(u, Point2(0.0, theta)).value - mercator_normalized(theta, eps));
  }
  return out;
}

}  // namespace cfm
