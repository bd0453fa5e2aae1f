// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "cfm/conformal.hpp"

namespace cfm {

// Closed-form Mercator point of longitude lambda and latitude phi (radians).
// Throws DomainError at or beyond the poles.
Eigen::Vector2d mercator_reference(double lambda, double phi);

// Mercator ordinate of colatitude theta, scaled to [0, 1] over [eps, pi - eps]
// (0 on the southern cap boundary).
double mercator_normalized(double theta, double eps);

// Ellipsoid (a, b, c) in (longitude, colatitude) with polar caps of size eps
// removed. The caps carry the Dirichlet data, south 0 and north 1.
Quadrilateral mercator_quadrilateral(double a, double b, double c, double eps);

// Boundary-layer recipe graded toward both caps. The layers start at the cap
// size rather than at zero, hence the mild grading.
MeshRecipe mercator_recipe(int levels = 12, double grading = 0.4);

struct MercatorErrors {
  int p = 0;
  double l2 = 0.0, h1 = 0.0;  // parameter-domain norms of u_h - reference
  double M = 0.0;
  int dofs = 0;
};

// Errors of the potential against the normalized reference for each p.
std::vector<MercatorErrors> mercator_validate(const Quadrilateral& q, const MeshRecipe& recipe,
                                              const std::vector<int>& ps, double eps);

// Errors of a solved field (same conventions).
MercatorErrors mercator_errors(const SolutionField& u, double eps);

// (theta, u_h - reference) sampled along lambda = 0 at n interior points.
std::vector<std::pair<double, double>> mercator_discrepancy(const SolutionField& u, double eps, int n);

}  // namespace cfm
