// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>
#include <string>

#include "cfm/conformal.hpp"

namespace cfm::test {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline std::string config_path(const std::string& name) { return std::string(CFM_CONFIG_DIR) + "/" + name; }

// Unit square with the canonical corners.
inline Quadrilateral unit_square(double h = 1.0) { return {make_rect(0, 1, 0, h), make_catalog_surface("plane")}; }

// Isothermal strip [-1,1] x [0,2pi] with Dirichlet data on the horizontal sides.
inline Quadrilateral strip(const std::string& surface) {
  const std::array<Point2, 4> corners = {Point2(1, 0), Point2(1, 2 * kPi), Point2(-1, 2 * kPi), Point2(-1, 0)};
  return {make_rect(-1, 1, 0, 2 * kPi, corners), make_catalog_surface(surface)};
}

inline Quadrilateral schwarz() {
  const std::array<Point2, 4> corners = {Point2(kPi / 2, 0), Point2(kPi / 2, kPi / 2), Point2(kPi / 2, kPi),
                                         Point2(kPi / 2, 1.5 * kPi)};
  return {make_rect(0, kPi / 2, 0, 2 * kPi, corners, true), make_catalog_surface("sphere")};
}

inline MeshRecipe corner_recipe(const Quadrilateral& q, int levels) {
  MeshRecipe r;
  for (const auto& c : q.domain.corners) r.steps.push_back({RefineStep::Kind::Corner, c, "", levels, 0.15});
  return r;
}

}  // namespace cfm::test
