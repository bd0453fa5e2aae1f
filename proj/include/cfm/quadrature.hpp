// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cfm/geometry.hpp"

namespace cfm {

enum class ElementKind;

inline constexpr int kQuadratureExtension = 5;

struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// n x n tensor rule on the reference quad, or the collapsed n x n rule on the
// reference triangle. Cached; the returned reference stays valid.
const QuadratureRule& element_rule(ElementKind kind, int n);

}  // namespace cfm
