// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "cfm/mesh.hpp"

namespace cfm {

// Legendre polynomials P_0..P_n and their first derivatives at x.
void legendre(int n, double x, std::vector<double>& P, std::vector<double>& dP);

// Integrated Legendre (Lobatto) function l_k, k >= 2, normalized so that
// l_k(x) = (P_k(x) - P_{k-2}(x)) / sqrt(2(2k-1)).
double lobatto(int k, double x);
double lobatto_derivative(int k, double x);

// Kernel phi_{k-2} with l_k(x) = (1 - x^2)/4 * phi_{k-2}(x).
void lobatto_kernel(int k, double x, double& value, double& derivative);

struct Mode {
  enum class Type { Vertex, Edge, Interior } type;
  int entity = 0;  // local vertex or edge index
  int i = 0, j = 0;  // edge: i = k; quad interior: (i, j); triangle bubble: (n1, n2)
};

// Local mode list of one element: vertices, then edge modes per edge
// (degree 2..edge_degree[e]), then interior modes up to the element degree.
struct LocalBasis {
  ElementKind kind = ElementKind::Quad;
  int degree = 1;
  std::array<int, 4> edge_degree{1, 1, 1, 1};
  std::vector<Mode> modes;

  int size() const { return static_cast<int>(modes.size()); }
};

LocalBasis make_local_basis(ElementKind kind, int degree, const std::array<int, 4>& edge_degree);

// Values and reference gradients of all local modes at xi, in the local edge
// orientation (edge e runs from local vertex e to e+1).
void eval_basis(const LocalBasis& basis, const Point2& xi, Eigen::VectorXd& value, Eigen::MatrixX2d& grad);

// Tabulated basis on an element quadrature rule.
struct BasisTable {
  std::vector<Eigen::VectorXd> value;   // per quadrature point
  std::vector<Eigen::MatrixX2d> grad;   // per quadrature point
};
const BasisTable& tabulate(const LocalBasis& basis, int rule_order);

}  // namespace cfm
