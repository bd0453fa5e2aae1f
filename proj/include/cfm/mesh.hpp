// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cfm/domain.hpp"
#include "cfm/geometry.hpp"

namespace cfm {

enum class ElementKind { Triangle, Quad };

// Coarse element carrying the exact boundary geometry. Reference domains:
// quad [-1,1]^2 with vertices (-1,-1),(1,-1),(1,1),(-1,1); triangle
// {x,y >= 0, x+y <= 1} with vertices (0,0),(1,0),(0,1).
// curve[i] runs from x[i] to x[i+1]; empty means straight.
struct RootGeometry {
  ElementKind kind = ElementKind::Quad;
  std::array<Point2, 4> x;
  std::array<std::optional<CurveSegment>, 4> curve;
  int num_vertices() const { return kind == ElementKind::Quad ? 4 : 3; }
};

// Refined elements live inside a root: ref[i] are their vertex positions in
// the root reference domain, so the physical map is root_map(submap(xi)).
struct Element {
  ElementKind kind = ElementKind::Quad;
  std::array<int, 4> v{-1, -1, -1, -1};
  int root = -1;
  std::array<Point2, 4> ref;
  std::array<BoundaryTag, 4> tag;  // edge i = (v[i], v[i+1])
  std::array<int, 4> label{-1, -1, -1, -1};
  int degree = 1;
  int num_vertices() const { return kind == ElementKind::Quad ? 4 : 3; }
};

struct HpMesh {
  std::vector<Point2> vertices;
  std::vector<Element> elements;
  std::vector<RootGeometry> roots;
  std::vector<std::string> labels;
  std::set<int> singular_vertices;
  int num_holes = 0;

  int label_id(const std::string& label) const;  // -1 if absent
};

// Geometry map of a root at reference point r.
void root_map(const RootGeometry& g, const Point2& r, Point2& x, Eigen::Matrix2d& DF);
// Element map: physical point and 2x2 Jacobian d(u,v)/d(xi,eta).
void element_map(const HpMesh& mesh, const Element& e, const Point2& xi, Point2& x, Eigen::Matrix2d& DF);
Point2 element_point(const HpMesh& mesh, const Element& e, const Point2& xi);
// Element reference coordinates of local vertex i.
Point2 reference_vertex(ElementKind kind, int i);

struct MeshOptions {
  int target = 0;           // coarse element-count hint (0 = template default)
  int grid_u = 0, grid_v = 0;  // explicit rectangle grid (overrides target)
  int cusp_slices = 6;      // hyperbolic quadrilateral cusp layers
  double cusp_ratio = 0.5;
};

HpMesh initial_mesh(const DomainSpec& domain, int target = 0);
HpMesh initial_mesh(const DomainSpec& domain, const MeshOptions& options);

HpMesh refine_corner(const HpMesh& mesh, const Point2& corner, int levels, double grading = 0.15);
// selector: a boundary tag name (gamma1..gamma4, holeK, natural) or a segment label (e.g. u_min).
HpMesh refine_edge(const HpMesh& mesh, const std::string& selector, int levels, double grading = 0.15);
// Splits every element into four (quads) or four (triangles).
HpMesh refine_uniform(const HpMesh& mesh);

struct DegreeRule {
  enum class Kind { Uniform, Graded } kind = Kind::Uniform;
  int p = 1;
  static DegreeRule uniform(int p) { return {Kind::Uniform, p}; }
  static DegreeRule graded(int p_max) { return {Kind::Graded, p_max}; }
};
HpMesh assign_degrees(const HpMesh& mesh, const DegreeRule& rule);

std::vector<std::string> validate(const HpMesh& mesh);

// Mesh construction recipe: initial mesh, then refinement steps in order,
// then degrees. A step with levels <= 0 uses the degree p.
struct RefineStep {
  enum class Kind { Corner, Edge } kind = Kind::Corner;
  Point2 point = Point2::Zero();  // corner steps
  std::string selector;           // edge steps
  int levels = 0;
  double grading = 0.15;
};
struct MeshRecipe {
  MeshOptions options;
  std::vector<RefineStep> steps;
  bool graded_degrees = false;
};
HpMesh build_mesh(const DomainSpec& domain, const MeshRecipe& recipe, int p);

std::string export_mesh(const HpMesh& mesh);

// Element diameter estimated from sampled boundary points.
double element_diameter(const HpMesh& mesh, const Element& e);

}  // namespace cfm
