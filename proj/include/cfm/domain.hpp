// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cfm/geometry.hpp"

namespace cfm {

// Boundary tag of an element edge. Sides are numbered 1..4 (gamma_1..gamma_4),
// holes 1..m. Natural marks a free boundary outside the quadrilateral sides
// (e.g. the collapsed pole edge of a periodic rectangle).
struct BoundaryTag {
  enum class Kind { None, Side, Hole, Natural };
  Kind kind = Kind::None;
  int index = 0;

  static BoundaryTag side(int j) { return {Kind::Side, j}; }
  static BoundaryTag hole(int k) { return {Kind::Hole, k}; }
  static BoundaryTag natural() { return {Kind::Natural, 0}; }
  bool is_boundary() const { return kind != Kind::None; }
  bool operator==(const BoundaryTag& o) const { return kind == o.kind && index == o.index; }
  bool operator!=(const BoundaryTag& o) const { return !(*this == o); }
  bool operator<(const BoundaryTag& o) const {
    return kind != o.kind ? kind < o.kind : index < o.index;
  }
  std::string str() const;
  static BoundaryTag parse(const std::string& s);  // gamma1..gamma4, hole1.., natural
};

enum class SegmentRole { Boundary, Seam, Natural };

struct Segment {
  CurveSegment curve;
  std::string label;
  SegmentRole role = SegmentRole::Boundary;
  BoundaryTag tag;  // filled by finalize_domain
};

enum class DomainKind { Rect, Disk, HypQuad, DiskWithHoles, General };

struct DomainSpec {
  std::string name;
  DomainKind kind = DomainKind::General;
  std::vector<Segment> outer;
  std::array<Point2, 4> corners;
  std::vector<std::vector<Segment>> holes;

  // Shape data used by the structured meshers.
  double u0 = 0, u1 = 0, v0 = 0, v1 = 0;
  bool periodic_v = false;
  Point2 center = Point2::Zero();
  double radius = 0;
  double s = 0;                      // hypquad vertex angle
  std::array<Point2, 4> arc_centers;  // hypquad side circles
  std::array<double, 4> arc_radii{};
  std::vector<Point2> hole_centers;
  std::vector<double> hole_radii;
  std::array<double, 4> corner_angles{};  // disk-like domains

  int num_holes() const { return static_cast<int>(holes.size()); }
  // Index of the outer segment starting at corner k (0-based).
  int corner_segment(int k) const;
};

using DomainParams = std::map<std::string, std::vector<double>>;

// Splits the outer loop at the corners, checks closure/order/disjointness and
// assigns side tags (gamma_j runs from corner j to corner j+1).
void finalize_domain(DomainSpec& domain);

DomainSpec make_domain(const std::string& name, const DomainParams& params);
std::vector<std::string> catalog_domain_names();

DomainSpec make_rect(double u0, double u1, double v0, double v1);
DomainSpec make_rect(double u0, double u1, double v0, double v1, const std::array<Point2, 4>& corners,
                     bool periodic_v = false);
DomainSpec make_disk(const Point2& center, double radius,
                     const std::array<double, 4>& corner_angles = {0.0, 1.5707963267948966, 3.141592653589793,
                                                                   4.71238898038469});
DomainSpec make_hypquad(const Point2& center, double radius, double s);
DomainSpec make_disk_with_holes(const Point2& center, double radius, const std::vector<Point2>& hole_centers,
                                const std::vector<double>& hole_radii,
                                const std::array<double, 4>& corner_angles);

}  // namespace cfm
