// SPDX-License-Identifier: Apache-2.0
#include "cfm/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cfm/error.hpp"

namespace cfm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPointTol = 1e-10;

std::vector<Point2> sample_loop(const std::vector<Segment>& loop, int per_segment) {
  std::vector<Point2> pts;
  for (const auto& seg : loop)
    for (int i = 0; i < per_segment; ++i) pts.push_back(seg.curve.point(double(i) / per_segment));
  return pts;
}

double signed_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

int winding_number(const std::vector<Point2>& poly, const Point2& p) {
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    const double c = cross2(b - a, p - a);
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && c > 0) ++wn;
    } else if (b.y() <= p.y() && c < 0) {
      --wn;
    }
  }
  return wn;
}

void check_closed(const std::vector<Segment>& loop, const std::string& what) {
  if (loop.empty()) throw Error(ErrorCode::DegenerateDomain, what + " is empty");
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point2 e = loop[i].curve.end();
    const Point2 s = loop[(i + 1) % loop.size()].curve.start();
    if ((e - s).norm() > 1e-12) throw Error(ErrorCode::DegenerateDomain, what + " does not close");
  }
}

std::vector<double> get(const DomainParams& p, const std::string& key, std::vector<double> fallback,
                        std::size_t count) {
  auto it = p.find(key);
  std::vector<double> v = it == p.end() ? std::move(fallback) : it->second;
  if (count != 0 && v.size() != count) {
    std::ostringstream os;
    os << "parameter '" << key << "' expects " << count << " values";
    throw Error(ErrorCode::BadParams, os.str());
  }
  return v;
}

void reject_unknown(const DomainParams& p, std::initializer_list<const char*> known) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) throw Error(ErrorCode::BadParams, "unknown domain parameter '" + k + "'");
  }
}

std::vector<Segment> circle_arcs(const Point2& c, double r, const std::array<double, 4>& angles) {
  for (int k = 0; k < 3; ++k)
    if (!(angles[k + 1] > angles[k])) throw Error(ErrorCode::DegenerateDomain, "corner angles must increase");
  if (!(angles[3] < angles[0] + 2 * kPi)) throw Error(ErrorCode::DegenerateDomain, "corner angles exceed a turn");
  std::vector<Segment> arcs;
  for (int k = 0; k < 4; ++k) {
    const double t0 = angles[k];
    const double t1 = k == 3 ? angles[0] + 2 * kPi : angles[k + 1];
    arcs.push_back({CurveSegment::arc(c, r, t0, t1), "arc" + std::to_string(k + 1), SegmentRole::Boundary, {}});
  }
  // exact closure at the wrap-around
  return arcs;
}

}  // namespace

std::string BoundaryTag::str() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Side: return "gamma" + std::to_string(index);
    case Kind::Hole: return "hole" + std::to_string(index);
    case Kind::Natural: return "natural";
  }
  return "none";
}

BoundaryTag BoundaryTag::parse(const std::string& s) {
  auto number = [&](std::size_t off) {
    if (s.size() <= off) throw Error(ErrorCode::UnknownTag, "bad tag '" + s + "'");
    for (std::size_t i = off; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw Error(ErrorCode::UnknownTag, "bad tag '" + s + "'");
    return std::stoi(s.substr(off));
  };
  if (s == "natural") return natural();
  if (s.rfind("gamma", 0) == 0) {
    const int j = number(5);
    if (j < 1 || j > 4) throw Error(ErrorCode::UnknownTag, "bad tag '" + s + "'");
    return side(j);
  }
  if (s.rfind("hole", 0) == 0) return hole(number(4));
  throw Error(ErrorCode::UnknownTag, "bad tag '" + s + "'");
}

int DomainSpec::corner_segment(int k) const {
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (outer[i].role == SegmentRole::Boundary && (outer[i].curve.start() - corners[k]).norm() <= kPointTol)
      return static_cast<int>(i);
  throw Error(ErrorCode::DegenerateDomain, "corner is not a segment start");
}

void finalize_domain(DomainSpec& d) {
  check_closed(d.outer, "outer loop");
  // split boundary segments at interior corner points
  for (int k = 0; k < 4; ++k) {
    const Point2 z = d.corners[k];
    bool found = false;
    for (std::size_t i = 0; i < d.outer.size() && !found; ++i) {
      if (d.outer[i].role != SegmentRole::Boundary) continue;
      if ((d.outer[i].curve.start() - z).norm() <= kPointTol) found = true;
    }
    for (std::size_t i = 0; i < d.outer.size() && !found; ++i) {
      Segment& seg = d.outer[i];
      if (seg.role != SegmentRole::Boundary) continue;
      if ((seg.curve.end() - z).norm() <= kPointTol) continue;
      const double t = seg.curve.project(z);
      if ((seg.curve.point(t) - z).norm() > kPointTol || t <= 0.0 || t >= 1.0) continue;
      Segment tail = seg;
      tail.curve = seg.curve.sub(t, 1.0);
      seg.curve = seg.curve.sub(0.0, t);
      d.outer.insert(d.outer.begin() + static_cast<long>(i) + 1, tail);
      found = true;
    }
    if (!found) throw Error(ErrorCode::DegenerateDomain, "corner " + std::to_string(k + 1) + " is not on the outer loop");
  }
  const int n = static_cast<int>(d.outer.size());
  std::array<int, 4> pos{};
  for (int k = 0; k < 4; ++k) pos[k] = d.corner_segment(k);
  for (int k = 1; k < 4; ++k) {
    const int prev = (pos[k - 1] - pos[0] + n) % n;
    const int cur = (pos[k] - pos[0] + n) % n;
    if (!(cur > prev)) throw Error(ErrorCode::DegenerateDomain, "corners are not in positive order");
  }
  const std::vector<Point2> outer_poly = sample_loop(d.outer, 32);
  if (!(signed_area(outer_poly) > 0.0))
    throw Error(ErrorCode::DegenerateDomain, "outer loop must be counterclockwise");

  int side = 0;
  for (int step = 0; step < n; ++step) {
    Segment& seg = d.outer[(pos[0] + step) % n];
    if (seg.role == SegmentRole::Seam) {
      seg.tag = {};
      continue;
    }
    if (seg.role == SegmentRole::Natural) {
      seg.tag = BoundaryTag::natural();
      continue;
    }
    const int idx = (pos[0] + step) % n;
    for (int k = 0; k < 4; ++k)
      if (idx == pos[k]) side = k + 1;
    seg.tag = BoundaryTag::side(side);
  }

  for (std::size_t h = 0; h < d.holes.size(); ++h) {
    check_closed(d.holes[h], "hole loop " + std::to_string(h + 1));
    for (auto& seg : d.holes[h]) {
      seg.role = SegmentRole::Boundary;
      seg.tag = BoundaryTag::hole(static_cast<int>(h) + 1);
    }
  }
  // disjointness of hole loops from each other and from the outer loop
  std::vector<std::vector<Point2>> hole_polys;
  for (const auto& loop : d.holes) hole_polys.push_back(sample_loop(loop, 32));
  for (std::size_t h = 0; h < hole_polys.size(); ++h) {
    if (!(signed_area(hole_polys[h]) < 0.0))
      throw Error(ErrorCode::DegenerateDomain, "hole loops must be clockwise");
    for (const Point2& p : hole_polys[h])
      if (winding_number(outer_poly, p) != 1)
        throw Error(ErrorCode::DegenerateDomain, "hole touches or leaves the outer loop");
    for (std::size_t g = 0; g < hole_polys.size(); ++g) {
      if (g == h) continue;
      for (const Point2& p : hole_polys[h])
        if (winding_number(hole_polys[g], p) != 0) throw Error(ErrorCode::DegenerateDomain, "holes intersect");
    }
  }
}

DomainSpec make_rect(double u0, double u1, double v0, double v1) {
  return make_rect(u0, u1, v0, v1, {Point2(u0, v0), Point2(u1, v0), Point2(u1, v1), Point2(u0, v1)});
}

DomainSpec make_rect(double u0, double u1, double v0, double v1, const std::array<Point2, 4>& corners,
                     bool periodic_v) {
  if (!(u1 > u0) || !(v1 > v0)) throw Error(ErrorCode::DegenerateDomain, "empty rectangle");
  DomainSpec d;
  d.name = "rect";
  d.kind = DomainKind::Rect;
  d.u0 = u0;
  d.u1 = u1;
  d.v0 = v0;
  d.v1 = v1;
  d.periodic_v = periodic_v;
  d.corners = corners;
  const Point2 a(u0, v0), b(u1, v0), c(u1, v1), e(u0, v1);
  d.outer = {{CurveSegment::line(a, b), "v_min", SegmentRole::Boundary, {}},
             {CurveSegment::line(b, c), "u_max", SegmentRole::Boundary, {}},
             {CurveSegment::line(c, e), "v_max", SegmentRole::Boundary, {}},
             {CurveSegment::line(e, a), "u_min", SegmentRole::Boundary, {}}};
  if (periodic_v) {
    for (auto& z : d.corners)
      if (std::abs(z.y() - v1) <= kPointTol) z.y() = v0;
    bool on_max = false, on_min = false;
    for (const auto& z : d.corners) {
      if (std::abs(z.x() - u1) <= kPointTol) on_max = true;
      else if (std::abs(z.x() - u0) <= kPointTol) on_min = true;
      else throw Error(ErrorCode::DegenerateDomain, "periodic rectangle corners must lie on one u side");
    }
    if (on_max == on_min) throw Error(ErrorCode::DegenerateDomain, "periodic rectangle corners must lie on one u side");
    d.outer[0].role = SegmentRole::Seam;
    d.outer[2].role = SegmentRole::Seam;
    d.outer[on_max ? 3 : 1].role = SegmentRole::Natural;
    if (on_min) {
      // the rim runs downward on u = u0; corners at v0 sit at the segment end
      for (auto& z : d.corners)
        if (std::abs(z.y() - v0) <= kPointTol) z.y() = v1;
    }
  }
  finalize_domain(d);
  return d;
}

DomainSpec make_disk(const Point2& center, double radius, const std::array<double, 4>& corner_angles) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "disk radius must be positive");
  DomainSpec d;
  d.name = "disk";
  d.kind = DomainKind::Disk;
  d.center = center;
  d.radius = radius;
  d.corner_angles = corner_angles;
  d.outer = circle_arcs(center, radius, corner_angles);
  for (int k = 0; k < 4; ++k) d.corners[k] = d.outer[k].curve.start();
  finalize_domain(d);
  return d;
}

DomainSpec make_hypquad(const Point2& center, double radius, double s) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "hypquad radius must be positive");
  if (!(s > 0.0 && s < kPi / 2)) throw Error(ErrorCode::DegenerateDomain, "hypquad needs s in (0, pi/2)");
  DomainSpec d;
  d.name = "hypquad";
  d.kind = DomainKind::HypQuad;
  d.center = center;
  d.radius = radius;
  d.s = s;
  const std::array<double, 4> ang = {s, kPi - s, kPi + s, 2 * kPi - s};
  d.corner_angles = ang;
  for (int k = 0; k < 4; ++k) d.corners[k] = center + radius * Point2(std::cos(ang[k]), std::sin(ang[k]));
  for (int k = 0; k < 4; ++k) {
    const double a = ang[k];
    const double b = k == 3 ? ang[0] + 2 * kPi : ang[k + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double dist = 1.0 / std::cos(half);
    const double r = std::tan(half);
    const Point2 c_unit = dist * Point2(std::cos(mid), std::sin(mid));
    const Point2 pa(std::cos(a), std::sin(a));
    const double t0 = std::atan2(pa.y() - c_unit.y(), pa.x() - c_unit.x());
    const double t1 = t0 - (kPi - (b - a));
    d.arc_centers[k] = center + radius * c_unit;
    d.arc_radii[k] = radius * r;
    Segment seg{CurveSegment::arc(d.arc_centers[k], d.arc_radii[k], t0, t1), "side" + std::to_string(k + 1),
                SegmentRole::Boundary, {}};
    d.outer.push_back(seg);
  }
  // snap arc endpoints to the exact vertices for closure
  for (int k = 0; k < 4; ++k) {
    const Point2 e = d.outer[k].curve.end();
    if ((e - d.corners[(k + 1) % 4]).norm() > 1e-12)
      throw Error(ErrorCode::DegenerateDomain, "hypquad arc does not reach the next vertex");
    d.corners[(k + 1) % 4] = e;
  }
  d.corners[0] = d.outer[0].curve.start();
  finalize_domain(d);
  return d;
}

DomainSpec make_disk_with_holes(const Point2& center, double radius, const std::vector<Point2>& hole_centers,
                                const std::vector<double>& hole_radii,
                                const std::array<double, 4>& corner_angles) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "disk radius must be positive");
  if (hole_centers.size() != hole_radii.size()) throw Error(ErrorCode::BadParams, "hole centers/radii mismatch");
  DomainSpec d;
  d.name = "disk_two_holes";
  d.kind = DomainKind::DiskWithHoles;
  d.center = center;
  d.radius = radius;
  d.corner_angles = corner_angles;
  d.outer = circle_arcs(center, radius, corner_angles);
  for (int k = 0; k < 4; ++k) d.corners[k] = d.outer[k].curve.start();
  for (std::size_t h = 0; h < hole_centers.size(); ++h) {
    const double r = hole_radii[h];
    if (r < 0.0) throw Error(ErrorCode::BadParams, "hole radius must be non-negative");
    if (r == 0.0) continue;  // absent hole
    if ((hole_centers[h] - center).norm() + r >= radius)
      throw Error(ErrorCode::DegenerateDomain, "hole touches or leaves the disk");
    for (std::size_t g = 0; g < h; ++g)
      if (hole_radii[g] > 0.0 && (hole_centers[h] - hole_centers[g]).norm() <= r + hole_radii[g])
        throw Error(ErrorCode::DegenerateDomain, "holes intersect");
    d.hole_centers.push_back(hole_centers[h]);
    d.hole_radii.push_back(r);
    d.holes.push_back({{CurveSegment::arc(hole_centers[h], r, 0.0, -2 * kPi), "hole" + std::to_string(d.holes.size() + 1),
                        SegmentRole::Boundary, {}}});
  }
  if (d.holes.empty()) {
    d.kind = DomainKind::Disk;
    d.name = "disk";
  }
  finalize_domain(d);
  return d;
}

std::vector<std::string> catalog_domain_names() { return {"rect", "disk", "hypquad", "disk_two_holes"}; }

DomainSpec make_domain(const std::string& name, const DomainParams& params) {
  if (name == "rect") {
    reject_unknown(params, {"u", "v", "corners", "periodic_v"});
    const auto u = get(params, "u", {0.0, 1.0}, 2);
    const auto v = get(params, "v", {0.0, 1.0}, 2);
    const bool periodic = get(params, "periodic_v", {0.0}, 1)[0] != 0.0;
    auto it = params.find("corners");
    if (it == params.end()) {
      if (periodic) throw Error(ErrorCode::BadParams, "periodic rectangle needs explicit corners");
      return make_rect(u[0], u[1], v[0], v[1]);
    }
    const auto c = get(params, "corners", {}, 8);
    return make_rect(u[0], u[1], v[0], v[1],
                     {Point2(c[0], c[1]), Point2(c[2], c[3]), Point2(c[4], c[5]), Point2(c[6], c[7])}, periodic);
  }
  if (name == "disk") {
    reject_unknown(params, {"center", "radius", "corner_angles"});
    const auto c = get(params, "center", {0.0, 0.0}, 2);
    const auto r = get(params, "radius", {1.0}, 1);
    const auto a = get(params, "corner_angles", {0.0, kPi / 2, kPi, 3 * kPi / 2}, 4);
    return make_disk(Point2(c[0], c[1]), r[0], {a[0], a[1], a[2], a[3]});
  }
  if (name == "hypquad") {
    reject_unknown(params, {"center", "radius", "s"});
    const auto c = get(params, "center", {0.0, 0.0}, 2);
    const auto r = get(params, "radius", {1.0}, 1);
    const auto s = get(params, "s", {kPi / 4}, 1);
    return make_hypquad(Point2(c[0], c[1]), r[0], s[0]);
  }
  if (name == "disk_two_holes") {
    reject_unknown(params, {"center", "radius", "holes", "corner_angles"});
    const auto c = get(params, "center", {0.5, 0.5}, 2);
    const auto r = get(params, "radius", {1.0}, 1);
    const auto h = get(params, "holes", {0.25, 0.25, 0.25, 0.75, 0.75, 0.25}, 0);
    const auto a = get(params, "corner_angles", {-kPi / 2, 0.0, kPi / 2, kPi}, 4);
    if (h.size() % 3 != 0) throw Error(ErrorCode::BadParams, "holes expects triples (x, y, r)");
    std::vector<Point2> hc;
    std::vector<double> hr;
    for (std::size_t i = 0; i < h.size(); i += 3) {
      hc.emplace_back(h[i], h[i + 1]);
      hr.push_back(h[i + 2]);
    }
    return make_disk_with_holes(Point2(c[0], c[1]), r[0], hc, hr, {a[0], a[1], a[2], a[3]});
  }
  throw Error(ErrorCode::BadParams, "unknown domain '" + name + "'");
}

}  // namespace cfm
