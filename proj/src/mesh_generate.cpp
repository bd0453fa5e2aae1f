// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>

#include "cfm/error.hpp"
#include "cfm/mesh.hpp"

namespace cfm {

namespace {

constexpr double kPi = 3.14159265358979323846;
using Curve = std::optional<CurveSegment>;

class Builder {
 public:
  explicit Builder(double scale) : tol_(1e-11 * (1.0 + scale)) {}

  int vertex(const Point2& p) {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
      if ((mesh.vertices[i] - p).norm() <= tol_) return static_cast<int>(i);
    mesh.vertices.push_back(p);
    return static_cast<int>(mesh.vertices.size()) - 1;
  }
  int new_vertex(const Point2& p) {
    mesh.vertices.push_back(p);
    return static_cast<int>(mesh.vertices.size()) - 1;
  }

  // Adds a root element; x holds the true corner positions (which may differ from
  // the canonical vertex positions across a periodic seam).
  void element(ElementKind kind, std::array<int, 4> ids, std::array<Point2, 4> x, std::array<Curve, 4> curves = {}) {
    RootGeometry g;
    g.kind = kind;
    g.x = x;
    g.curve = curves;
    mesh.roots.push_back(g);
    Element e;
    e.kind = kind;
    e.v = ids;
    e.root = static_cast<int>(mesh.roots.size()) - 1;
    for (int i = 0; i < e.num_vertices(); ++i) e.ref[i] = reference_vertex(kind, i);
    mesh.elements.push_back(e);
  }
  void quad(const std::array<Point2, 4>& x, std::array<Curve, 4> curves = {}) {
    element(ElementKind::Quad, {vertex(x[0]), vertex(x[1]), vertex(x[2]), vertex(x[3])}, x, curves);
  }
  void tri(const std::array<Point2, 3>& x, std::array<Curve, 3> c = {}) {
    element(ElementKind::Triangle, {vertex(x[0]), vertex(x[1]), vertex(x[2]), -1}, {x[0], x[1], x[2], x[2]},
            {c[0], c[1], c[2], std::nullopt});
  }

  HpMesh mesh;

 private:
  double tol_;
};

double domain_scale(const DomainSpec& d) {
  double s = 0.0;
  for (const auto& seg : d.outer)
    for (int k = 0; k <= 4; ++k) s = std::max(s, seg.curve.point(k / 4.0).cwiseAbs().maxCoeff());
  return s;
}

// Boundary breakpoints: fixed points plus uniform fill of spacing about h.
std::vector<double> breakpoints(std::vector<double> fixed, double h) {
  std::sort(fixed.begin(), fixed.end());
  std::vector<double> f;
  for (double x : fixed)
    if (f.empty() || x - f.back() > 1e-12 * (1.0 + std::abs(x))) f.push_back(x);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const int n = h > 0 ? std::max(1, static_cast<int>(std::lround((f[i + 1] - f[i]) / h))) : 1;
    for (int k = 0; k < n; ++k) out.push_back(f[i] + (f[i + 1] - f[i]) * k / n);
  }
  out.push_back(f.back());
  return out;
}

void rect_mesh(Builder& b, const DomainSpec& d, const MeshOptions& opt) {
  const double su = d.u1 - d.u0, sv = d.v1 - d.v0;
  std::vector<double> fu = {d.u0, d.u1}, fv = {d.v0, d.v1};
  for (const auto& z : d.corners) {
    fu.push_back(z.x());
    fv.push_back(z.y());
  }
  std::vector<double> us, vs;
  if (opt.grid_u > 0 && opt.grid_v > 0) {
    us = breakpoints(fu, su / opt.grid_u);
    vs = breakpoints(fv, sv / opt.grid_v);
  } else if (opt.target > 0) {
    const double nu = std::max(1.0, std::round(std::sqrt(opt.target * su / sv)));
    const double nv = std::max(1.0, std::round(opt.target / nu));
    us = breakpoints(fu, su / nu);
    vs = breakpoints(fv, sv / nv);
  } else {
    us = breakpoints(fu, 0.0);
    vs = breakpoints(fv, 0.0);
  }
  const int nu = static_cast<int>(us.size()), nv = static_cast<int>(vs.size());
  std::vector<int> id(nu * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) {
      if (d.periodic_v && j == nv - 1) id[j * nu + i] = id[i];
      else id[j * nu + i] = b.new_vertex(Point2(us[i], vs[j]));
    }
  for (int j = 0; j + 1 < nv; ++j)
    for (int i = 0; i + 1 < nu; ++i) {
      const std::array<Point2, 4> x = {Point2(us[i], vs[j]), Point2(us[i + 1], vs[j]), Point2(us[i + 1], vs[j + 1]),
                                       Point2(us[i], vs[j + 1])};
      b.element(ElementKind::Quad,
                {id[j * nu + i], id[j * nu + i + 1], id[(j + 1) * nu + i + 1], id[(j + 1) * nu + i]}, x);
    }
}

// Star mesh: an inner polygon at half distance to the centroid plus one ring quad per segment.
void star_mesh(Builder& b, const DomainSpec& d) {
  if (!d.holes.empty()) throw Error(ErrorCode::MeshingFailed, "star mesher does not handle holes");
  const int n = static_cast<int>(d.outer.size());
  if (n < 3) throw Error(ErrorCode::MeshingFailed, "star mesher needs at least three segments");
  for (const auto& seg : d.outer)
    if (seg.role != SegmentRole::Boundary) throw Error(ErrorCode::MeshingFailed, "star mesher needs a plain loop");
  Point2 c = Point2::Zero();
  double area = 0.0;
  {
    std::vector<Point2> poly;
    for (const auto& seg : d.outer)
      for (int k = 0; k < 16; ++k) poly.push_back(seg.curve.point(k / 16.0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % poly.size()];
      const double w = cross2(p, q);
      area += w;
      c += w * (p + q);
    }
    c /= 3.0 * area;
  }
  if (d.kind == DomainKind::Disk) c = d.center;
  std::vector<Point2> outer(n), inner(n);
  for (int k = 0; k < n; ++k) {
    outer[k] = d.outer[k].curve.start();
    inner[k] = c + 0.5 * (outer[k] - c);
  }
  if (n == 4) {
    b.quad({inner[0], inner[1], inner[2], inner[3]});
  } else {
    for (int k = 0; k < n; ++k) b.tri({c, inner[k], inner[(k + 1) % n]});
  }
  for (int k = 0; k < n; ++k) {
    const int k1 = (k + 1) % n;
    const auto& seg = d.outer[k].curve;
    b.quad({inner[k], outer[k], outer[k1], inner[k1]}, {std::nullopt, seg.is_straight() ? Curve() : Curve(seg)});
  }
}

// Hyperbolic quadrilateral: central quad on the arc midpoints and a strip of
// geometrically shrinking slices into each zero-angle vertex, closed by a triangle.
void hypquad_mesh(Builder& b, const DomainSpec& d, const MeshOptions& opt) {
  if (d.outer.size() != 4) throw Error(ErrorCode::MeshingFailed, "hypquad mesher expects four arcs");
  const int ns = std::max(1, opt.cusp_slices);
  const double sigma = opt.cusp_ratio;
  if (!(sigma > 0.0 && sigma < 1.0)) throw Error(ErrorCode::InvalidArgument, "cusp ratio must lie in (0, 1)");
  std::array<Point2, 4> mid;
  for (int k = 0; k < 4; ++k) mid[k] = d.outer[k].curve.point(0.5);
  b.quad(mid);
  for (int k = 0; k < 4; ++k) {
    const CurveSegment& in = d.outer[k].curve;             // arrives at the cusp
    const CurveSegment& out = d.outer[(k + 1) % 4].curve;  // leaves the cusp
    std::vector<double> ta, tb;
    for (int j = 0; j <= ns; ++j) {
      const double s = 0.5 * std::pow(sigma, j);
      ta.push_back(1.0 - s);
      tb.push_back(s);
    }
    for (int j = 0; j < ns; ++j) {
      b.quad({in.point(ta[j]), in.point(ta[j + 1]), out.point(tb[j + 1]), out.point(tb[j])},
             {Curve(in.sub(ta[j], ta[j + 1])), std::nullopt, Curve(out.sub(tb[j + 1], tb[j])), std::nullopt});
    }
    b.tri({in.point(ta[ns]), in.end(), out.point(tb[ns])},
          {Curve(in.sub(ta[ns], 1.0)), Curve(out.sub(0.0, tb[ns])), std::nullopt});
  }
}

// Disk with collinear circular holes: a square core divided into a block grid
// in the frame of the hole axis, each hole inside its own box of four ring quads,
// and a ring of quads projecting the core boundary onto the outer circle.
void holes_mesh(Builder& b, const DomainSpec& d) {
  const int m = d.num_holes();
  const Point2 c0 = d.center;
  const double R = d.radius;
  Point2 e(1.0, 0.0);
  for (int h = 0; h < m; ++h)
    if ((d.hole_centers[h] - c0).norm() > 1e-12 * R) {
      e = (d.hole_centers[h] - c0).normalized();
      break;
    }
  const Point2 n(-e.y(), e.x());
  std::vector<double> a(m);
  double rmax = 0.0, amax = 0.0;
  for (int h = 0; h < m; ++h) {
    const Point2 off = d.hole_centers[h] - c0;
    if (std::abs(off.dot(n)) > 1e-10 * R) throw Error(ErrorCode::MeshingFailed, "holes must lie on one line through the center");
    a[h] = off.dot(e);
    rmax = std::max(rmax, d.hole_radii[h]);
    amax = std::max(amax, std::abs(a[h]));
  }
  double gmin = 1e300;
  for (int h = 0; h < m; ++h)
    for (int g = h + 1; g < m; ++g) gmin = std::min(gmin, 0.5 * std::abs(a[h] - a[g]));
  const double bx = std::min({gmin, 1.2 * rmax, 0.9 * R / std::sqrt(2.0) - amax});
  if (!(bx > 1.05 * rmax)) throw Error(ErrorCode::MeshingFailed, "holes too close to each other or to the boundary");
  const double csq = amax + bx;
  // corners must project onto the core corners
  const double base = std::atan2(e.y(), e.x());
  for (int k = 0; k < 4; ++k) {
    bool ok = false;
    for (int j = 0; j < 4; ++j)
      ok = ok || std::abs(std::remainder(d.corner_angles[k] - base - (-0.75 + 0.5 * j) * kPi, 2 * kPi)) < 1e-9;
    if (!ok) throw Error(ErrorCode::MeshingFailed, "corners must sit at 45 degrees off the hole axis");
  }
  auto P = [&](double x, double y) -> Point2 { return c0 + x * e + y * n; };
  std::vector<double> xs = {-csq, csq}, ys = {-csq, -bx, bx, csq};
  for (int h = 0; h < m; ++h) {
    xs.push_back(a[h] - bx);
    xs.push_back(a[h] + bx);
  }
  std::sort(xs.begin(), xs.end());
  auto same = [](double p, double q) { return std::abs(p - q) < 1e-12; };
  xs.erase(std::unique(xs.begin(), xs.end(), same), xs.end());
  ys.erase(std::unique(ys.begin(), ys.end(), same), ys.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      int hole = -1;
      for (int h = 0; h < m; ++h)
        if (same(ys[j], -bx) && same(ys[j + 1], bx) && std::abs(xs[i] - (a[h] - bx)) < 1e-12 && std::abs(xs[i + 1] - (a[h] + bx)) < 1e-12) hole = h;
      if (hole < 0) {
        b.quad({P(xs[i], ys[j]), P(xs[i + 1], ys[j]), P(xs[i + 1], ys[j + 1]), P(xs[i], ys[j + 1])});
        continue;
      }
      const Point2 hc = d.hole_centers[hole];
      const double r = d.hole_radii[hole];
      for (int k = 0; k < 4; ++k) {
        const double p0 = base + kPi / 4 + k * kPi / 2, p1 = p0 + kPi / 2;
        const Point2 h0 = hc + r * Point2(std::cos(p0), std::sin(p0));
        const Point2 h1 = hc + r * Point2(std::cos(p1), std::sin(p1));
        const double sx0 = (k == 0 || k == 3) ? 1 : -1, sy0 = (k < 2) ? 1 : -1;
        const double sx1 = (k == 2 || k == 3) ? 1 : -1, sy1 = (k == 0 || k == 3) ? 1 : -1;
        const Point2 q0 = P(a[hole] + sx0 * bx, sy0 * bx), q1 = P(a[hole] + sx1 * bx, sy1 * bx);
        b.quad({h0, q0, q1, h1}, {std::nullopt, std::nullopt, std::nullopt, Curve(CurveSegment::arc(hc, r, p1, p0))});
      }
    }
  // core boundary, counterclockwise from the (-,-) corner
  std::vector<std::pair<double, double>> ring;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) ring.push_back({xs[i], -csq});
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) ring.push_back({csq, ys[j]});
  for (std::size_t i = xs.size() - 1; i > 0; --i) ring.push_back({xs[i], csq});
  for (std::size_t j = ys.size() - 1; j > 0; --j) ring.push_back({-csq, ys[j]});
  const int nr = static_cast<int>(ring.size());
  for (int k = 0; k < nr; ++k) {
    const auto [x0, y0] = ring[k];
    const auto [x1, y1] = ring[(k + 1) % nr];
    const double t0 = base + std::atan2(y0, x0);
    double t1 = base + std::atan2(y1, x1);
    while (t1 <= t0) t1 += 2 * kPi;
    const Point2 o0 = c0 + R * Point2(std::cos(t0), std::sin(t0));
    const Point2 o1 = c0 + R * Point2(std::cos(t1), std::sin(t1));
    b.quad({P(x0, y0), o0, o1, P(x1, y1)}, {std::nullopt, Curve(CurveSegment::arc(c0, R, t0, t1))});
  }
}

// Tags each topological boundary edge with the domain segment it lies on.
void attach_tags(HpMesh& mesh, const DomainSpec& d, double scale) {
  std::vector<const Segment*> segs;
  for (const auto& s : d.outer)
    if (s.role != SegmentRole::Seam) segs.push_back(&s);
  for (const auto& loop : d.holes)
    for (const auto& s : loop) segs.push_back(&s);
  std::map<std::pair<int, int>, int> count;
  for (const auto& e : mesh.elements)
    for (int i = 0; i < e.num_vertices(); ++i) {
      const int a = e.v[i], c = e.v[(i + 1) % e.num_vertices()];
      ++count[{std::min(a, c), std::max(a, c)}];
    }
  const double tol = 1e-9 * (1.0 + scale);
  for (auto& e : mesh.elements) {
    const int n = e.num_vertices();
    for (int i = 0; i < n; ++i) {
      e.tag[i] = {};
      e.label[i] = -1;
      const int a = e.v[i], c = e.v[(i + 1) % n];
      if (count[{std::min(a, c), std::max(a, c)}] != 1) continue;
      const Point2 ra = reference_vertex(e.kind, i), rb = reference_vertex(e.kind, (i + 1) % n);
      const Segment* found = nullptr;
      for (const Segment* s : segs) {
        bool on = true;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          const Point2 p = element_point(mesh, e, ra + t * (rb - ra));
          if ((s->curve.point(s->curve.project(p)) - p).norm() > tol) {
            on = false;
            break;
          }
        }
        if (on) {
          found = s;
          break;
        }
      }
      if (!found) throw Error(ErrorCode::MeshingFailed, "boundary edge does not lie on the domain boundary");
      e.tag[i] = found->tag;
      int id = mesh.label_id(found->label);
      if (id < 0) {
        mesh.labels.push_back(found->label);
        id = static_cast<int>(mesh.labels.size()) - 1;
      }
      e.label[i] = id;
    }
  }
}

}  // namespace

HpMesh initial_mesh(const DomainSpec& domain, int target) {
  MeshOptions opt;
  opt.target = target;
  return initial_mesh(domain, opt);
}

HpMesh initial_mesh(const DomainSpec& domain, const MeshOptions& options) {
  if (options.target < 0) throw Error(ErrorCode::InvalidArgument, "target must be non-negative");
  const double scale = domain_scale(domain);
  Builder b(scale);
  switch (domain.kind) {
    case DomainKind::Rect: rect_mesh(b, domain, options); break;
    case DomainKind::HypQuad: hypquad_mesh(b, domain, options); break;
    case DomainKind::DiskWithHoles: holes_mesh(b, domain); break;
    case DomainKind::Disk:
    case DomainKind::General: star_mesh(b, domain); break;
  }
  HpMesh mesh = std::move(b.mesh);
  mesh.num_holes = domain.num_holes();
  attach_tags(mesh, domain, scale);
  if (domain.kind != DomainKind::Rect)
    while (options.target > 0 && 4 * mesh.elements.size() <= static_cast<std::size_t>(options.target))
      mesh = refine_uniform(mesh);
  for (const auto& msg : validate(mesh))
    throw Error(ErrorCode::MeshingFailed, "invalid initial mesh: " + msg);
  return mesh;
}

}  // namespace cfm
