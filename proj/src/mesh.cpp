// SPDX-License-Identifier: Apache-2.0
#include "cfm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <sstream>

#include "cfm/error.hpp"
#include "cfm/quadrature.hpp"

namespace cfm {

namespace {

struct EdgeEval {
  Point2 x, dx;
};

EdgeEval edge_eval(const RootGeometry& g, int i, double t) {
  const int n = g.num_vertices();
  const Point2& a = g.x[i];
  const Point2& b = g.x[(i + 1) % n];
  if (g.curve[i]) return {g.curve[i]->point(t), g.curve[i]->tangent(t)};
  return {a + t * (b - a), b - a};
}

bool has_curves(const RootGeometry& g) {
  for (int i = 0; i < g.num_vertices(); ++i)
    if (g.curve[i]) return true;
  return false;
}

}  // namespace

int HpMesh::label_id(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

Point2 reference_vertex(ElementKind kind, int i) {
  if (kind == ElementKind::Quad) {
    static const Point2 q[4] = {Point2(-1, -1), Point2(1, -1), Point2(1, 1), Point2(-1, 1)};
    return q[i];
  }
  static const Point2 t[3] = {Point2(0, 0), Point2(1, 0), Point2(0, 1)};
  return t[i];
}

void root_map(const RootGeometry& g, const Point2& r, Point2& x, Eigen::Matrix2d& DF) {
  const double xi = r.x(), eta = r.y();
  if (g.kind == ElementKind::Quad) {
    const double N[4] = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta), 0.25 * (1 + xi) * (1 + eta),
                         0.25 * (1 - xi) * (1 + eta)};
    const double Nx[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
    const double Ny[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};
    Point2 B = Point2::Zero(), Bx = Point2::Zero(), By = Point2::Zero();
    for (int i = 0; i < 4; ++i) {
      B += N[i] * g.x[i];
      Bx += Nx[i] * g.x[i];
      By += Ny[i] * g.x[i];
    }
    if (!has_curves(g)) {
      x = B;
      DF.col(0) = Bx;
      DF.col(1) = By;
      return;
    }
    const EdgeEval e0 = edge_eval(g, 0, 0.5 * (1 + xi));
    const EdgeEval e1 = edge_eval(g, 1, 0.5 * (1 + eta));
    const EdgeEval e2 = edge_eval(g, 2, 0.5 * (1 - xi));
    const EdgeEval e3 = edge_eval(g, 3, 0.5 * (1 - eta));
    x = 0.5 * (1 - eta) * e0.x + 0.5 * (1 + eta) * e2.x + 0.5 * (1 + xi) * e1.x + 0.5 * (1 - xi) * e3.x - B;
    DF.col(0) = 0.25 * (1 - eta) * e0.dx - 0.25 * (1 + eta) * e2.dx + 0.5 * e1.x - 0.5 * e3.x - Bx;
    DF.col(1) = -0.5 * e0.x + 0.5 * e2.x + 0.25 * (1 + xi) * e1.dx - 0.25 * (1 - xi) * e3.dx - By;
    return;
  }
  const double lam[3] = {1 - xi - eta, xi, eta};
  static const Point2 glam[3] = {Point2(-1, -1), Point2(1, 0), Point2(0, 1)};
  x = lam[0] * g.x[0] + lam[1] * g.x[1] + lam[2] * g.x[2];
  DF.col(0) = g.x[1] - g.x[0];
  DF.col(1) = g.x[2] - g.x[0];
  for (int e = 0; e < 3; ++e) {
    if (!g.curve[e]) continue;
    const int a = e, b = (e + 1) % 3;
    const double s = lam[b] - lam[a];
    const double t = 0.5 * (1 + s);
    const double w = t * (1 - t);
    const Point2 chord = g.x[b] - g.x[a];
    Point2 f, fs = Point2::Zero();
    if (w < 1e-8) {
      const double te = t < 0.5 ? 0.0 : 1.0;
      const Point2 dd = g.curve[e]->tangent(te) - chord;
      f = t < 0.5 ? dd : Point2(-dd);
    } else {
      const Point2 E = g.curve[e]->point(t);
      const Point2 dE = g.curve[e]->tangent(t);
      const Point2 delta = E - ((1 - t) * g.x[a] + t * g.x[b]);
      const Point2 ddelta = dE - chord;
      f = delta / w;
      fs = 0.5 * (ddelta * w - delta * (1 - 2 * t)) / (w * w);
    }
    const double ll = lam[a] * lam[b];
    x += ll * f;
    const Point2 gll = lam[b] * glam[a] + lam[a] * glam[b];
    const Point2 gs = glam[b] - glam[a];
    DF += f * gll.transpose() + ll * fs * gs.transpose();
  }
}

void element_map(const HpMesh& mesh, const Element& e, const Point2& xi, Point2& x, Eigen::Matrix2d& DF) {
  Point2 r;
  Eigen::Matrix2d Dr;
  if (e.kind == ElementKind::Quad) {
    const double a = xi.x(), b = xi.y();
    const double N[4] = {0.25 * (1 - a) * (1 - b), 0.25 * (1 + a) * (1 - b), 0.25 * (1 + a) * (1 + b),
                         0.25 * (1 - a) * (1 + b)};
    const double Nx[4] = {-0.25 * (1 - b), 0.25 * (1 - b), 0.25 * (1 + b), -0.25 * (1 + b)};
    const double Ny[4] = {-0.25 * (1 - a), -0.25 * (1 + a), 0.25 * (1 + a), 0.25 * (1 - a)};
    r.setZero();
    Dr.setZero();
    for (int i = 0; i < 4; ++i) {
      r += N[i] * e.ref[i];
      Dr.col(0) += Nx[i] * e.ref[i];
      Dr.col(1) += Ny[i] * e.ref[i];
    }
  } else {
    Dr.col(0) = e.ref[1] - e.ref[0];
    Dr.col(1) = e.ref[2] - e.ref[0];
    r = e.ref[0] + Dr * xi;
  }
  Eigen::Matrix2d DFr;
  root_map(mesh.roots[e.root], r, x, DFr);
  DF = DFr * Dr;
}

Point2 element_point(const HpMesh& mesh, const Element& e, const Point2& xi) {
  Point2 x;
  Eigen::Matrix2d DF;
  element_map(mesh, e, xi, x, DF);
  return x;
}

double element_diameter(const HpMesh& mesh, const Element& e) {
  std::vector<Point2> pts;
  const int n = e.num_vertices();
  for (int i = 0; i < n; ++i) {
    const Point2 a = reference_vertex(e.kind, i), b = reference_vertex(e.kind, (i + 1) % n);
    for (int k = 0; k < 8; ++k) pts.push_back(element_point(mesh, e, a + (double(k) / 8) * (b - a)));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

HpMesh assign_degrees(const HpMesh& mesh, const DegreeRule& rule) {
  if (rule.p < 1) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 1");
  HpMesh out = mesh;
  if (rule.kind == DegreeRule::Kind::Uniform || mesh.singular_vertices.empty()) {
    for (auto& e : out.elements) e.degree = rule.p;
    return out;
  }
  const int ne = static_cast<int>(mesh.elements.size());
  std::vector<std::vector<int>> by_vertex(mesh.vertices.size());
  for (int k = 0; k < ne; ++k)
    for (int i = 0; i < mesh.elements[k].num_vertices(); ++i) by_vertex[mesh.elements[k].v[i]].push_back(k);
  std::vector<int> dist(ne, -1);
  std::deque<int> queue;
  for (int k = 0; k < ne; ++k)
    for (int i = 0; i < mesh.elements[k].num_vertices(); ++i)
      if (mesh.singular_vertices.count(mesh.elements[k].v[i]) && dist[k] < 0) {
        dist[k] = 0;
        queue.push_back(k);
      }
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    for (int i = 0; i < mesh.elements[k].num_vertices(); ++i)
      for (int nb : by_vertex[mesh.elements[k].v[i]])
        if (dist[nb] < 0) {
          dist[nb] = dist[k] + 1;
          queue.push_back(nb);
        }
  }
  for (int k = 0; k < ne; ++k)
    out.elements[k].degree = dist[k] < 0 ? rule.p : std::min(rule.p, 1 + dist[k]);
  return out;
}

namespace {

// Closest parameter on an element edge to p, by sampling then Newton.
double edge_distance(const HpMesh& mesh, const Element& e, int i, const Point2& p, double& s_out) {
  const int n = e.num_vertices();
  const Point2 a = reference_vertex(e.kind, i), b = reference_vertex(e.kind, (i + 1) % n);
  double best = 1e300, bs = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const double s = double(k) / 16;
    const double d = (element_point(mesh, e, a + s * (b - a)) - p).norm();
    if (d < best) {
      best = d;
      bs = s;
    }
  }
  double s = bs;
  for (int it = 0; it < 8; ++it) {
    Point2 x;
    Eigen::Matrix2d DF;
    element_map(mesh, e, a + s * (b - a), x, DF);
    const Point2 t = DF * (b - a);
    const double tt = t.squaredNorm();
    if (tt == 0.0) break;
    s = std::clamp(s - (x - p).dot(t) / tt, 0.0, 1.0);
  }
  s_out = s;
  return (element_point(mesh, e, a + s * (b - a)) - p).norm();
}

}  // namespace

std::vector<std::string> validate(const HpMesh& mesh) {
  std::vector<std::string> out;
  auto report = [&](const std::string& s) { out.push_back(s); };
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
  const int ne = static_cast<int>(mesh.elements.size());
  for (int k = 0; k < ne; ++k) {
    const Element& e = mesh.elements[k];
    const int n = e.num_vertices();
    for (int i = 0; i < n; ++i) {
      if (e.v[i] < 0 || e.v[i] >= static_cast<int>(mesh.vertices.size())) {
        report("element " + std::to_string(k) + " has an invalid vertex index");
        continue;
      }
      for (int j = i + 1; j < n; ++j)
        if (e.v[i] == e.v[j]) report("element " + std::to_string(k) + " repeats a vertex");
      const int a = e.v[i], b = e.v[(i + 1) % n];
      edges[{std::min(a, b), std::max(a, b)}].push_back({k, i});
    }
  }
  std::map<BoundaryTag, std::vector<std::pair<int, int>>> tagged;
  for (const auto& [key, uses] : edges) {
    const std::string name = "edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ")";
    if (uses.size() > 2) {
      report(name + " is shared by more than two elements");
      continue;
    }
    if (uses.size() == 1) {
      const Element& e = mesh.elements[uses[0].first];
      const BoundaryTag t = e.tag[uses[0].second];
      if (!t.is_boundary()) report("conformity: " + name + " has one element but no boundary tag");
      else tagged[t].push_back(key);
      continue;
    }
    const Element& e0 = mesh.elements[uses[0].first];
    const Element& e1 = mesh.elements[uses[1].first];
    if (e0.tag[uses[0].second].is_boundary() || e1.tag[uses[1].second].is_boundary())
      report(name + " is interior but tagged");
    if (e0.v[uses[0].second] == e1.v[uses[1].second])
      report("conformity: " + name + " is traversed in the same direction by both elements");
  }
  // duplicated vertex positions
  {
    std::vector<std::pair<Point2, int>> pts;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) pts.push_back({mesh.vertices[i], static_cast<int>(i)});
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.first.x() != b.first.x() ? a.first.x() < b.first.x() : a.first.y() < b.first.y();
    });
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      if ((pts[i].first - pts[i + 1].first).norm() <= 1e-13 * (1.0 + pts[i].first.norm()))
        report("conformity: vertices " + std::to_string(pts[i].second) + " and " + std::to_string(pts[i + 1].second) +
               " coincide");
  }
  // hanging nodes: a vertex lying inside another element's edge
  {
    std::vector<char> used(mesh.vertices.size(), 0);
    for (const auto& e : mesh.elements)
      for (int i = 0; i < e.num_vertices(); ++i)
        if (e.v[i] >= 0 && e.v[i] < static_cast<int>(used.size())) used[e.v[i]] = 1;
    for (const auto& [key, uses] : edges) {
      const Element& e = mesh.elements[uses[0].first];
      const int i = uses[0].second;
      const int n = e.num_vertices();
      const Point2 pa = element_point(mesh, e, reference_vertex(e.kind, i));
      const Point2 pb = element_point(mesh, e, reference_vertex(e.kind, (i + 1) % n));
      const double len = (pb - pa).norm();
      Eigen::AlignedBox2d box(pa.cwiseMin(pb), pa.cwiseMax(pb));
      for (int k = 0; k <= 8; ++k)
        box.extend(element_point(
            mesh, e, reference_vertex(e.kind, i) + (k / 8.0) * (reference_vertex(e.kind, (i + 1) % n) - reference_vertex(e.kind, i))));
      const double tol = 1e-9 * std::max(len, 1e-300);
      box.min() -= Point2::Constant(tol);
      box.max() += Point2::Constant(tol);
      for (std::size_t vtx = 0; vtx < mesh.vertices.size(); ++vtx) {
        if (!used[vtx] || static_cast<int>(vtx) == key.first || static_cast<int>(vtx) == key.second) continue;
        if (!box.contains(mesh.vertices[vtx])) continue;
        double s = 0.0;
        const double d = edge_distance(mesh, e, i, mesh.vertices[vtx], s);
        if (d <= tol && s > 1e-9 && s < 1 - 1e-9)
          report("conformity: hanging vertex " + std::to_string(vtx) + " on edge (" + std::to_string(key.first) +
                 ", " + std::to_string(key.second) + ")");
      }
    }
  }
  // orientation at quadrature points
  for (int k = 0; k < ne; ++k) {
    const Element& e = mesh.elements[k];
    const QuadratureRule& rule = element_rule(e.kind, std::max(1, e.degree) + kQuadratureExtension);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Point2 x;
      Eigen::Matrix2d DF;
      element_map(mesh, e, rule.points[q], x, DF);
      if (!(DF.determinant() > 0.0)) {
        report("orientation: element " + std::to_string(k) + " has non-positive jacobian");
        break;
      }
    }
  }
  // tag coverage and contiguity
  for (int j = 1; j <= 4; ++j) {
    auto it = tagged.find(BoundaryTag::side(j));
    if (it == tagged.end()) {
      report("tags: gamma" + std::to_string(j) + " is missing");
      continue;
    }
    std::map<int, int> degree;
    for (const auto& [a, b] : it->second) {
      ++degree[a];
      ++degree[b];
    }
    int ends = 0;
    for (const auto& [vtx, d] : degree) {
      if (d == 1) ++ends;
      if (d > 2) report("tags: gamma" + std::to_string(j) + " branches");
    }
    // union-find connectivity
    std::map<int, int> parent;
    for (const auto& [vtx, d] : degree) parent[vtx] = vtx;
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (const auto& [a, b] : it->second) parent[find(a)] = find(b);
    std::set<int> comps;
    for (const auto& [vtx, d] : degree) comps.insert(find(vtx));
    if (comps.size() != 1 || (ends != 2 && ends != 0))
      report("tags: gamma" + std::to_string(j) + " is not a contiguous run");
  }
  for (int h = 1; h <= mesh.num_holes; ++h)
    if (!tagged.count(BoundaryTag::hole(h))) report("tags: hole" + std::to_string(h) + " is missing");
  return out;
}

std::string export_mesh(const HpMesh& mesh) {
  std::ostringstream os;
  char buf[96];
  os << "nodes " << mesh.vertices.size() << " / elements " << mesh.elements.size() << "\n";
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
    os << buf;
  }
  for (const auto& e : mesh.elements) {
    const int n = e.num_vertices();
    os << (e.kind == ElementKind::Quad ? "quad" : "tri");
    for (int i = 0; i < n; ++i) os << ' ' << e.v[i];
    for (int i = 0; i < n; ++i) os << ' ' << (e.tag[i].is_boundary() ? e.tag[i].str() : "-");
    os << " p" << e.degree << "\n";
  }
  return os.str();
}

}  // namespace cfm
