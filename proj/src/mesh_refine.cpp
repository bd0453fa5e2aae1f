// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "cfm/error.hpp"
#include "cfm/mesh.hpp"

namespace cfm {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key_of(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Split position of a global edge, measured from its lower vertex id.
struct Split {
  double t_lo = 0.5;
  int vertex = -1;
};

struct Corner {
  int id = -1;
  Point2 ref = Point2::Zero();  // root reference coordinates
};

struct EdgePiece {
  BoundaryTag tag;
  int label = -1;
  std::optional<Corner> mid;  // split point, if the edge is split
  double frac = 0.5;          // local fraction from the edge start
};

class Refiner {
 public:
  Refiner(const HpMesh& mesh, std::map<EdgeKey, Split> plan) : in_(mesh), plan_(std::move(plan)) {
    out_.vertices = mesh.vertices;
    out_.roots = mesh.roots;
    out_.labels = mesh.labels;
    out_.singular_vertices = mesh.singular_vertices;
    out_.num_holes = mesh.num_holes;
    int next = static_cast<int>(mesh.vertices.size());
    for (auto& [key, s] : plan_) s.vertex = next++;
    out_.vertices.resize(next, Point2::Constant(std::nan("")));
  }

  HpMesh run() {
    for (const Element& e : in_.elements) {
      root_ = e.root;
      degree_ = e.degree;
      const int n = e.num_vertices();
      std::array<Corner, 4> P;
      std::array<EdgePiece, 4> E;
      for (int i = 0; i < n; ++i) P[i] = {e.v[i], e.ref[i]};
      for (int i = 0; i < n; ++i) {
        E[i].tag = e.tag[i];
        E[i].label = e.label[i];
        const int a = e.v[i], b = e.v[(i + 1) % n];
        auto it = plan_.find(key_of(a, b));
        if (it == plan_.end()) continue;
        const double f = a < b ? it->second.t_lo : 1.0 - it->second.t_lo;
        const Point2 r = e.ref[i] + f * (e.ref[(i + 1) % n] - e.ref[i]);
        E[i].mid = Corner{it->second.vertex, r};
        E[i].frac = f;
        place(it->second.vertex, r);
      }
      if (e.kind == ElementKind::Quad) quad(P, E);
      else tri(P, E);
    }
    for (const auto& p : out_.vertices)
      if (!std::isfinite(p.x())) throw Error(ErrorCode::MeshingFailed, "refinement left an unplaced vertex");
    return std::move(out_);
  }

 private:
  void place(int id, const Point2& ref) {
    if (std::isfinite(out_.vertices[id].x())) return;
    Point2 x;
    Eigen::Matrix2d DF;
    root_map(out_.roots[root_], ref, x, DF);
    out_.vertices[id] = x;
  }

  int new_vertex(const Point2& ref) {
    const int id = static_cast<int>(out_.vertices.size());
    out_.vertices.push_back(Point2::Constant(std::nan("")));
    place(id, ref);
    return id;
  }

  static Point2 bilinear(const std::array<Corner, 4>& P, double xi, double eta) {
    return 0.25 * ((1 - xi) * (1 - eta) * P[0].ref + (1 + xi) * (1 - eta) * P[1].ref +
                   (1 + xi) * (1 + eta) * P[2].ref + (1 - xi) * (1 + eta) * P[3].ref);
  }

  void emit(ElementKind kind, std::initializer_list<Corner> corners, std::initializer_list<EdgePiece> edges) {
    Element e;
    e.kind = kind;
    e.root = root_;
    e.degree = degree_;
    int i = 0;
    for (const Corner& c : corners) {
      e.v[i] = c.id;
      e.ref[i] = c.ref;
      ++i;
    }
    i = 0;
    for (const EdgePiece& p : edges) {
      e.tag[i] = p.tag;
      e.label[i] = p.label;
      ++i;
    }
    out_.elements.push_back(e);
  }

  static EdgePiece inner() { return EdgePiece{}; }
  static EdgePiece part(const EdgePiece& p) {
    EdgePiece q;
    q.tag = p.tag;
    q.label = p.label;
    return q;
  }

  template <int N>
  static void rotate(std::array<Corner, 4>& P, std::array<EdgePiece, 4>& E, int r) {
    std::array<Corner, 4> P2 = P;
    std::array<EdgePiece, 4> E2 = E;
    for (int i = 0; i < N; ++i) {
      P2[i] = P[(i + r) % N];
      E2[i] = E[(i + r) % N];
    }
    P = P2;
    E = E2;
  }

  void quad(std::array<Corner, 4> P, std::array<EdgePiece, 4> E) {
    int mask = 0, count = 0;
    for (int i = 0; i < 4; ++i)
      if (E[i].mid) {
        mask |= 1 << i;
        ++count;
      }
    if (count == 0) {
      emit(ElementKind::Quad, {P[0], P[1], P[2], P[3]}, {E[0], E[1], E[2], E[3]});
      return;
    }
    if (count == 4) {
      const double xi = 0.5 * ((-1 + 2 * E[0].frac) + (1 - 2 * E[2].frac));
      const double eta = 0.5 * ((-1 + 2 * E[1].frac) + (1 - 2 * E[3].frac));
      const Point2 r = bilinear(P, xi, eta);
      const Corner q{new_vertex(r), r};
      const Corner m0 = *E[0].mid, m1 = *E[1].mid, m2 = *E[2].mid, m3 = *E[3].mid;
      emit(ElementKind::Quad, {P[0], m0, q, m3}, {part(E[0]), inner(), inner(), part(E[3])});
      emit(ElementKind::Quad, {m0, P[1], m1, q}, {part(E[0]), part(E[1]), inner(), inner()});
      emit(ElementKind::Quad, {q, m1, P[2], m2}, {inner(), part(E[1]), part(E[2]), inner()});
      emit(ElementKind::Quad, {m3, q, m2, P[3]}, {inner(), inner(), part(E[2]), part(E[3])});
      return;
    }
    if (count == 2 && (mask == 0b0101 || mask == 0b1010)) {
      if (mask == 0b1010) rotate<4>(P, E, 1);
      const Corner m0 = *E[0].mid, m2 = *E[2].mid;
      emit(ElementKind::Quad, {P[0], m0, m2, P[3]}, {part(E[0]), inner(), part(E[2]), E[3]});
      emit(ElementKind::Quad, {m0, P[1], P[2], m2}, {part(E[0]), E[1], part(E[2]), inner()});
      return;
    }
    if (count == 2) {
      // adjacent pair: rotate so edges 3 and 0 are split (shared vertex 0)
      int r = 0;
      while (!((mask >> r & 1) && (mask >> ((r + 3) % 4) & 1))) ++r;
      rotate<4>(P, E, r);
      const double xi = -1 + 2 * E[0].frac;
      const double eta = -1 + 2 * (1 - E[3].frac);
      const Point2 rq = bilinear(P, xi, eta);
      const Corner q{new_vertex(rq), rq};
      const Corner m0 = *E[0].mid, m3 = *E[3].mid;
      emit(ElementKind::Quad, {P[0], m0, q, m3}, {part(E[0]), inner(), inner(), part(E[3])});
      emit(ElementKind::Quad, {m0, P[1], P[2], q}, {part(E[0]), E[1], inner(), inner()});
      emit(ElementKind::Quad, {m3, q, P[2], P[3]}, {inner(), inner(), E[2], part(E[3])});
      return;
    }
    if (count == 1) {
      int r = 0;
      while (!(mask >> r & 1)) ++r;
      rotate<4>(P, E, r);
      const Corner m0 = *E[0].mid;
      emit(ElementKind::Triangle, {m0, P[1], P[2]}, {part(E[0]), E[1], inner()});
      emit(ElementKind::Triangle, {m0, P[2], P[3]}, {inner(), E[2], inner()});
      emit(ElementKind::Triangle, {m0, P[3], P[0]}, {inner(), E[3], part(E[0])});
      return;
    }
    // three split edges: rotate so edge 3 is whole, cut along edges 0 and 2
    int r = 0;
    while (mask >> ((r + 3) % 4) & 1) ++r;
    rotate<4>(P, E, r);
    const Corner m0 = *E[0].mid, m2 = *E[2].mid;
    emit(ElementKind::Quad, {P[0], m0, m2, P[3]}, {part(E[0]), inner(), part(E[2]), E[3]});
    std::array<Corner, 4> Q = {m0, P[1], P[2], m2};
    std::array<EdgePiece, 4> F = {part(E[0]), E[1], part(E[2]), inner()};
    quad(Q, F);
  }

  void tri(std::array<Corner, 4> P, std::array<EdgePiece, 4> E) {
    int mask = 0, count = 0;
    for (int i = 0; i < 3; ++i)
      if (E[i].mid) {
        mask |= 1 << i;
        ++count;
      }
    if (count == 0) {
      emit(ElementKind::Triangle, {P[0], P[1], P[2]}, {E[0], E[1], E[2]});
      return;
    }
    if (count == 1) {
      int r = 0;
      while (!(mask >> r & 1)) ++r;
      rotate<3>(P, E, r);
      const Corner m0 = *E[0].mid;
      emit(ElementKind::Triangle, {P[0], m0, P[2]}, {part(E[0]), inner(), E[2]});
      emit(ElementKind::Triangle, {m0, P[1], P[2]}, {part(E[0]), E[1], inner()});
      return;
    }
    if (count == 2) {
      int r = 0;
      while (mask >> ((r + 1) % 3) & 1) ++r;  // make edge 1 the whole one
      rotate<3>(P, E, r);
      const Corner m0 = *E[0].mid, m2 = *E[2].mid;
      emit(ElementKind::Triangle, {P[0], m0, m2}, {part(E[0]), inner(), part(E[2])});
      emit(ElementKind::Quad, {m0, P[1], P[2], m2}, {part(E[0]), E[1], part(E[2]), inner()});
      return;
    }
    const Corner m0 = *E[0].mid, m1 = *E[1].mid, m2 = *E[2].mid;
    emit(ElementKind::Triangle, {P[0], m0, m2}, {part(E[0]), inner(), part(E[2])});
    emit(ElementKind::Triangle, {m0, P[1], m1}, {part(E[0]), part(E[1]), inner()});
    emit(ElementKind::Triangle, {m2, m1, P[2]}, {inner(), part(E[1]), part(E[2])});
    emit(ElementKind::Triangle, {m0, m1, m2}, {inner(), inner(), inner()});
  }

  const HpMesh& in_;
  std::map<EdgeKey, Split> plan_;
  HpMesh out_;
  int root_ = -1;
  int degree_ = 1;
};

void check_refinement_args(int levels, double grading) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "refinement levels must be >= 1");
  if (!(grading > 0.0 && grading < 1.0)) throw Error(ErrorCode::InvalidArgument, "grading must lie in (0, 1)");
}

void mark(std::map<EdgeKey, Split>& plan, int from, int to, double frac_from) {
  const EdgeKey k = key_of(from, to);
  const double t_lo = from < to ? frac_from : 1.0 - frac_from;
  auto it = plan.find(k);
  if (it != plan.end()) {
    if (std::abs(it->second.t_lo - t_lo) > 1e-12)
      throw Error(ErrorCode::MeshingFailed, "conflicting split requests on one edge");
    return;
  }
  plan[k] = Split{t_lo, -1};
}

int find_vertex(const HpMesh& mesh, const Point2& p) {
  double scale = 0.0;
  for (const auto& x : mesh.vertices) scale = std::max(scale, x.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * (1.0 + scale);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    if ((mesh.vertices[i] - p).norm() <= tol) return static_cast<int>(i);
  for (const auto& e : mesh.elements)
    for (int i = 0; i < e.num_vertices(); ++i)
      if ((element_point(mesh, e, reference_vertex(e.kind, i)) - p).norm() <= tol) return e.v[i];
  return -1;
}

}  // namespace

HpMesh refine_corner(const HpMesh& mesh, const Point2& corner, int levels, double grading) {
  check_refinement_args(levels, grading);
  const int c = find_vertex(mesh, corner);
  if (c < 0) throw Error(ErrorCode::InvalidArgument, "refinement corner is not a mesh vertex");
  HpMesh cur = mesh;
  for (int level = 0; level < levels; ++level) {
    std::map<EdgeKey, Split> plan;
    for (const auto& e : cur.elements) {
      const int n = e.num_vertices();
      for (int i = 0; i < n; ++i) {
        const int a = e.v[i], b = e.v[(i + 1) % n];
        if (a == c) mark(plan, a, b, grading);
        if (b == c) mark(plan, b, a, grading);
      }
    }
    cur = Refiner(cur, std::move(plan)).run();
  }
  cur.singular_vertices.insert(c);
  return cur;
}

HpMesh refine_edge(const HpMesh& mesh, const std::string& selector, int levels, double grading) {
  check_refinement_args(levels, grading);
  std::optional<BoundaryTag> tag;
  try {
    tag = BoundaryTag::parse(selector);
  } catch (const Error&) {
  }
  const int label = mesh.label_id(selector);
  auto selected = [&](const Element& e, int i) {
    if (!e.tag[i].is_boundary()) return false;
    if (tag && e.tag[i] == *tag) return true;
    return label >= 0 && e.label[i] == label;
  };
  bool any = false;
  for (const auto& e : mesh.elements)
    for (int i = 0; i < e.num_vertices(); ++i) any = any || selected(e, i);
  if (!any) throw Error(ErrorCode::UnknownTag, "no boundary edge matches '" + selector + "'");

  HpMesh cur = mesh;
  std::set<int> run;
  for (int level = 0; level < levels; ++level) {
    std::map<EdgeKey, Split> plan;
    for (const auto& e : cur.elements) {
      const int n = e.num_vertices();
      std::vector<int> sel;
      for (int i = 0; i < n; ++i)
        if (selected(e, i)) sel.push_back(i);
      if (sel.empty()) continue;
      for (int i : sel) {
        run.insert(e.v[i]);
        run.insert(e.v[(i + 1) % n]);
      }
      auto V = [&](int i) { return e.v[((i % n) + n) % n]; };
      if (sel.size() == 1) {
        const int i = sel[0];
        // sides adjacent to the selected edge, split near the boundary
        mark(plan, V(i + 1), V(i + 2), grading);
        mark(plan, V(i), V(i - 1), grading);
        continue;
      }
      if (e.kind == ElementKind::Quad && sel.size() == 2 && (sel[1] - sel[0] == 1 || sel[1] - sel[0] == 3)) {
        const int i = (sel[1] - sel[0] == 1) ? sel[0] : sel[1];  // edges i and i+1 meet at V(i+1)
        const int c = V(i + 1);
        mark(plan, c, V(i), grading);
        mark(plan, c, V(i + 2), grading);
        mark(plan, V(i + 2), V(i + 3), grading);
        mark(plan, V(i), V(i + 3), grading);
        continue;
      }
      throw Error(ErrorCode::MeshingFailed, "element touches the refined boundary run on opposite sides");
    }
    cur = Refiner(cur, std::move(plan)).run();
  }
  // vertices added along the run at later levels
  for (const auto& e : cur.elements)
    for (int i = 0; i < e.num_vertices(); ++i)
      if (selected(e, i)) {
        run.insert(e.v[i]);
        run.insert(e.v[(i + 1) % e.num_vertices()]);
      }
  cur.singular_vertices.insert(run.begin(), run.end());
  return cur;
}

HpMesh refine_uniform(const HpMesh& mesh) {
  std::map<EdgeKey, Split> plan;
  for (const auto& e : mesh.elements) {
    const int n = e.num_vertices();
    for (int i = 0; i < n; ++i) plan[key_of(e.v[i], e.v[(i + 1) % n])] = Split{0.5, -1};
  }
  return Refiner(mesh, std::move(plan)).run();
}

}  // namespace cfm

namespace cfm {

HpMesh build_mesh(const DomainSpec& domain, const MeshRecipe& recipe, int p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 1");
  HpMesh mesh = initial_mesh(domain, recipe.options);
  for (const RefineStep& s : recipe.steps) {
    const int levels = s.levels > 0 ? s.levels : p;
    if (s.kind == RefineStep::Kind::Corner) mesh = refine_corner(mesh, s.point, levels, s.grading);
    else mesh = refine_edge(mesh, s.selector, levels, s.grading);
  }
  return assign_degrees(mesh, recipe.graded_degrees ? DegreeRule::graded(p) : DegreeRule::uniform(p));
}

}  // namespace cfm
