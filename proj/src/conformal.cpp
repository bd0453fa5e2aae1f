// SPDX-License-Identifier: Apache-2.0
#include "cfm/conformal.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cfm/error.hpp"

namespace cfm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int max_degree(const HpMesh& mesh) {
  int p = 0;
  for (const auto& e : mesh.elements) p = std::max(p, e.degree);
  return p;
}

}  // namespace

std::array<Point2, 4> Quadrilateral::corners() const {
  std::array<Point2, 4> c;
  for (int k = 0; k < 4; ++k) c[k] = domain.corners[(k + rotation) % 4];
  return c;
}

BoundaryTag Quadrilateral::side(int j) const { return BoundaryTag::side((j - 1 + rotation) % 4 + 1); }

Quadrilateral conjugate(const Quadrilateral& q) { return Quadrilateral(q.domain, q.surface, q.rotation + 1); }

BcMap modulus_bcs(const Quadrilateral& q, const HpMesh& mesh) {
  BcMap bc;
  for (const auto& e : mesh.elements)
    for (int i = 0; i < e.num_vertices(); ++i)
      if (e.tag[i].is_boundary()) bc[e.tag[i]] = BoundaryCondition::neumann();
  bc[q.side(2)] = BoundaryCondition::dirichlet(0.0);
  bc[q.side(4)] = BoundaryCondition::dirichlet(1.0);
  return bc;
}

ModulusResult modulus(const Quadrilateral& q, const HpMesh& mesh) {
  auto space = std::make_shared<const HpSpace>(mesh, modulus_bcs(q, mesh));
  const SparseMatrix K = assemble_full(*space, q.surface);
  ModulusResult r;
  r.field = DirichletProblem(space, K).solve();
  r.M = bilinear_energy(K, r.field.coeffs);
  return r;
}

ModulusResult modulus(const Quadrilateral& q, const MeshRecipe& recipe, int p) {
  return modulus(q, build_mesh(q.domain, recipe, p));
}

PairResult modulus_pair(const Quadrilateral& q, const HpMesh& mesh, bool estimates) {
  const Quadrilateral qc = conjugate(q);
  PairResult out;
  auto t0 = std::chrono::steady_clock::now();
  auto space = std::make_shared<const HpSpace>(mesh, modulus_bcs(q, mesh));
  auto space_c = std::make_shared<const HpSpace>(space->with_bcs(modulus_bcs(qc, mesh)));
  const SparseMatrix K = assemble_full(*space, q.surface);
  out.report.assembly_seconds = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  out.u = DirichletProblem(space, K).solve();
  out.u_conj = DirichletProblem(space_c, K).solve();
  out.report.M_Q = bilinear_energy(K, out.u.coeffs);
  out.report.M_conj = bilinear_energy(K, out.u_conj.coeffs);
  out.report.reci = std::abs(out.report.M_Q * out.report.M_conj - 1.0);
  out.report.solve_seconds = seconds_since(t0);
  out.report.dofs = space->num_dofs();
  out.report.p = max_degree(mesh);
  if (estimates) {
    t0 = std::chrono::steady_clock::now();
    auto enr = std::make_shared<const HpSpace>(space->enriched());
    auto enr_c = std::make_shared<const HpSpace>(enr->with_bcs(space_c->bcs()));
    const SparseMatrix KE = assemble_full(*enr, q.surface);
    out.report.est_err_Q = error_energy_of_modulus(estimate(enr, KE, out.u));
    out.report.est_err_conj = error_energy_of_modulus(estimate(enr_c, KE, out.u_conj));
    out.report.estimate_seconds = seconds_since(t0);
  }
  return out;
}

PairResult modulus_pair(const Quadrilateral& q, const MeshRecipe& recipe, int p, bool estimates) {
  return modulus_pair(q, build_mesh(q.domain, recipe, p), estimates);
}

std::vector<ModulusReport> convergence_study(const Quadrilateral& q, const HpMesh& mesh, const std::vector<int>& ps) {
  if (ps.empty()) return {};
  int pmax = 0;
  for (int p : ps) {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 1");
    pmax = std::max(pmax, p);
  }
  const HpMesh top_mesh = assign_degrees(mesh, DegreeRule::uniform(pmax + 1));
  const Quadrilateral qc = conjugate(q);
  auto t0 = std::chrono::steady_clock::now();
  const HpSpace top(top_mesh, modulus_bcs(q, top_mesh));
  const HpSpace top_c = top.with_bcs(modulus_bcs(qc, top_mesh));
  const SparseMatrix K = assemble_full(top, q.surface);
  const double assembly = seconds_since(t0);
  const int n = top.num_dofs();
  std::vector<ModulusReport> out;
  for (int p : ps) {
    t0 = std::chrono::steady_clock::now();
    ModulusReport rep;
    rep.p = p;
    rep.assembly_seconds = assembly;
    std::vector<int> base;
    for (int d = 0; d < n; ++d)
      if (top.level(d) <= p) base.push_back(d);
    rep.dofs = static_cast<int>(base.size());
    double M[2], est[2];
    const HpSpace* spaces[2] = {&top, &top_c};
    for (int s = 0; s < 2; ++s) {
      const HpSpace& sp = *spaces[s];
      std::vector<int> fr, W;
      std::vector<int> findex(n, -1);
      for (int d : base)
        if (!sp.is_dirichlet(d)) {
          findex[d] = static_cast<int>(fr.size());
          fr.push_back(d);
        }
      for (int d = 0; d < n; ++d)
        if (top.level(d) == p + 1 && !sp.is_dirichlet(d)) W.push_back(d);
      Eigen::VectorXd u = sp.lift();
      std::vector<Eigen::Triplet<double>> trip;
      Eigen::VectorXd f = Eigen::VectorXd::Zero(fr.size());
      for (int col = 0; col < K.outerSize(); ++col) {
        if (top.level(col) > p) continue;
        const int c = findex[col];
        for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
          const int r = findex[it.row()];
          if (r < 0) continue;
          if (c >= 0) trip.emplace_back(r, c, it.value());
          else if (sp.is_dirichlet(col)) f[r] -= it.value() * u[col];
        }
      }
      SparseMatrix Kff(fr.size(), fr.size());
      Kff.setFromTriplets(trip.begin(), trip.end());
      const Eigen::VectorXd x = solve(Kff, f);
      for (std::size_t i = 0; i < fr.size(); ++i) u[fr[i]] = x[i];
      M[s] = bilinear_energy(K, u);
      est[s] = auxiliary_energy(K, u, W, {});
    }
    rep.M_Q = M[0];
    rep.M_conj = M[1];
    rep.reci = std::abs(M[0] * M[1] - 1.0);
    rep.est_err_Q = est[0];
    rep.est_err_conj = est[1];
    rep.solve_seconds = seconds_since(t0);
    out.push_back(rep);
  }
  return out;
}

Eigen::Vector2d ConformalMap::operator()(const Point2& p) const {
  const double a = evaluate(u, p).value;
  const double b = evaluate(u_conj, p).value;
  return {flip_u ? 1.0 - a : a, h * (flip_conj ? 1.0 - b : b)};
}

ConformalMap build_map(const Quadrilateral& q, const SolutionField& u, const SolutionField& u_conj, double h,
                       double tolerance) {
  ConformalMap m;
  m.u = u;
  m.u_conj = u_conj;
  m.h = h;
  m.corners = q.corners();
  const Eigen::Vector2d target[4] = {{0, 0}, {1, 0}, {1, h}, {0, h}};
  double a[4], b[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = evaluate(u, m.corners[k]).value;
    b[k] = evaluate(u_conj, m.corners[k]).value;
  }
  double best = 1e300;
  for (int fu = 0; fu < 2; ++fu)
    for (int fc = 0; fc < 2; ++fc) {
      double dev = 0.0;
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d img(fu ? 1.0 - a[k] : a[k], h * (fc ? 1.0 - b[k] : b[k]));
        dev = std::max(dev, (img - target[k]).norm());
      }
      if (dev < best) {
        best = dev;
        m.flip_u = fu;
        m.flip_conj = fc;
      }
    }
  m.corner_deviation = best;
  if (!(best <= tolerance)) {
    std::ostringstream os;
    os.precision(3);
    os << "corner images deviate by " << best << " (allowed " << tolerance << ")";
    throw Error(ErrorCode::OrientationCheckFailed, os.str());
  }
  return m;
}

namespace {

struct Segment2 {
  Point2 a, b;
};

using HashKey = std::pair<long long, long long>;
HashKey hash_point(const Point2& p) {
  return {std::llround(p.x() / 1e-9), std::llround(p.y() / 1e-9)};
}

std::vector<std::vector<Point2>> stitch(const std::vector<Segment2>& segs) {
  std::map<HashKey, std::vector<int>> ends;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    ends[hash_point(segs[i].a)].push_back(static_cast<int>(i));
    ends[hash_point(segs[i].b)].push_back(static_cast<int>(i));
  }
  std::vector<char> used(segs.size(), 0);
  std::vector<std::vector<Point2>> lines;
  auto walk = [&](int start, bool from_a) {
    std::vector<Point2> line;
    int cur = start;
    Point2 head = from_a ? segs[cur].a : segs[cur].b;
    line.push_back(head);
    while (cur >= 0) {
      used[cur] = 1;
      const Point2 next = (hash_point(segs[cur].a) == hash_point(head)) ? segs[cur].b : segs[cur].a;
      line.push_back(next);
      head = next;
      cur = -1;
      for (int s : ends[hash_point(head)])
        if (!used[s]) {
          cur = s;
          break;
        }
    }
    lines.push_back(std::move(line));
  };
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (used[i]) continue;
    if (ends[hash_point(segs[i].a)].size() == 1) walk(static_cast<int>(i), true);
    else if (ends[hash_point(segs[i].b)].size() == 1) walk(static_cast<int>(i), false);
  }
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (!used[i]) walk(static_cast<int>(i), true);
  return lines;
}

}  // namespace

std::vector<Isoline> extract_isolines(const ConformalMap& map, const Surface& surface, int n_u, int n_v) {
  if (n_u < 1 || n_v < 1) throw Error(ErrorCode::InvalidArgument, "isoline counts must be >= 1");
  std::vector<Isoline> out;
  const HpMesh& mesh = map.u.space->mesh();
  const int s = max_degree(mesh) + 2;
  for (int which = 0; which < 2; ++which) {
    const SolutionField& field = which == 0 ? map.u : map.u_conj;
    const int count = which == 0 ? n_u : n_v;
    // node values per element, shared by all levels
    std::vector<std::vector<Point2>> nodes(mesh.elements.size());
    std::vector<std::vector<double>> vals(mesh.elements.size());
    std::vector<std::vector<std::array<int, 3>>> tris(mesh.elements.size());
    for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
      const Element& e = mesh.elements[k];
      std::map<std::pair<int, int>, int> id;
      auto node = [&](int i, int j) {
        auto it = id.find({i, j});
        if (it != id.end()) return it->second;
        const Point2 r = e.kind == ElementKind::Quad ? Point2(-1 + 2.0 * i / s, -1 + 2.0 * j / s) : Point2(double(i) / s, double(j) / s);
        nodes[k].push_back(r);
        vals[k].push_back(evaluate_local(field, static_cast<int>(k), r).value);
        return id[{i, j}] = static_cast<int>(nodes[k].size()) - 1;
      };
      if (e.kind == ElementKind::Quad) {
        for (int i = 0; i < s; ++i)
          for (int j = 0; j < s; ++j) {
            tris[k].push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1)});
            tris[k].push_back({node(i, j), node(i + 1, j + 1), node(i, j + 1)});
          }
      } else {
        for (int i = 0; i < s; ++i)
          for (int j = 0; i + j < s; ++j) {
            tris[k].push_back({node(i, j), node(i + 1, j), node(i, j + 1)});
            if (i + j <= s - 2) tris[k].push_back({node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
          }
      }
    }
    for (int l = 1; l <= count; ++l) {
      const double level = double(l) / (count + 1);
      std::vector<Segment2> segs;
      for (std::size_t k = 0; k < mesh.elements.size(); ++k)
        for (const auto& t : tris[k]) {
          Point2 pts[3];
          int np = 0;
          for (int a = 0; a < 3; ++a) {
            const int i = t[a], j = t[(a + 1) % 3];
            // Values within roundoff of the level sit on it, which keeps
            // lines running along sample edges in one piece.
            auto off = [&](int n) {
              const double f = vals[k][n] - level;
              return std::abs(f) < 1e-12 ? 0.0 : f;
            };
            const double fi = off(i), fj = off(j);
            if ((fi < 0) == (fj < 0)) continue;
            const double w = fi / (fi - fj);
            if (np < 3) pts[np++] = nodes[k][i] + w * (nodes[k][j] - nodes[k][i]);
          }
          if (np == 2 && (pts[0] - pts[1]).norm() > 1e-14)
            segs.push_back({element_point(mesh, mesh.elements[k], pts[0]), element_point(mesh, mesh.elements[k], pts[1])});
        }
      for (auto& line : stitch(segs)) {
        Isoline iso;
        iso.kind = which == 0 ? 'u' : 'v';
        iso.level = level;
        iso.param = std::move(line);
        for (const auto& p : iso.param) iso.xyz.push_back(surface.eval(p));
        out.push_back(std::move(iso));
      }
    }
  }
  return out;
}

std::string isolines_csv(const std::vector<Isoline>& lines) {
  std::ostringstream os;
  os << "iso_kind,level,seq_id,param_u,param_v,x,y,z\n";
  char buf[256];
  for (std::size_t s = 0; s < lines.size(); ++s)
    for (std::size_t i = 0; i < lines[s].param.size(); ++i) {
      const auto& p = lines[s].param[i];
      const auto& x = lines[s].xyz[i];
      std::snprintf(buf, sizeof buf, "%c,%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", lines[s].kind, lines[s].level, s,
                    p.x(), p.y(), x.x(), x.y(), x.z());
      os << buf;
    }
  return os.str();
}

std::string report_text(const ModulusReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "M_Q = %.17g\nM_conj = %.17g\nreci = %.17g\nest_err_Q = %.17g\nest_err_conj = %.17g\ndofs = %d\np = %d\n",
                r.M_Q, r.M_conj, r.reci, r.est_err_Q, r.est_err_conj, r.dofs, r.p);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::Io, "cannot rename onto " + path);
  }
}

}  // namespace cfm
