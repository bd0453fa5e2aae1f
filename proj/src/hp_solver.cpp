// SPDX-License-Identifier: Apache-2.0
#include "cfm/hp_solver.hpp"

#include <exception>

#ifdef CFM_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif
#include <Eigen/SparseCholesky>

#include "cfm/error.hpp"

namespace cfm {

namespace {

// Pullback coefficient w |J| DF^{-1} A DF^{-T} at one quadrature point.
Eigen::Matrix2d pullback(const Surface& surface, const Point2& x, const Eigen::Matrix2d& DF, double w) {
  const double det = DF.determinant();
  if (!(det > 0.0)) throw Error(ErrorCode::MeshingFailed, "element map is not orientation preserving");
  const Eigen::Matrix2d Dinv = DF.inverse();
  const Eigen::Matrix2d A = coefficient_at(surface, x);
  return w * det * Dinv * A * Dinv.transpose();
}

Eigen::MatrixXd local_stiffness(const HpSpace& space, const Surface& surface, int k, int extension) {
  const HpMesh& mesh = space.mesh();
  const Element& e = mesh.elements[k];
  const LocalBasis& basis = space.element_basis(k);
  const int order = space.element_degree(k) + extension;
  const QuadratureRule& rule = element_rule(e.kind, order);
  const BasisTable& tab = tabulate(basis, order);
  const int n = basis.size();
  Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    Point2 x;
    Eigen::Matrix2d DF;
    element_map(mesh, e, rule.points[q], x, DF);
    const Eigen::Matrix2d C = pullback(surface, x, DF, rule.weights[q]);
    const Eigen::MatrixX2d& G = tab.grad[q];
    Ke.noalias() += G * C * G.transpose();
  }
  const auto& s = space.element_signs(k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Ke(i, j) *= s[i] * s[j];
  return Ke;
}

}  // namespace

SparseMatrix assemble_full(const HpSpace& space, const Surface& surface, int extension) {
  const int ne = static_cast<int>(space.mesh().elements.size());
  std::vector<Eigen::MatrixXd> local(ne);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < ne; ++k) {
    try {
      local[k] = local_stiffness(space, surface, k, extension);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < ne; ++k) {
    const auto& dofs = space.element_dofs(k);
    const int n = static_cast<int>(dofs.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trip.emplace_back(dofs[i], dofs[j], local[k](i, j));
  }
  SparseMatrix K(space.num_dofs(), space.num_dofs());
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

namespace {

void split(const HpSpace& space, const SparseMatrix& K, SparseMatrix& Kff, SparseMatrix& Kfd) {
  const int nf = space.num_free();
  const int nd = static_cast<int>(space.dirichlet_dofs().size());
  std::vector<int> dindex(space.num_dofs(), -1);
  for (int i = 0; i < nd; ++i) dindex[space.dirichlet_dofs()[i]] = i;
  std::vector<Eigen::Triplet<double>> tf, td;
  for (int col = 0; col < K.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      const int fr = space.free_index(static_cast<int>(it.row()));
      if (fr < 0) continue;
      const int fc = space.free_index(col);
      if (fc >= 0) tf.emplace_back(fr, fc, it.value());
      else td.emplace_back(fr, dindex[col], it.value());
    }
  Kff.resize(nf, nf);
  Kff.setFromTriplets(tf.begin(), tf.end());
  Kfd.resize(nf, nd);
  Kfd.setFromTriplets(td.begin(), td.end());
}

Eigen::VectorXd gather(const HpSpace& space, const Eigen::VectorXd& full) {
  const auto& d = space.dirichlet_dofs();
  Eigen::VectorXd out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = full[d[i]];
  return out;
}

}  // namespace

LinearSystem reduce(const HpSpace& space, const SparseMatrix& K_full, const Eigen::VectorXd& lift) {
  LinearSystem sys;
  SparseMatrix Kfd;
  split(space, K_full, sys.K, Kfd);
  sys.f = -(Kfd * gather(space, lift));
  return sys;
}

LinearSystem assemble(const HpSpace& space, const Surface& surface) {
  return reduce(space, assemble_full(space, surface), space.lift());
}

#ifdef CFM_HAVE_CHOLMOD
struct CholeskySolver::Impl {
  Eigen::CholmodDecomposition<SparseMatrix, Eigen::Lower> llt;
  Impl() { llt.setMode(Eigen::CholmodSimplicialLLt); }
};
#else
struct CholeskySolver::Impl {
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower> llt;
};
#endif

CholeskySolver::CholeskySolver(const SparseMatrix& K) : impl_(std::make_unique<Impl>()) {
  if (K.rows() != K.cols()) throw Error(ErrorCode::InvalidArgument, "matrix must be square");
  if (K.rows() == 0) return;
  impl_->llt.compute(K);
  if (impl_->llt.info() != Eigen::Success) throw Error(ErrorCode::NonSPD, "Cholesky factorization failed");
}
CholeskySolver::~CholeskySolver() = default;
CholeskySolver::CholeskySolver(CholeskySolver&&) noexcept = default;
CholeskySolver& CholeskySolver::operator=(CholeskySolver&&) noexcept = default;

Eigen::VectorXd CholeskySolver::solve(const Eigen::VectorXd& f) const {
  if (f.size() == 0) return f;
  Eigen::VectorXd x = impl_->llt.solve(f);
  if (impl_->llt.info() != Eigen::Success || !x.allFinite()) throw Error(ErrorCode::NonSPD, "Cholesky solve failed");
  return x;
}

Eigen::VectorXd solve(const SparseMatrix& K, const Eigen::VectorXd& f) { return CholeskySolver(K).solve(f); }

PointLocator::PointLocator(const HpMesh& mesh) {
  for (const auto& e : mesh.elements) {
    Eigen::AlignedBox2d box;
    const int n = e.num_vertices();
    for (int i = 0; i < n; ++i) {
      const Point2 a = reference_vertex(e.kind, i), b = reference_vertex(e.kind, (i + 1) % n);
      for (int k = 0; k < 8; ++k) box.extend(element_point(mesh, e, a + (k / 8.0) * (b - a)));
    }
    const double pad = 0.05 * box.diagonal().norm() + 1e-12;
    box.min() -= Point2::Constant(pad);
    box.max() += Point2::Constant(pad);
    boxes_.push_back(box);
  }
}

bool PointLocator::locate(const HpMesh& mesh, const Point2& p, int& element, Point2& xi) const {
  const double tol = 1e-10;
  for (std::size_t k = 0; k < boxes_.size(); ++k) {
    if (!boxes_[k].contains(p)) continue;
    const Element& e = mesh.elements[k];
    Point2 r = e.kind == ElementKind::Quad ? Point2(0, 0) : Point2(1.0 / 3, 1.0 / 3);
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      Point2 x;
      Eigen::Matrix2d DF;
      element_map(mesh, e, r, x, DF);
      if (!(std::abs(DF.determinant()) > 0.0)) break;
      const Point2 dr = DF.inverse() * (p - x);
      r += dr;
      if (!r.allFinite() || r.cwiseAbs().maxCoeff() > 10) break;
      if (dr.norm() < 1e-14) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      Point2 x;
      Eigen::Matrix2d DF;
      if (r.allFinite()) {
        element_map(mesh, e, r, x, DF);
        ok = (x - p).norm() <= 1e-12 * (1 + p.norm());
      }
    }
    if (!ok) continue;
    const bool inside = e.kind == ElementKind::Quad
                            ? r.cwiseAbs().maxCoeff() <= 1 + tol
                            : (r.x() >= -tol && r.y() >= -tol && r.x() + r.y() <= 1 + tol);
    if (!inside) {
      // Newton stalls at roundoff in very small elements; snap to the element
      // and accept if the image is within a size-relative distance.
      Point2 c = r;
      if (e.kind == ElementKind::Quad) {
        c = c.cwiseMax(-1.0).cwiseMin(1.0);
      } else {
        c = c.cwiseMax(0.0);
        const double s = c.x() + c.y();
        if (s > 1) c /= s;
      }
      Point2 x;
      Eigen::Matrix2d DF;
      element_map(mesh, e, c, x, DF);
      if ((x - p).norm() > 1e-9 * boxes_[k].diagonal().norm()) continue;
      r = c;
    }
    element = static_cast<int>(k);
    xi = r;
    return true;
  }
  return false;
}

SolutionField::SolutionField(std::shared_ptr<const HpSpace> s, Eigen::VectorXd c)
    : space(std::move(s)), coeffs(std::move(c)), locator(std::make_shared<PointLocator>(space->mesh())) {}

PointValue evaluate_local(const SolutionField& field, int k, const Point2& xi) {
  const HpSpace& space = *field.space;
  const Element& e = space.mesh().elements[k];
  Eigen::VectorXd val;
  Eigen::MatrixX2d grad;
  eval_basis(space.element_basis(k), xi, val, grad);
  const auto& dofs = space.element_dofs(k);
  const auto& s = space.element_signs(k);
  PointValue out;
  Eigen::Vector2d gref = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double c = s[i] * field.coeffs[dofs[i]];
    out.value += c * val[i];
    gref += c * grad.row(i).transpose();
  }
  Point2 x;
  Eigen::Matrix2d DF;
  element_map(space.mesh(), e, xi, x, DF);
  out.grad = DF.transpose().inverse() * gref;
  return out;
}

PointValue evaluate(const SolutionField& field, const Point2& p) {
  int k = -1;
  Point2 xi;
  if (!field.locator || !field.locator->locate(field.space->mesh(), p, k, xi))
    throw Error(ErrorCode::OutsideDomain, "point is outside the mesh");
  return evaluate_local(field, k, xi);
}

double energy(const SolutionField& field, const Surface& surface) {
  const HpSpace& space = *field.space;
  const HpMesh& mesh = space.mesh();
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& e = mesh.elements[k];
    const int order = space.element_degree(static_cast<int>(k)) + kQuadratureExtension;
    const QuadratureRule& rule = element_rule(e.kind, order);
    const BasisTable& tab = tabulate(space.element_basis(static_cast<int>(k)), order);
    const auto& dofs = space.element_dofs(static_cast<int>(k));
    const auto& s = space.element_signs(static_cast<int>(k));
    Eigen::VectorXd c(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) c[i] = s[i] * field.coeffs[dofs[i]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Point2 x;
      Eigen::Matrix2d DF;
      element_map(mesh, e, rule.points[q], x, DF);
      const Eigen::Vector2d g = tab.grad[q].transpose() * c;
      total += g.dot(pullback(surface, x, DF, rule.weights[q]) * g);
    }
  }
  return total;
}

double bilinear_energy(const SparseMatrix& K_full, const Eigen::VectorXd& c) { return c.dot(K_full * c); }

DirichletProblem::DirichletProblem(std::shared_ptr<const HpSpace> space, const SparseMatrix& K_full)
    : space_(std::move(space)), K_full_(K_full), chol_([&] {
        split(*space_, K_full_, K_ff_, K_fd_);
        return CholeskySolver(K_ff_);
      }()) {}

SolutionField DirichletProblem::solve() const { return solve({}); }

SolutionField DirichletProblem::solve(const std::map<BoundaryTag, double>& values) const {
  Eigen::VectorXd u = space_->lift(values);
  const Eigen::VectorXd f = -(K_fd_ * gather(*space_, u));
  const Eigen::VectorXd x = chol_.solve(f);
  const auto& fr = space_->free_dofs();
  for (std::size_t i = 0; i < fr.size(); ++i) u[fr[i]] = x[i];
  return SolutionField(space_, std::move(u));
}

SolutionField solve_bvp(std::shared_ptr<const HpSpace> space, const Surface& surface) {
  const SparseMatrix K = assemble_full(*space, surface);
  return DirichletProblem(space, K).solve();
}

}  // namespace cfm
