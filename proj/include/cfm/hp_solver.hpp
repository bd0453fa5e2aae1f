// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>

#include <map>
#include <memory>

#include "cfm/quadrature.hpp"
#include "cfm/space.hpp"
#include "cfm/surfaces.hpp"

namespace cfm {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Stiffness matrix over all dofs, Dirichlet dofs included. Gauss rules use
// (p + extension)^2 points per element.
SparseMatrix assemble_full(const HpSpace& space, const Surface& surface, int extension = kQuadratureExtension);

struct LinearSystem {
  SparseMatrix K;     // free x free
  Eigen::VectorXd f;  // -K_fd * lift
};
LinearSystem reduce(const HpSpace& space, const SparseMatrix& K_full, const Eigen::VectorXd& lift);
LinearSystem assemble(const HpSpace& space, const Surface& surface);

// Sparse Cholesky factorization; throws NonSPD.
class CholeskySolver {
 public:
  explicit CholeskySolver(const SparseMatrix& K);
  ~CholeskySolver();
  CholeskySolver(CholeskySolver&&) noexcept;
  CholeskySolver& operator=(CholeskySolver&&) noexcept;
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd solve(const SparseMatrix& K, const Eigen::VectorXd& f);

class PointLocator {
 public:
  explicit PointLocator(const HpMesh& mesh);
  // Element containing p and its reference coordinates; false if outside.
  bool locate(const HpMesh& mesh, const Point2& p, int& element, Point2& xi) const;

 private:
  std::vector<Eigen::AlignedBox2d> boxes_;
};

struct SolutionField {
  std::shared_ptr<const HpSpace> space;
  Eigen::VectorXd coeffs;  // all dofs, Dirichlet dofs hold the boundary values
  std::shared_ptr<const PointLocator> locator;

  SolutionField() = default;
  SolutionField(std::shared_ptr<const HpSpace> s, Eigen::VectorXd c);
};

struct PointValue {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();  // parameter-space gradient
};

PointValue evaluate(const SolutionField& field, const Point2& p);
PointValue evaluate_local(const SolutionField& field, int element, const Point2& xi);

// Integral of grad u^T A grad u over the parameter domain.
double energy(const SolutionField& field, const Surface& surface);
// c^T K c.
double bilinear_energy(const SparseMatrix& K_full, const Eigen::VectorXd& c);

// Factorized free-dof system for a fixed Dirichlet set; boundary values may vary.
class DirichletProblem {
 public:
  DirichletProblem(std::shared_ptr<const HpSpace> space, const SparseMatrix& K_full);
  SolutionField solve() const;
  SolutionField solve(const std::map<BoundaryTag, double>& values) const;
  const HpSpace& space() const { return *space_; }
  const SparseMatrix& full_matrix() const { return K_full_; }
  const SparseMatrix& free_matrix() const { return K_ff_; }

 private:
  std::shared_ptr<const HpSpace> space_;
  SparseMatrix K_full_, K_ff_, K_fd_;
  CholeskySolver chol_;
};

SolutionField solve_bvp(std::shared_ptr<const HpSpace> space, const Surface& surface);

}  // namespace cfm
