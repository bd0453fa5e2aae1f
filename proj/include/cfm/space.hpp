// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <compare>
#include <map>
#include <memory>
#include <vector>

#include "cfm/basis.hpp"
#include "cfm/mesh.hpp"

namespace cfm {

struct BoundaryCondition {
  enum class Kind { Dirichlet, Neumann } kind = Kind::Neumann;
  double value = 0.0;
  static BoundaryCondition dirichlet(double v) { return {Kind::Dirichlet, v}; }
  static BoundaryCondition neumann() { return {Kind::Neumann, 0.0}; }
};
using BcMap = std::map<BoundaryTag, BoundaryCondition>;

// Identity of a hierarchic mode independent of numbering: vertex (0, v),
// edge (1, lo, hi, k), quad interior (2, element, i, j), triangle bubble (3, element, n1, n2).
struct DofKey {
  int type = 0, a = 0, b = 0, c = 0;
  auto operator<=>(const DofKey&) const = default;
};

class HpSpace {
 public:
  // degree_shift raises every element degree (used for the enriched space).
  HpSpace(HpMesh mesh, BcMap bc, int degree_shift = 0);

  const HpMesh& mesh() const { return mesh_; }
  const BcMap& bcs() const { return bc_; }
  int degree_shift() const { return shift_; }

  int num_dofs() const { return static_cast<int>(keys_.size()); }
  int num_free() const { return static_cast<int>(free_.size()); }

  int element_degree(int e) const { return mesh_.elements[e].degree + shift_; }
  const LocalBasis& element_basis(int e) const { return basis_[e]; }
  const std::vector<int>& element_dofs(int e) const { return dofs_[e]; }
  const std::vector<double>& element_signs(int e) const { return signs_[e]; }

  const DofKey& key(int dof) const { return keys_[dof]; }
  int find(const DofKey& k) const;  // -1 if absent
  // Polynomial level of a mode: 1 for vertices, k for edge mode k,
  // max(i, j) for quad interiors, n1 + n2 + 3 for triangle bubbles.
  int level(int dof) const;
  int max_level() const;

  bool is_dirichlet(int dof) const { return dirichlet_[dof] != 0; }
  const std::vector<int>& free_dofs() const { return free_; }
  const std::vector<int>& dirichlet_dofs() const { return fixed_; }
  int free_index(int dof) const { return free_index_[dof]; }

  // Boundary values over all dofs (zero on free dofs).
  Eigen::VectorXd lift() const;
  Eigen::VectorXd lift(const std::map<BoundaryTag, double>& override_values) const;
  // Dirichlet tag owning each fixed dof.
  const std::vector<BoundaryTag>& dof_tags() const { return dof_tag_; }

  HpSpace enriched() const { return HpSpace(mesh_, bc_, shift_ + 1); }
  HpSpace with_bcs(BcMap bc) const { return HpSpace(mesh_, std::move(bc), shift_); }

 private:
  HpMesh mesh_;
  BcMap bc_;
  int shift_ = 0;
  std::vector<DofKey> keys_;
  std::map<DofKey, int> index_;
  std::vector<LocalBasis> basis_;
  std::vector<std::vector<int>> dofs_;
  std::vector<std::vector<double>> signs_;
  std::vector<char> dirichlet_;
  std::vector<BoundaryTag> dof_tag_;
  std::vector<int> free_, fixed_, free_index_;
};

}  // namespace cfm
