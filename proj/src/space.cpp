// SPDX-License-Identifier: Apache-2.0
#include "cfm/space.hpp"

#include <algorithm>

#include "cfm/error.hpp"

namespace cfm {

HpSpace::HpSpace(HpMesh mesh, BcMap bc, int degree_shift) : mesh_(std::move(mesh)), bc_(std::move(bc)), shift_(degree_shift) {
  const int ne = static_cast<int>(mesh_.elements.size());
  // boundary conditions for every tag present
  std::map<std::pair<int, int>, int> edge_degree;
  std::map<std::pair<int, int>, BoundaryTag> edge_tag;
  for (int k = 0; k < ne; ++k) {
    const Element& e = mesh_.elements[k];
    if (e.degree < 1) throw Error(ErrorCode::InvalidArgument, "element degree must be >= 1");
    const int n = e.num_vertices();
    for (int i = 0; i < n; ++i) {
      const int a = e.v[i], b = e.v[(i + 1) % n];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = edge_degree.find(key);
      const int p = e.degree + shift_;
      if (it == edge_degree.end()) edge_degree[key] = p;
      else it->second = std::min(it->second, p);
      if (e.tag[i].is_boundary()) {
        if (!bc_.count(e.tag[i])) throw Error(ErrorCode::MissingBC, "no boundary condition for " + e.tag[i].str());
        edge_tag[key] = e.tag[i];
      }
    }
  }
  // numbering: vertices, edges (key order), interiors (element order)
  std::vector<char> used(mesh_.vertices.size(), 0);
  for (const auto& e : mesh_.elements)
    for (int i = 0; i < e.num_vertices(); ++i) used[e.v[i]] = 1;
  auto add = [&](const DofKey& k) {
    index_[k] = static_cast<int>(keys_.size());
    keys_.push_back(k);
  };
  for (std::size_t v = 0; v < used.size(); ++v)
    if (used[v]) add({0, static_cast<int>(v), 0, 0});
  for (const auto& [key, p] : edge_degree)
    for (int k = 2; k <= p; ++k) add({1, key.first, key.second, k});
  basis_.resize(ne);
  dofs_.resize(ne);
  signs_.resize(ne);
  for (int k = 0; k < ne; ++k) {
    const Element& e = mesh_.elements[k];
    const int n = e.num_vertices();
    std::array<int, 4> pe{1, 1, 1, 1};
    for (int i = 0; i < n; ++i) {
      const int a = e.v[i], b = e.v[(i + 1) % n];
      pe[i] = edge_degree[{std::min(a, b), std::max(a, b)}];
    }
    basis_[k] = make_local_basis(e.kind, e.degree + shift_, pe);
    for (const Mode& m : basis_[k].modes)
      if (m.type == Mode::Type::Interior) add({e.kind == ElementKind::Quad ? 2 : 3, k, m.i, m.j});
    for (const Mode& m : basis_[k].modes) {
      double sign = 1.0;
      int dof = -1;
      if (m.type == Mode::Type::Vertex) {
        dof = index_.at({0, e.v[m.entity], 0, 0});
      } else if (m.type == Mode::Type::Edge) {
        const int a = e.v[m.entity], b = e.v[(m.entity + 1) % n];
        dof = index_.at({1, std::min(a, b), std::max(a, b), m.i});
        if (a > b && m.i % 2 == 1) sign = -1.0;
      } else {
        dof = index_.at({e.kind == ElementKind::Quad ? 2 : 3, k, m.i, m.j});
      }
      dofs_[k].push_back(dof);
      signs_[k].push_back(sign);
    }
  }
  // Dirichlet set
  const int nd = num_dofs();
  dirichlet_.assign(nd, 0);
  dof_tag_.assign(nd, BoundaryTag{});
  std::vector<double> value(nd, 0.0);
  auto fix = [&](int dof, const BoundaryTag& t) {
    const double v = bc_.at(t).value;
    if (dirichlet_[dof] && dof_tag_[dof] != t && value[dof] != v)
      throw Error(ErrorCode::InvalidArgument, "conflicting Dirichlet values at a vertex");
    if (!dirichlet_[dof]) dof_tag_[dof] = t;
    dirichlet_[dof] = 1;
    value[dof] = v;
  };
  for (const auto& [key, t] : edge_tag) {
    if (bc_.at(t).kind != BoundaryCondition::Kind::Dirichlet) continue;
    fix(index_.at({0, key.first, 0, 0}), t);
    fix(index_.at({0, key.second, 0, 0}), t);
    for (int k = 2; k <= edge_degree[key]; ++k) fix(index_.at({1, key.first, key.second, k}), t);
  }
  free_index_.assign(nd, -1);
  for (int d = 0; d < nd; ++d) {
    if (dirichlet_[d]) {
      fixed_.push_back(d);
    } else {
      free_index_[d] = static_cast<int>(free_.size());
      free_.push_back(d);
    }
  }
}

int HpSpace::find(const DofKey& k) const {
  auto it = index_.find(k);
  return it == index_.end() ? -1 : it->second;
}

int HpSpace::level(int dof) const {
  const DofKey& k = keys_[dof];
  switch (k.type) {
    case 0: return 1;
    case 1: return k.c;
    case 2: return std::max(k.b, k.c);
    default: return k.b + k.c + 3;
  }
}

int HpSpace::max_level() const {
  int m = 1;
  for (int d = 0; d < num_dofs(); ++d) m = std::max(m, level(d));
  return m;
}

Eigen::VectorXd HpSpace::lift() const { return lift({}); }

Eigen::VectorXd HpSpace::lift(const std::map<BoundaryTag, double>& override_values) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(num_dofs());
  for (int d : fixed_) {
    if (keys_[d].type != 0) continue;  // edge modes of constant data vanish
    auto it = override_values.find(dof_tag_[d]);
    u[d] = it != override_values.end() ? it->second : bc_.at(dof_tag_[d]).value;
  }
  return u;
}

}  // namespace cfm
