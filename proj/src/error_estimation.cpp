// SPDX-License-Identifier: Apache-2.0
#include "cfm/error_estimation.hpp"

#include "cfm/error.hpp"

namespace cfm {

double auxiliary_energy(const SparseMatrix& K_full, const Eigen::VectorXd& u, const std::vector<int>& W,
                        const Eigen::VectorXd& rhs, Eigen::VectorXd* eps) {
  if (W.empty()) {
    if (eps) eps->resize(0);
    return 0.0;
  }
  std::vector<int> windex(K_full.rows(), -1);
  for (std::size_t i = 0; i < W.size(); ++i) windex[W[i]] = static_cast<int>(i);
  const Eigen::VectorXd Ku = K_full * u;
  const int nw = static_cast<int>(W.size());
  Eigen::VectorXd r(nw);
  for (int i = 0; i < nw; ++i) r[i] = (rhs.size() ? rhs[W[i]] : 0.0) - Ku[W[i]];
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < K_full.outerSize(); ++col) {
    const int c = windex[col];
    if (c < 0) continue;
    for (SparseMatrix::InnerIterator it(K_full, col); it; ++it) {
      const int rr = windex[it.row()];
      if (rr >= 0) trip.emplace_back(rr, c, it.value());
    }
  }
  SparseMatrix KW(nw, nw);
  KW.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd e = solve(KW, r);
  if (eps) *eps = e;
  return std::max(0.0, e.dot(KW * e));
}

ErrorEstimate estimate(const HpSpace& space, const Surface& surface, const SolutionField& solution,
                       const Eigen::VectorXd& rhs) {
  auto enriched = std::make_shared<const HpSpace>(space.enriched());
  return estimate(enriched, assemble_full(*enriched, surface), solution, rhs);
}

ErrorEstimate estimate(std::shared_ptr<const HpSpace> enriched, const SparseMatrix& K_enriched,
                       const SolutionField& solution, const Eigen::VectorXd& rhs) {
  const HpSpace& base = *solution.space;
  const int n = enriched->num_dofs();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  std::vector<char> in_base(n, 0);
  for (int d = 0; d < base.num_dofs(); ++d) {
    const int e = enriched->find(base.key(d));
    if (e < 0) throw Error(ErrorCode::InvalidArgument, "enriched space does not contain the base space");
    u[e] = solution.coeffs[d];
    in_base[e] = 1;
  }
  std::vector<int> W;
  for (int d = 0; d < n; ++d)
    if (!in_base[d] && !enriched->is_dirichlet(d)) W.push_back(d);
  ErrorEstimate out;
  Eigen::VectorXd eps;
  out.energy = auxiliary_energy(K_enriched, u, W, rhs, &eps);
  out.estimate = std::sqrt(out.energy);
  out.aux_dofs = static_cast<int>(W.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < W.size(); ++i) c[W[i]] = eps[i];
  out.error_field = SolutionField(std::move(enriched), std::move(c));
  return out;
}

double error_energy_of_modulus(const ErrorEstimate& e) { return e.energy; }

}  // namespace cfm
