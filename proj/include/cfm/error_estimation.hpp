// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cfm/hp_solver.hpp"

namespace cfm {

struct ErrorEstimate {
  double estimate = 0.0;  // sqrt(a(eps, eps))
  double energy = 0.0;    // a(eps, eps)
  int aux_dofs = 0;
  SolutionField error_field;  // over the enriched space, zero outside W
};

// Auxiliary-subspace estimate: W holds the modes of the degree-raised space
// that are absent from the base space. rhs (over the enriched dofs) is the
// load functional; empty means zero load.
ErrorEstimate estimate(const HpSpace& space, const Surface& surface, const SolutionField& solution,
                       const Eigen::VectorXd& rhs = {});
// Same, with the enriched space and its full stiffness prebuilt.
ErrorEstimate estimate(std::shared_ptr<const HpSpace> enriched, const SparseMatrix& K_enriched,
                       const SolutionField& solution, const Eigen::VectorXd& rhs = {});

// Modulus error bar |M - M_h| ~ a(eps, eps).
double error_energy_of_modulus(const ErrorEstimate& e);

// Core solve on index sets of a full system: u over all dofs (zero on W),
// W the error-space dofs. Returns a(eps, eps); eps receives the W values.
double auxiliary_energy(const SparseMatrix& K_full, const Eigen::VectorXd& u, const std::vector<int>& W,
                        const Eigen::VectorXd& rhs, Eigen::VectorXd* eps = nullptr);

}  // namespace cfm
