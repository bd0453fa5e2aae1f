// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cfm/conformal.hpp"

namespace cfm {

struct HolePotentials {
  std::vector<double> values;  // one per hole loop
};

// Standard modulus problem with homogeneous Neumann data on every hole.
ModulusResult solve_primal(const Quadrilateral& q, const HpMesh& mesh);
ModulusResult solve_primal(const Quadrilateral& q, const MeshRecipe& recipe, int p);

// Conjugate problem with the constant Dirichlet value pots[i] on hole i.
ModulusResult solve_conjugate_with_potentials(const Quadrilateral& q, const HolePotentials& pots, const HpMesh& mesh);
ModulusResult solve_conjugate_with_potentials(const Quadrilateral& q, const HolePotentials& pots,
                                              const MeshRecipe& recipe, int p);

// Mean of the field over each hole loop (parameter arc length).
HolePotentials hole_means(const Quadrilateral& q, const SolutionField& field);

struct OptimizeOptions {
  double tol = 1e-14;    // objective (reci^2) accepted when the sweep budget runs out
  double xtol = 1e-9;    // sweep-to-sweep change in the potentials
  int max_sweeps = 50;
  bool estimates = true;  // auxiliary-space estimates for the final pair
};

struct MultiHoleResult {
  HolePotentials potentials;
  ModulusReport report;
  int objective_evals = 0;
  int sweeps = 0;
  double initial_reci = 0.0;
  SolutionField u, u_conj;
};

// Cyclic coordinate search over (0, 1)^m minimizing reci^2. Each line search is
// a bracketed Brent minimization. Sweeps stop when the potentials settle or a
// sweep brings no decrease. Throws OptimizationStalled when max_sweeps pass
// with the objective still above tol.
MultiHoleResult optimize_potentials(const Quadrilateral& q, const HpMesh& mesh, const OptimizeOptions& opt = {});
MultiHoleResult optimize_potentials(const Quadrilateral& q, const MeshRecipe& recipe, int p,
                                    const OptimizeOptions& opt = {});

std::string multihole_report_text(const MultiHoleResult& r);

}  // namespace cfm
