// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "cfm/domain.hpp"
#include "cfm/error_estimation.hpp"
#include "cfm/hp_solver.hpp"
#include "cfm/mesh.hpp"
#include "cfm/surfaces.hpp"

namespace cfm {

// Quadrilateral on a surface. rotation counts conjugations: side gamma_j of
// this quadrilateral is side gamma_{j+rotation} of the domain.
struct Quadrilateral {
  DomainSpec domain;
  Surface surface;
  int rotation = 0;

  Quadrilateral(DomainSpec d, Surface s, int r = 0) : domain(std::move(d)), surface(std::move(s)), rotation(r & 3) {}
  std::array<Point2, 4> corners() const;
  // Domain tag of side gamma_j (1-based) of this quadrilateral.
  BoundaryTag side(int j) const;
};

Quadrilateral conjugate(const Quadrilateral& q);

// Dirichlet 0 on gamma_2 and 1 on gamma_4, Neumann elsewhere.
BcMap modulus_bcs(const Quadrilateral& q, const HpMesh& mesh);

struct ModulusReport {
  double M_Q = 0.0, M_conj = 0.0, reci = 0.0;
  double est_err_Q = 0.0, est_err_conj = 0.0;
  int dofs = 0;
  int p = 0;
  double assembly_seconds = 0.0, solve_seconds = 0.0, estimate_seconds = 0.0;
};

struct ModulusResult {
  double M = 0.0;
  SolutionField field;
};

// mesh must carry its degrees.
ModulusResult modulus(const Quadrilateral& q, const HpMesh& mesh);
ModulusResult modulus(const Quadrilateral& q, const MeshRecipe& recipe, int p);

struct PairResult {
  ModulusReport report;
  SolutionField u, u_conj;
};
PairResult modulus_pair(const Quadrilateral& q, const HpMesh& mesh, bool estimates = true);
PairResult modulus_pair(const Quadrilateral& q, const MeshRecipe& recipe, int p, bool estimates = true);

// Reports for p in ps on one fixed mesh with uniform degrees. The space of
// degree max(ps) + 1 is assembled once; lower degrees are its hierarchic subspaces.
std::vector<ModulusReport> convergence_study(const Quadrilateral& q, const HpMesh& mesh, const std::vector<int>& ps);

struct ConformalMap {
  SolutionField u, u_conj;
  double h = 0.0;
  bool flip_u = false, flip_conj = false;  // orientation convention
  double corner_deviation = 0.0;
  std::array<Point2, 4> corners;

  // Image point: Re = u' and Im = h * u_conj', primes marking the chosen flips.
  Eigen::Vector2d operator()(const Point2& p) const;
};

// tolerance: allowed corner deviation (callers pass 10x the estimated error).
ConformalMap build_map(const Quadrilateral& q, const SolutionField& u, const SolutionField& u_conj, double h,
                       double tolerance);

struct Isoline {
  char kind = 'u';  // 'u' original potential, 'v' conjugate potential
  double level = 0.0;
  std::vector<Point2> param;
  std::vector<Eigen::Vector3d> xyz;
};

// Level sets of u at i/(n_u+1) and of u_conj at j/(n_v+1).
std::vector<Isoline> extract_isolines(const ConformalMap& map, const Surface& surface, int n_u, int n_v);

std::string isolines_csv(const std::vector<Isoline>& lines);
std::string report_text(const ModulusReport& r);
// Atomic write: temporary file then rename.
void write_file(const std::string& path, const std::string& content);

}  // namespace cfm
