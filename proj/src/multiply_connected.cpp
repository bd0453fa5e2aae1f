// SPDX-License-Identifier: Apache-2.0
#include "cfm/multiply_connected.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cfm/error.hpp"

namespace cfm {

namespace {

void require_holes(const Quadrilateral& q) {
  if (q.domain.num_holes() < 1) throw Error(ErrorCode::InvalidArgument, "domain has no holes");
}

BcMap conjugate_bcs(const Quadrilateral& q, const HpMesh& mesh, const HolePotentials& pots) {
  const int m = q.domain.num_holes();
  if (static_cast<int>(pots.values.size()) != m)
    throw Error(ErrorCode::InvalidArgument, "expected one potential per hole");
  BcMap bc = modulus_bcs(conjugate(q), mesh);
  for (int k = 0; k < m; ++k) bc[BoundaryTag::hole(k + 1)] = BoundaryCondition::dirichlet(pots.values[k]);
  return bc;
}

std::map<BoundaryTag, double> hole_values(const std::vector<double>& v) {
  std::map<BoundaryTag, double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out[BoundaryTag::hole(static_cast<int>(k) + 1)] = v[k];
  return out;
}

}  // namespace

ModulusResult solve_primal(const Quadrilateral& q, const HpMesh& mesh) {
  require_holes(q);
  return modulus(q, mesh);
}

ModulusResult solve_primal(const Quadrilateral& q, const MeshRecipe& recipe, int p) {
  return solve_primal(q, build_mesh(q.domain, recipe, p));
}

ModulusResult solve_conjugate_with_potentials(const Quadrilateral& q, const HolePotentials& pots, const HpMesh& mesh) {
  require_holes(q);
  auto space = std::make_shared<const HpSpace>(mesh, conjugate_bcs(q, mesh, pots));
  const SparseMatrix K = assemble_full(*space, q.surface);
  ModulusResult r;
  r.field = DirichletProblem(space, K).solve();
  r.M = bilinear_energy(K, r.field.coeffs);
  return r;
}

ModulusResult solve_conjugate_with_potentials(const Quadrilateral& q, const HolePotentials& pots,
                                              const MeshRecipe& recipe, int p) {
  return solve_conjugate_with_potentials(q, pots, build_mesh(q.domain, recipe, p));
}

HolePotentials hole_means(const Quadrilateral& q, const SolutionField& field) {
  constexpr int kSamples = 128;
  HolePotentials out;
  for (const auto& loop : q.domain.holes) {
    double sum = 0.0, len = 0.0;
    for (const auto& seg : loop)
      for (int i = 0; i < kSamples; ++i) {
        const double t = (i + 0.5) / kSamples;
        const double w = seg.curve.tangent(t).norm() / kSamples;
        sum += w * evaluate(field, seg.curve.point(t)).value;
        len += w;
      }
    out.values.push_back(std::clamp(sum / len, 0.0, 1.0));
  }
  return out;
}

MultiHoleResult optimize_potentials(const Quadrilateral& q, const HpMesh& mesh, const OptimizeOptions& opt) {
  require_holes(q);
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const int m = q.domain.num_holes();
  MultiHoleResult out;

  auto space = std::make_shared<const HpSpace>(mesh, modulus_bcs(q, mesh));
  const SparseMatrix K = assemble_full(*space, q.surface);
  out.u = DirichletProblem(space, K).solve();
  const double M = bilinear_energy(K, out.u.coeffs);

  auto space_c = std::make_shared<const HpSpace>(space->with_bcs(conjugate_bcs(q, mesh, {std::vector<double>(m)})));
  const DirichletProblem conj(space_c, K);

  auto objective = [&](const std::vector<double>& v) {
    ++out.objective_evals;
    const double r = M * bilinear_energy(K, conj.solve(hole_values(v)).coeffs) - 1.0;
    return r * r;
  };

  std::vector<double> v = hole_means(q, out.u).values;
  double f = objective(v);
  out.initial_reci = std::sqrt(f);
  const int bits = std::numeric_limits<double>::digits / 2;
  bool settled = false;
  while (!settled) {
    if (out.sweeps == opt.max_sweeps) {
      if (f <= opt.tol) break;
      throw Error(ErrorCode::OptimizationStalled,
                  "potentials still moving after " + std::to_string(opt.max_sweeps) + " sweeps");
    }
    ++out.sweeps;
    double change = 0.0;
    const double f_start = f;
    for (int k = 0; k < m; ++k) {
      std::vector<double> trial = v;
      auto line = [&](double x) {
        trial[k] = x;
        return objective(trial);
      };
      std::uintmax_t iters = 200;
      const auto [x, fx] = boost::math::tools::brent_find_minima(line, 0.0, 1.0, bits, iters);
      if (fx < f) {
        change = std::max(change, std::abs(x - v[k]));
        v[k] = x;
        f = fx;
      }
    }
    settled = change < opt.xtol || !(f < f_start);
  }
  out.potentials.values = v;

  out.u_conj = conj.solve(hole_values(v));
  out.report.M_Q = M;
  out.report.M_conj = bilinear_energy(K, out.u_conj.coeffs);
  out.report.reci = std::abs(out.report.M_Q * out.report.M_conj - 1.0);
  out.report.dofs = space->num_dofs();
  for (const auto& e : mesh.elements) out.report.p = std::max(out.report.p, e.degree);
  if (opt.estimates) {
    auto enr = std::make_shared<const HpSpace>(space->enriched());
    auto enr_c = std::make_shared<const HpSpace>(enr->with_bcs(space_c->bcs()));
    const SparseMatrix KE = assemble_full(*enr, q.surface);
    out.report.est_err_Q = error_energy_of_modulus(estimate(enr, KE, out.u));
    out.report.est_err_conj = error_energy_of_modulus(estimate(enr_c, KE, out.u_conj));
  }
  return out;
}

MultiHoleResult optimize_potentials(const Quadrilateral& q, const MeshRecipe& recipe, int p,
                                    const OptimizeOptions& opt) {
  return optimize_potentials(q, build_mesh(q.domain, recipe, p), opt);
}

std::string multihole_report_text(const MultiHoleResult& r) {
  std::string s = report_text(r.report);
  s += "hole_potentials =";
  char buf[64];
  for (double v : r.potentials.values) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "\nobjective_evals = %d\n", r.objective_evals);
  s += buf;
  return s;
}

}  // namespace cfm
