// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfm/cli.hpp"
#include "cfm/error.hpp"
#include "cfm/mercator.hpp"

using namespace cfm;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string config(const std::string& name) { return std::string(CFM_CONFIG_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Collects failed checks of one criterion together with a short summary.
struct Verdict {
  std::vector<std::string> failures;
  std::ostringstream info;
  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

Experiment experiment(const std::string& file, ExperimentConfig* out = nullptr) {
  const ExperimentConfig cfg = load_config(config(file));
  if (out) *out = cfg;
  return build_experiment(cfg);
}

std::vector<ModulusReport> convergence(const std::string& file) {
  ExperimentConfig cfg;
  const Experiment ex = experiment(file, &cfg);
  int pmax = 0;
  for (int p : cfg.ps) pmax = std::max(pmax, p);
  return convergence_study(ex.quad, build_mesh(ex.quad.domain, ex.recipe, pmax), cfg.ps);
}

PairResult pair(const std::string& file) {
  ExperimentConfig cfg;
  const Experiment ex = experiment(file, &cfg);
  return modulus_pair(ex.quad, ex.recipe, cfg.ps.back());
}

// 1. Flat and isothermal exactness.
void criterion1(Verdict& v) {
  auto t0 = std::chrono::steady_clock::now();
  const PairResult sq = pair("square.ini");
  const double t_sq = seconds_since(t0);
  v.check(std::abs(sq.report.M_Q - 1) <= 1e-12, "square M = " + fmt(sq.report.M_Q));
  v.check(t_sq < 1.0, "square took " + fmt(t_sq) + " s");

  for (double h : {0.5, 2.0}) {
    const Quadrilateral q(make_rect(0, 1, 0, h), make_catalog_surface("plane"));
    const double M = modulus(q, MeshRecipe{}, 2).M;
    v.check(std::abs(M - h) <= 1e-12, "rectangle h = " + fmt(h) + " M = " + fmt(M));
  }
  const double Mh2 = pair("rect_h2.ini").report.M_Q;
  v.check(std::abs(Mh2 - 2) <= 1e-12, "rect_h2 M = " + fmt(Mh2));

  for (const char* name : {"catenoid.ini", "helicoid_isothermal.ini"}) {
    ExperimentConfig cfg;
    const Experiment ex = experiment(name, &cfg);
    for (int p : {1, 2}) {
      t0 = std::chrono::steady_clock::now();
      const PairResult r = modulus_pair(ex.quad, ex.recipe, p);
      const double t = seconds_since(t0);
      v.check(std::abs(r.report.M_Q - 1 / kPi) <= 1e-10, std::string(name) + " M = " + fmt(r.report.M_Q));
      v.check(std::abs(r.report.M_conj - kPi) <= 1e-10, std::string(name) + " M~ = " + fmt(r.report.M_conj));
      v.check(t < 5.0, std::string(name) + " took " + fmt(t) + " s");
    }
  }
  v.info << "square M-1 = " << fmt(sq.report.M_Q - 1);
}

// 2. Identity coefficient for the isothermal surfaces.
void criterion2(Verdict& v) {
  double worst = 0.0;
  for (const char* name : {"catenoid.ini", "helicoid_isothermal.ini"}) {
    const Experiment ex = experiment(name);
    MeshRecipe rec = ex.recipe;
    for (const auto& c : ex.quad.domain.corners) rec.steps.push_back({RefineStep::Kind::Corner, c, "", 3, 0.15});
    const HpMesh m = build_mesh(ex.quad.domain, rec, 6);
    const HpSpace s(m, modulus_bcs(ex.quad, m));
    const Eigen::MatrixXd K(assemble_full(s, ex.quad.surface));
    const Eigen::MatrixXd P(assemble_full(s, make_catalog_surface("plane")));
    const double rel = (K - P).cwiseAbs().maxCoeff() / P.cwiseAbs().maxCoeff();
    worst = std::max(worst, rel);
    v.check(rel <= 1e-12, std::string(name) + " relative difference " + fmt(rel));
  }
  v.info << "max relative difference " << fmt(worst);
}

// 3. Non-isothermal helicoid.
void criterion3(Verdict& v) {
  const auto reps = convergence("helicoid_general.ini");
  const ModulusReport& first = reps.front();
  const ModulusReport& last = reps.back();
  v.check(first.p == 2 && last.p == 10 && reps.size() == 9, "schedule must be p = 2..10");
  for (const auto& r : reps) {
    v.check(std::isfinite(r.reci), "reci not finite at p = " + std::to_string(r.p));
    const double est = r.M_conj * r.est_err_Q + r.M_Q * r.est_err_conj;
    const double ratio = est / r.reci;
    v.check(ratio <= 100 && ratio >= 0.01, "estimate/reci = " + fmt(ratio) + " at p = " + std::to_string(r.p));
  }
  const double drop = (std::log10(first.reci) - std::log10(last.reci)) / (last.p - first.p);
  v.check(drop >= 0.5, "average log10 drop " + fmt(drop));
  v.check(last.reci <= 1e-8, "reci(10) = " + fmt(last.reci));
  v.info << "reci(10) = " << fmt(last.reci) << ", drop per p = " << fmt(drop);
}

// 4. Schwarzian hemisphere.
void criterion4(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto reps = convergence("schwarz.ini");
  const double t = seconds_since(t0);
  for (const auto& r : reps) {
    const double err = std::abs(r.M_Q - 1);
    const std::string at = " at p = " + std::to_string(r.p);
    v.check(r.reci >= err, "reci below the exact error" + at);
    v.check(r.est_err_Q <= 10 * err && r.est_err_Q >= err / 10, "estimate/error = " + fmt(r.est_err_Q / err) + at);
  }
  const double err10 = std::abs(reps.back().M_Q - 1);
  v.check(reps.back().p == 10 && err10 <= 1e-8, "|M-1| = " + fmt(err10) + " at p = " + std::to_string(reps.back().p));
  v.check(t < 60, "took " + fmt(t) + " s");
  v.info << "|M-1|(10) = " << fmt(err10) << ", " << fmt(t) << " s";
}

// 5. Quarter sphere with and without the pole-edge refinement.
void criterion5(Verdict& v) {
  ExperimentConfig cfg;
  const Experiment ex = experiment("quarter_sphere.ini", &cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const double M = modulus(ex.quad, ex.recipe, 10).M;
  const double t = seconds_since(t0);
  MeshRecipe plain = ex.recipe;
  plain.steps.erase(std::remove_if(plain.steps.begin(), plain.steps.end(),
                                   [](const RefineStep& s) { return s.kind == RefineStep::Kind::Edge; }),
                    plain.steps.end());
  const double M0 = modulus(ex.quad, plain, 10).M;
  const double err = std::abs(M - std::sqrt(2.0)), err0 = std::abs(M0 - std::sqrt(2.0));
  v.check(err <= 1e-6, "|M-sqrt2| = " + fmt(err));
  v.check(err0 >= 10 * err, "unrefined error " + fmt(err0) + " not 10x worse");
  v.check(t < 120, "took " + fmt(t) + " s");
  v.info << "|M-sqrt2| = " << fmt(err) << ", without edge refinement " << fmt(err0);
}

// 6. Hyperbolic quadrilateral.
void criterion6(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const PairResult r = pair("hypquad.ini");
  const double t = seconds_since(t0);
  const double err = std::abs(r.report.M_Q - 1.8062303587451534);
  v.check(err <= 1e-8, "|M - ref| = " + fmt(err));
  v.check(r.report.reci <= 1e-9, "reci = " + fmt(r.report.reci));
  v.check(t < 180, "took " + fmt(t) + " s");
  v.info << "M = " << std::to_string(r.report.M_Q) << ", |M - ref| = " << fmt(err) << ", reci = " << fmt(r.report.reci);
}

// 7. Two holes with optimized potentials.
void criterion7(Verdict& v) {
  ExperimentConfig cfg;
  const Experiment ex = experiment("two_holes.ini", &cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const MultiHoleResult r = optimize_potentials(ex.quad, ex.recipe, cfg.ps.back(), cfg.optimizer);
  const double t = seconds_since(t0);
  for (double p : r.potentials.values)
    v.check(std::abs(p - 0.5343446377370098) <= 1e-5, "potential " + fmt(p) + " vs 0.5343446");
  v.check(std::abs(r.report.M_Q - 0.7901907571620941) <= 1e-6, "M vs 0.7901908");
  v.check(std::abs(r.report.M_conj - 1.2655174148067712) <= 1e-5, "M~ vs 1.2655174");
  v.check(r.report.reci <= 1e-6, "reci above 1e-6");
  v.check(t < 600, "took " + fmt(t) + " s");
  v.info << "M = " << fmt(r.report.M_Q) << ", M~ = " << fmt(r.report.M_conj) << ", v = " << fmt(r.potentials.values[0])
         << ", " << fmt(r.potentials.values[1]) << ", reci = " << fmt(r.report.reci);
}

// 8. Seashell.
void criterion8(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const PairResult r = pair("seashell.ini");
  const double t = seconds_since(t0);
  v.check(std::abs(r.report.M_Q - 1.567020274702868) <= 1e-4, "M = " + fmt(r.report.M_Q));
  v.check(std::abs(r.report.M_conj - 0.638156772214456) <= 1e-4, "M~ = " + fmt(r.report.M_conj));
  v.check(r.report.reci <= 1e-5, "reci = " + fmt(r.report.reci));
  v.check(t < 600, "took " + fmt(t) + " s");
  v.info << "M = " << std::to_string(r.report.M_Q) << ", M~ = " << std::to_string(r.report.M_conj)
         << ", reci = " << fmt(r.report.reci);
}

// 9. Mercator validation on the globe.
void criterion9(Verdict& v) {
  ExperimentConfig cfg;
  const Experiment ex = experiment("mercator.ini", &cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto errs = mercator_validate(ex.quad, ex.recipe, cfg.ps, cfg.eps);
  const double t = seconds_since(t0);
  v.check(cfg.eps == 0.01, "caps must be 1/100");
  v.check(cfg.ps == std::vector<int>({2, 4, 6, 8, 10}), "schedule must be 2, 4, 6, 8, 10");
  for (std::size_t i = 1; i < errs.size(); ++i) {
    v.check(errs[i].l2 < errs[i - 1].l2, "L2 error not decreasing at p = " + std::to_string(errs[i].p));
    v.check(errs[i].h1 < errs[i - 1].h1, "H1 error not decreasing at p = " + std::to_string(errs[i].p));
  }
  v.check(errs.back().l2 <= 1e-6, "L2 = " + fmt(errs.back().l2));
  v.check(errs.back().h1 <= 1e-4, "H1 = " + fmt(errs.back().h1));
  v.check(t < 300, "took " + fmt(t) + " s");
  v.info << "p = 10: L2 = " << fmt(errs.back().l2) << ", H1 = " << fmt(errs.back().h1);
}

// 10. Property suites.
void criterion10(Verdict& v) {
  const Experiment ex = experiment("schwarz.ini");
  const Quadrilateral& q = ex.quad;
  MeshRecipe rec = ex.recipe;
  for (auto& s : rec.steps) s.levels = 4;
  const HpMesh m = build_mesh(q.domain, rec, 6);
  auto space = std::make_shared<const HpSpace>(m, modulus_bcs(q, m));
  const SparseMatrix K = assemble_full(*space, q.surface);

  // SPD assembly.
  const double kmax = Eigen::MatrixXd(K).cwiseAbs().maxCoeff();
  const double asym = Eigen::MatrixXd(K - SparseMatrix(K.transpose())).cwiseAbs().maxCoeff();
  v.check(asym <= 1e-14 * kmax, "stiffness asymmetry " + fmt(asym));
  bool spd = true;
  try {
    CholeskySolver chol(reduce(*space, K, space->lift()).K);
  } catch (const Error&) {
    spd = false;
  }
  v.check(spd, "free stiffness not SPD");

  // Galerkin orthogonality.
  const SolutionField u = DirichletProblem(space, K).solve();
  const Eigen::VectorXd res = K * u.coeffs;
  double gal = 0.0;
  for (int d : space->free_dofs()) gal = std::max(gal, std::abs(res[d]));
  v.check(gal <= 1e-10, "Galerkin residual " + fmt(gal));

  // Gradient against central differences.
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> du(0.05, kPi / 2 - 0.05), dv(0.05, 2 * kPi - 0.05);
  double gerr = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Point2 p(du(rng), dv(rng));
    const double h = 1e-6;
    const Eigen::Vector2d g = evaluate(u, p).grad;
    const Eigen::Vector2d f((evaluate(u, p + Point2(h, 0)).value - evaluate(u, p - Point2(h, 0)).value) / (2 * h),
                            (evaluate(u, p + Point2(0, h)).value - evaluate(u, p - Point2(0, h)).value) / (2 * h));
    gerr = std::max(gerr, (g - f).cwiseAbs().maxCoeff() / std::max(1.0, f.cwiseAbs().maxCoeff()));
  }
  v.check(gerr <= 1e-6, "gradient vs finite differences " + fmt(gerr));

  // Conjugate 4-cycle.
  const Quadrilateral q4 = conjugate(conjugate(conjugate(conjugate(q))));
  bool cycle = q4.rotation == q.rotation;
  for (int k = 0; k < 4; ++k) cycle = cycle && (q4.corners()[k] - q.corners()[k]).norm() == 0.0;
  const double M1 = modulus(q, m).M, M2 = modulus(conjugate(conjugate(q)), m).M;
  v.check(cycle, "four conjugations differ from the identity");
  v.check(std::abs(M1 - M2) <= 1e-12 * M1, "double conjugate modulus differs by " + fmt(M1 - M2));

  // Scaling invariance of A.
  double scale = 0.0;
  for (const char* name : {"catenoid", "helicoid_general", "sphere", "seashell"}) {
    const Surface s = make_catalog_surface(name, std::string(name) == "seashell" ? std::vector<double>{1, 1, 1, 0.1}
                                                                                 : std::vector<double>{});
    const Surface b = s.scaled(7.0);
    for (int i = 0; i < 50; ++i) {
      const Point2 p(du(rng), dv(rng) / 2);
      const Eigen::Matrix2d A = coefficient_at(s, p);
      scale = std::max(scale, (A - coefficient_at(b, p)).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff());
    }
  }
  v.check(scale <= 1e-12, "scaling changes A by " + fmt(scale));

  // Mesh conformity after random refinement sequences.
  const DomainSpec d = make_rect(0, 1, 0, 1);
  const char* edges[] = {"u_min", "u_max", "v_min", "v_max"};
  int bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    MeshOptions o;
    o.grid_u = 1 + static_cast<int>(rng() % 3);
    o.grid_v = 1 + static_cast<int>(rng() % 3);
    HpMesh r = initial_mesh(d, o);
    for (int s = 0; s < 3; ++s) {
      const int levels = 1 + static_cast<int>(rng() % 4);
      if (rng() % 2) r = refine_corner(r, d.corners[rng() % 4], levels);
      else r = refine_edge(r, edges[rng() % 4], levels);
      if (!validate(r).empty()) ++bad;
    }
  }
  v.check(bad == 0, std::to_string(bad) + " refined meshes failed validation");

  // Byte-reproducible reports.
  ExperimentConfig cfg = load_config(config("schwarz.ini"));
  cfg.ps = {2, 3};
  v.check(run_experiment(cfg).report == run_experiment(cfg).report, "reports differ between runs");

  v.info << "asymmetry " << fmt(asym / kmax) << ", Galerkin " << fmt(gal) << ", FD gradient " << fmt(gerr)
         << ", scaling " << fmt(scale);
}

}  // namespace

int main() {
  const std::vector<std::function<void(Verdict&)>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                               criterion5, criterion6, criterion7, criterion8,
                                                               criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i](v);
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    const double t = seconds_since(t0);
    std::string line = "criterion " + std::to_string(i + 1) + ": " + (v.failures.empty() ? "PASS" : "FAIL");
    line += " [" + fmt(t) + " s] " + v.info.str();
    for (const auto& f : v.failures) line += "; " + f;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    failed += !v.failures.empty();
  }
  return failed ? 1 : 0;
}
