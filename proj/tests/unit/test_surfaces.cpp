// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "cfm/error.hpp"
#include "cfm/surfaces.hpp"
#include "helpers.hpp"

using namespace cfm;
using cfm::test::kPi;

namespace {

struct CatalogCase {
  const char* name;
  std::vector<double> params;
  ParamRect sample;  // interior box for random points
};

std::vector<CatalogCase> catalog_cases() {
  return {
      {"plane", {}, {-2, 2, -2, 2}},
      {"catenoid", {}, {-1, 1, 0, 2 * kPi}},
      {"helicoid_general", {}, {-1, 1, 0, 2 * kPi}},
      {"helicoid_isothermal", {}, {-1, 1, 0, 2 * kPi}},
      {"sphere", {}, {0.05, kPi - 0.05, 0, 2 * kPi}},
      {"ellipsoid", {1.3, 1.1, 0.7}, {0, 2 * kPi, 0.05, kPi - 0.05}},
      {"seashell", {1, 1, 1, 0.1}, {-kPi, kPi, 0, 2 * kPi - 0.1}},
  };
}

Point2 random_point(std::mt19937& rng, const ParamRect& r) {
  std::uniform_real_distribution<double> du(r.u0, r.u1), dv(r.v0, r.v1);
  return {du(rng), dv(rng)};
}

}  // namespace

TEST_CASE("catalog points") {
  CHECK((make_catalog_surface("catenoid").eval({0, 0}) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  const double R1 = 6378.1370, R2 = 6356.7523;
  const Surface earth = make_catalog_surface("ellipsoid", {R1 / R2, R1 / R2, 1});
  CHECK((earth.eval({0, kPi / 2}) - Eigen::Vector3d(R1 / R2, 0, 0)).norm() < 1e-15);
  // (1 + cos pi) vanishes, leaving c cos 0 = 0.1 in x and a sin pi ~ 0 in z.
  const Surface shell = make_catalog_surface("seashell", {1, 1, 1, 0.1});
  CHECK((shell.eval({kPi, 0}) - Eigen::Vector3d(0.1, 0, 0)).norm() < 1e-15);
  const Eigen::Vector3d s = make_catalog_surface("sphere").eval({kPi / 2, kPi / 2});
  CHECK((s - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("catalog errors") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code([] { make_catalog_surface("torus"); }) == ErrorCode::UnknownSurface);
  CHECK(code([] { make_catalog_surface("ellipsoid", {1, -1, 1}); }) == ErrorCode::BadParams);
  CHECK(code([] { make_catalog_surface("ellipsoid", {1, 1}); }) == ErrorCode::BadParams);
  CHECK(code([] { make_catalog_surface("seashell", {1, 0, 1, 0.1}); }) == ErrorCode::BadParams);
  CHECK(code([] { metric_at(make_catalog_surface("sphere"), {0.0, 0.3}); }) == ErrorCode::SingularMetric);
  CHECK(code([] { metric_at(make_catalog_surface("seashell", {1, 1, 1, 0.1}), {0.3, 2 * kPi}); }) ==
        ErrorCode::SingularMetric);
}

TEST_CASE("planar metric is the identity") {
  const MetricData m = metric_at(make_catalog_surface("plane"), {0.3, -0.7});
  CHECK((m.G - Eigen::Matrix2d::Identity()).norm() == 0.0);
  CHECK((m.A - Eigen::Matrix2d::Identity()).norm() == 0.0);
  CHECK(m.sqrt_det_G == 1.0);
}

TEST_CASE("helicoid coefficient") {
  const Surface h = make_catalog_surface("helicoid_general");
  for (double u : {-0.8, 0.0, 1.0, 2.5}) {
    const double r = std::sqrt(u * u + 1);
    const Eigen::Matrix2d A = coefficient_at(h, {u, 1.3});
    CHECK(std::abs(A(0, 0) - r) <= 1e-12);
    CHECK(std::abs(A(1, 1) - 1 / r) <= 1e-12);
    CHECK(std::abs(A(0, 1)) <= 1e-12);
    CHECK(std::abs(A(1, 0)) <= 1e-12);
  }
}

TEST_CASE("isothermal surfaces have A = I") {
  std::mt19937 rng(7);
  for (const char* name : {"catenoid", "helicoid_isothermal"}) {
    const Surface s = make_catalog_surface(name);
    for (int i = 0; i < 100; ++i) {
      const Eigen::Matrix2d A = coefficient_at(s, random_point(rng, {-1, 1, 0, 2 * kPi}));
      CHECK((A - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("metric invariants on random points") {
  std::mt19937 rng(42);
  for (const auto& c : catalog_cases()) {
    CAPTURE(c.name);
    const Surface s = make_catalog_surface(c.name, c.params);
    REQUIRE(s.has_analytic_jacobian());
    for (int i = 0; i < 100; ++i) {
      const Point2 p = random_point(rng, c.sample);
      const MetricData m = metric_at(s, p);
      const Jacobian J = s.jacobian(p);
      CHECK((m.G - J.transpose() * J).norm() <= 1e-13 * m.G.norm());
      CHECK(std::abs(m.A.determinant() - 1.0) <= 1e-10);
      CHECK(std::abs(m.A(0, 1) - m.A(1, 0)) <= 1e-14 * m.A.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m.A);
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
      const Jacobian F = s.fd_jacobian(p);
      CHECK((J - F).norm() <= 1e-6 * std::max(1.0, J.norm()));
    }
  }
}

TEST_CASE("coefficient is invariant under scaling") {
  std::mt19937 rng(3);
  for (const auto& c : catalog_cases()) {
    CAPTURE(c.name);
    const Surface s = make_catalog_surface(c.name, c.params);
    const Surface big = s.scaled(7.0);
    for (int i = 0; i < 20; ++i) {
      const Point2 p = random_point(rng, c.sample);
      CHECK((big.eval(p) - 7.0 * s.eval(p)).norm() <= 1e-13 * (1 + big.eval(p).norm()));
      const Eigen::Matrix2d A = coefficient_at(s, p), B = coefficient_at(big, p);
      CHECK((A - B).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("finite-difference fallback") {
  const Surface ref = make_catalog_surface("sphere");
  const Surface fd("fd_sphere", [&](double u, double v) { return ref.eval({u, v}); }, {});
  CHECK_FALSE(fd.has_analytic_jacobian());
  const Point2 p(0.7, 2.1);
  CHECK((fd.jacobian(p) - ref.jacobian(p)).norm() <= 1e-8);
}
