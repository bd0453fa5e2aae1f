// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cfm/geometry.hpp"

namespace cfm {

using Jacobian = Eigen::Matrix<double, 3, 2>;

struct ParamRect {
  double u0 = -std::numeric_limits<double>::infinity();
  double u1 = std::numeric_limits<double>::infinity();
  double v0 = -std::numeric_limits<double>::infinity();
  double v1 = std::numeric_limits<double>::infinity();
  bool contains(const Point2& p, double tol = 1e-12) const {
    return p.x() >= u0 - tol && p.x() <= u1 + tol && p.y() >= v0 - tol && p.y() <= v1 + tol;
  }
};

class Surface {
 public:
  using EvalFn = std::function<Eigen::Vector3d(double, double)>;
  using JacFn = std::function<Jacobian(double, double)>;

  // jac may be empty; central differences are used then.
  Surface(std::string name, EvalFn eval, JacFn jac, ParamRect rect = {});

  Eigen::Vector3d eval(const Point2& p) const { return eval_(p.x(), p.y()); }
  Jacobian jacobian(const Point2& p) const;
  Jacobian fd_jacobian(const Point2& p) const;

  const std::string& name() const { return name_; }
  const ParamRect& param_rect() const { return rect_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }
  // True when A is the identity everywhere (plane); lets assembly skip metric work.
  bool flat() const { return flat_; }

  Surface scaled(double factor) const;

 private:
  friend Surface make_catalog_surface(const std::string&, const std::vector<double>&);
  std::string name_;
  EvalFn eval_;
  JacFn jac_;
  ParamRect rect_;
  bool flat_ = false;
};

struct MetricData {
  Eigen::Matrix2d G;
  Eigen::Matrix2d A;
  double sqrt_det_G = 0.0;
};

// Singular when sqrt(det G) <= kSingularMetricTol * trace(G).
inline constexpr double kSingularMetricTol = 1e-14;

MetricData metric_at(const Surface& surface, const Point2& p);
// Coefficient only; same checks as metric_at.
Eigen::Matrix2d coefficient_at(const Surface& surface, const Point2& p);

Surface make_catalog_surface(const std::string& name, const std::vector<double>& params = {});
std::vector<std::string> catalog_surface_names();

}  // namespace cfm
