// SPDX-License-Identifier: Apache-2.0
#include "cfm/surfaces.hpp"

#include <cmath>
#include <sstream>

#include "cfm/error.hpp"

namespace cfm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

Jacobian columns(const Eigen::Vector3d& xu, const Eigen::Vector3d& xv) {
  Jacobian J;
  J.col(0) = xu;
  J.col(1) = xv;
  return J;
}

void require_count(const std::string& name, const std::vector<double>& params, std::size_t n) {
  if (params.size() != n) {
    std::ostringstream os;
    os << name << " expects " << n << " parameters, got " << params.size();
    throw Error(ErrorCode::BadParams, os.str());
  }
}

}  // namespace

Surface::Surface(std::string name, EvalFn eval, JacFn jac, ParamRect rect)
    : name_(std::move(name)), eval_(std::move(eval)), jac_(std::move(jac)), rect_(rect) {
  if (!eval_) throw Error(ErrorCode::BadParams, "surface needs an evaluation function");
}

Jacobian Surface::fd_jacobian(const Point2& p) const {
  Jacobian J;
  for (int k = 0; k < 2; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(p[k]));
    Point2 a = p, b = p;
    a[k] -= h;
    b[k] += h;
    J.col(k) = (eval(b) - eval(a)) / (2.0 * h);
  }
  return J;
}

Jacobian Surface::jacobian(const Point2& p) const {
  if (jac_) return jac_(p.x(), p.y());
  return fd_jacobian(p);
}

Surface Surface::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::BadParams, "scale factor must be positive");
  EvalFn e = [f = eval_, factor](double u, double v) -> Eigen::Vector3d { return factor * f(u, v); };
  JacFn j;
  if (jac_) j = [f = jac_, factor](double u, double v) -> Jacobian { return factor * f(u, v); };
  Surface s(name_, std::move(e), std::move(j), rect_);
  s.flat_ = flat_;
  return s;
}

MetricData metric_at(const Surface& surface, const Point2& p) {
  const Jacobian J = surface.jacobian(p);
  MetricData m;
  m.G = J.transpose() * J;
  const double det = m.G(0, 0) * m.G(1, 1) - m.G(0, 1) * m.G(1, 0);
  const double trace = m.G(0, 0) + m.G(1, 1);
  if (!std::isfinite(det) || !(det > 0.0) || std::sqrt(det) <= kSingularMetricTol * trace) {
    std::ostringstream os;
    os.precision(17);
    os << "det G = " << det << " at (" << p.x() << ", " << p.y() << ") on " << surface.name();
    throw Error(ErrorCode::SingularMetric, os.str());
  }
  m.sqrt_det_G = std::sqrt(det);
  Eigen::Matrix2d Ginv;
  Ginv << m.G(1, 1), -m.G(0, 1), -m.G(1, 0), m.G(0, 0);
  m.A = Ginv / m.sqrt_det_G;
  m.A(1, 0) = m.A(0, 1);
  return m;
}

Eigen::Matrix2d coefficient_at(const Surface& surface, const Point2& p) {
  if (surface.flat()) return Eigen::Matrix2d::Identity();
  return metric_at(surface, p).A;
}

std::vector<std::string> catalog_surface_names() {
  return {"plane", "catenoid", "helicoid_general", "helicoid_isothermal", "sphere", "ellipsoid", "seashell"};
}

Surface make_catalog_surface(const std::string& name, const std::vector<double>& params) {
  using V3 = Eigen::Vector3d;
  if (name == "plane") {
    require_count(name, params, 0);
    Surface s(
        name, [](double u, double v) { return V3(u, v, 0.0); },
        [](double, double) { return columns(V3(1, 0, 0), V3(0, 1, 0)); });
    s.flat_ = true;
    return s;
  }
  if (name == "catenoid") {
    require_count(name, params, 0);
    return Surface(
        name, [](double u, double v) { return V3(std::cosh(u) * std::cos(v), std::cosh(u) * std::sin(v), u); },
        [](double u, double v) {
          return columns(V3(std::sinh(u) * std::cos(v), std::sinh(u) * std::sin(v), 1.0),
                         V3(-std::cosh(u) * std::sin(v), std::cosh(u) * std::cos(v), 0.0));
        });
  }
  if (name == "helicoid_general") {
    require_count(name, params, 0);
    return Surface(
        name, [](double u, double v) { return V3(u * std::cos(v), u * std::sin(v), v); },
        [](double u, double v) {
          return columns(V3(std::cos(v), std::sin(v), 0.0), V3(-u * std::sin(v), u * std::cos(v), 1.0));
        });
  }
  if (name == "helicoid_isothermal") {
    require_count(name, params, 0);
    return Surface(
        name, [](double u, double v) { return V3(std::sinh(u) * std::sin(v), -std::sinh(u) * std::cos(v), v); },
        [](double u, double v) {
          return columns(V3(std::cosh(u) * std::sin(v), -std::cosh(u) * std::cos(v), 0.0),
                         V3(std::sinh(u) * std::cos(v), std::sinh(u) * std::sin(v), 1.0));
        });
  }
  if (name == "sphere") {
    if (params.size() > 1) require_count(name, params, 1);
    const double r = params.empty() ? 1.0 : params[0];
    if (!(r > 0.0)) throw Error(ErrorCode::BadParams, "sphere radius must be positive");
    return Surface(
        name,
        [r](double u, double v) {
          return V3(r * std::sin(u) * std::cos(v), r * std::sin(u) * std::sin(v), r * std::cos(u));
        },
        [r](double u, double v) {
          return columns(V3(r * std::cos(u) * std::cos(v), r * std::cos(u) * std::sin(v), -r * std::sin(u)),
                         V3(-r * std::sin(u) * std::sin(v), r * std::sin(u) * std::cos(v), 0.0));
        });
  }
  if (name == "ellipsoid") {
    require_count(name, params, 3);
    const double a = params[0], b = params[1], c = params[2];
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw Error(ErrorCode::BadParams, "ellipsoid radii must be positive");
    // (u, v) = (longitude, colatitude)
    return Surface(
        name,
        [a, b, c](double l, double f) {
          return V3(a * std::cos(l) * std::sin(f), b * std::sin(l) * std::sin(f), c * std::cos(f));
        },
        [a, b, c](double l, double f) {
          return columns(V3(-a * std::sin(l) * std::sin(f), b * std::cos(l) * std::sin(f), 0.0),
                         V3(a * std::cos(l) * std::cos(f), b * std::sin(l) * std::cos(f), -c * std::sin(f)));
        },
        ParamRect{-kInf, kInf, 0.0, kPi});
  }
  if (name == "seashell") {
    require_count(name, params, 4);
    const double n = params[0], a = params[1], b = params[2], c = params[3];
    if (!(a > 0.0)) throw Error(ErrorCode::BadParams, "seashell a must be positive");
    return Surface(
        name,
        [n, a, b, c](double u, double v) {
          const double w = 1.0 - v / (2.0 * kPi), R = 1.0 + std::cos(u);
          return V3(a * w * std::cos(n * v) * R + c * std::cos(n * v), a * w * std::sin(n * v) * R + c * std::sin(n * v),
                    b * v / (2.0 * kPi) + a * w * std::sin(u));
        },
        [n, a, b, c](double u, double v) {
          const double w = 1.0 - v / (2.0 * kPi), R = 1.0 + std::cos(u);
          const double cn = std::cos(n * v), sn = std::sin(n * v);
          const V3 xu(-a * w * cn * std::sin(u), -a * w * sn * std::sin(u), a * w * std::cos(u));
          const V3 xv(-a / (2.0 * kPi) * cn * R - a * w * n * sn * R - c * n * sn,
                      -a / (2.0 * kPi) * sn * R + a * w * n * cn * R + c * n * cn,
                      b / (2.0 * kPi) - a / (2.0 * kPi) * std::sin(u));
          return columns(xu, xv);
        },
        ParamRect{-kInf, kInf, -kInf, 2.0 * kPi});
  }
  throw Error(ErrorCode::UnknownSurface, "unknown surface '" + name + "'");
}

}  // namespace cfm
