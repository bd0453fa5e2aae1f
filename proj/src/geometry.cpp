// SPDX-License-Identifier: Apache-2.0
#include "cfm/geometry.hpp"

#include <cmath>
#include <limits>

#include "cfm/error.hpp"

namespace cfm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::UnknownSurface: return "UnknownSurface";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::MeshingFailed: return "MeshingFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::MissingBC: return "MissingBC";
    case ErrorCode::NonSPD: return "NonSPD";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::OrientationCheckFailed: return "OrientationCheckFailed";
    case ErrorCode::OptimizationStalled: return "OptimizationStalled";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Io: return "Io";
  }
  return "Error";
}

CurveSegment CurveSegment::line(const Point2& a, const Point2& b) {
  CurveSegment c;
  c.kind_ = Kind::Line;
  c.a_ = a;
  c.b_ = b;
  return c;
}

CurveSegment CurveSegment::arc(const Point2& center, double radius, double theta0, double theta1) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "arc radius must be positive");
  CurveSegment c;
  c.kind_ = Kind::Arc;
  c.c_ = center;
  c.r_ = radius;
  c.s0_ = theta0;
  c.s1_ = theta1;
  return c;
}

CurveSegment CurveSegment::general(Fn f, Fn df) {
  CurveSegment c;
  c.kind_ = Kind::General;
  c.f_ = std::make_shared<const Fn>(std::move(f));
  c.df_ = std::make_shared<const Fn>(std::move(df));
  return c;
}

Point2 CurveSegment::base(double s) const {
  switch (kind_) {
    case Kind::Line: return a_ + s * (b_ - a_);
    case Kind::Arc: return c_ + r_ * Point2(std::cos(s), std::sin(s));
    case Kind::General: return (*f_)(s);
  }
  return Point2::Zero();
}

Point2 CurveSegment::dbase(double s) const {
  switch (kind_) {
    case Kind::Line: return b_ - a_;
    case Kind::Arc: return r_ * Point2(-std::sin(s), std::cos(s));
    case Kind::General: return (*df_)(s);
  }
  return Point2::Zero();
}

Point2 CurveSegment::point(double t) const {
  if (t == 0.0) return base(s0_);
  if (t == 1.0) return base(s1_);
  return base(s0_ + t * (s1_ - s0_));
}

Point2 CurveSegment::tangent(double t) const { return dbase(s0_ + t * (s1_ - s0_)) * (s1_ - s0_); }

CurveSegment CurveSegment::sub(double t0, double t1) const {
  CurveSegment c = *this;
  const double a = s0_ + t0 * (s1_ - s0_);
  const double b = s0_ + t1 * (s1_ - s0_);
  c.s0_ = a;
  c.s1_ = b;
  return c;
}

double CurveSegment::project(const Point2& p) const {
  constexpr int kSamples = 64;
  double best_t = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    const double t = double(i) / kSamples;
    const double d = (point(t) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  double t = best_t;
  const double h = 1e-6;
  for (int it = 0; it < 30; ++it) {
    const Point2 r = point(t) - p;
    const Point2 d1 = tangent(t);
    const Point2 d2 = (tangent(std::min(1.0, t + h)) - tangent(std::max(0.0, t - h))) /
                      (std::min(1.0, t + h) - std::max(0.0, t - h));
    const double g = r.dot(d1);
    const double H = d1.squaredNorm() + r.dot(d2);
    if (H <= 0.0) break;
    const double step = g / H;
    t = std::clamp(t - step, 0.0, 1.0);
    if (std::abs(step) < 1e-15) break;
  }
  return t;
}

double CurveSegment::length() const {
  if (kind_ == Kind::Line) return (b_ - a_).norm();
  if (kind_ == Kind::Arc) return r_ * std::abs(s1_ - s0_);
  // Gauss-Legendre on 16 panels is ample for the smooth curves used here.
  static const double xg[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double len = 0.0;
  const int panels = 64;
  for (int k = 0; k < panels; ++k) {
    const double a = double(k) / panels, b = double(k + 1) / panels;
    for (int q = 0; q < 3; ++q) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * xg[q];
      len += 0.5 * (b - a) * wg[q] * tangent(t).norm();
    }
  }
  return len;
}

}  // namespace cfm
