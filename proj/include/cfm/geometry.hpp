// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cfm {

using Point2 = Eigen::Vector2d;

// Exactly parameterized boundary piece, t in [0, 1].
class CurveSegment {
 public:
  enum class Kind { Line, Arc, General };
  using Fn = std::function<Point2(double)>;

  static CurveSegment line(const Point2& a, const Point2& b);
  // Circle arc from angle theta0 to theta1; counterclockwise when theta1 > theta0.
  static CurveSegment arc(const Point2& center, double radius, double theta0, double theta1);
  // f and df are defined on [0, 1]; df is the derivative of f.
  static CurveSegment general(Fn f, Fn df);

  Point2 point(double t) const;
  Point2 tangent(double t) const;
  Point2 start() const { return point(0.0); }
  Point2 end() const { return point(1.0); }

  Kind kind() const { return kind_; }
  bool is_straight() const { return kind_ == Kind::Line; }
  const Point2& center() const { return c_; }
  double radius() const { return r_; }

  // Restriction to [t0, t1], reparameterized onto [0, 1].
  CurveSegment sub(double t0, double t1) const;
  CurveSegment reversed() const { return sub(1.0, 0.0); }

  // Parameter of the point of the segment closest to p (sampled + Newton polish).
  double project(const Point2& p) const;
  double length() const;

 private:
  Point2 base(double s) const;
  Point2 dbase(double s) const;

  Kind kind_ = Kind::Line;
  Point2 a_ = Point2::Zero(), b_ = Point2::Zero();
  Point2 c_ = Point2::Zero();
  double r_ = 0.0;
  std::shared_ptr<const Fn> f_, df_;
  double s0_ = 0.0, s1_ = 1.0;
};

using Loop = std::vector<CurveSegment>;

inline double cross2(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace cfm
