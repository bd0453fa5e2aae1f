// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <complex>

#include "cfm/domain.hpp"
#include "cfm/error.hpp"
#include "helpers.hpp"

using namespace cfm;
using cfm::test::kPi;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("rectangle tags and corners") {
  const DomainSpec d = make_rect(0, 2, 0, 1);
  REQUIRE(d.outer.size() == 4);
  CHECK((d.corners[0] - Point2(0, 0)).norm() == 0.0);
  CHECK((d.corners[2] - Point2(2, 1)).norm() == 0.0);
  for (int k = 0; k < 4; ++k) {
    const Segment& s = d.outer[d.corner_segment(k)];
    CHECK(s.tag == BoundaryTag::side(k + 1));
    CHECK((s.curve.start() - d.corners[k]).norm() < 1e-15);
  }
  for (std::size_t i = 0; i < d.outer.size(); ++i)
    CHECK((d.outer[i].curve.end() - d.outer[(i + 1) % d.outer.size()].curve.start()).norm() <= 1e-12);
}

TEST_CASE("corner on an edge splits the side") {
  const std::array<Point2, 4> c = {Point2(1, 0), Point2(1, 2), Point2(-1, 2), Point2(-1, 0)};
  const DomainSpec d = make_rect(-1, 1, 0, 2, c);
  // gamma_1 runs up the right side, gamma_2 across the top.
  CHECK(d.outer[d.corner_segment(0)].tag == BoundaryTag::side(1));
  CHECK(std::abs(d.outer[d.corner_segment(1)].curve.point(0.5).y() - 2) < 1e-15);
}

TEST_CASE("hypquad vertices and orthogonality") {
  const DomainSpec d = make_hypquad({0, 0}, 1, kPi / 4);
  const std::complex<double> I(0, 1);
  const std::complex<double> want[4] = {std::exp(I * (kPi / 4)), std::exp(I * (3 * kPi / 4)),
                                        std::exp(-I * (3 * kPi / 4)), std::exp(-I * (kPi / 4))};
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(d.corners[k].x() - want[k].real()) < 1e-14);
    CHECK(std::abs(d.corners[k].y() - want[k].imag()) < 1e-14);
    const double c2 = d.arc_centers[k].squaredNorm(), r2 = d.arc_radii[k] * d.arc_radii[k];
    CHECK(std::abs(c2 - r2 - 1.0) < 1e-12);
  }

  const Point2 c0(3 * kPi / 16, 3 * kPi / 16);
  const double R = kPi / (8 * std::sqrt(2.0));
  const DomainSpec t = make_hypquad(c0, R, kPi / 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs((t.corners[k] - c0).norm() - R) < 1e-14);
    const double c2 = (t.arc_centers[k] - c0).squaredNorm(), r2 = t.arc_radii[k] * t.arc_radii[k];
    CHECK(std::abs(c2 - r2 - R * R) < 1e-12 * R * R);
    // Arcs pass through consecutive vertices.
    CHECK(std::abs((t.corners[k] - t.arc_centers[k]).norm() - t.arc_radii[k]) < 1e-12);
    CHECK(std::abs((t.corners[(k + 1) % 4] - t.arc_centers[k]).norm() - t.arc_radii[k]) < 1e-12);
  }
}

TEST_CASE("two-hole disk") {
  const DomainSpec d = make_domain("disk_two_holes", {});
  CHECK(d.num_holes() == 2);
  CHECK((d.center - Point2(0.5, 0.5)).norm() == 0.0);
  CHECK(d.radius == 1.0);
  CHECK((d.hole_centers[0] - Point2(0.25, 0.25)).norm() == 0.0);
  CHECK((d.hole_centers[1] - Point2(0.75, 0.75)).norm() == 0.0);
  CHECK(d.hole_radii[0] == 0.25);
  CHECK(d.holes[0].front().tag == BoundaryTag::hole(1));
  CHECK(d.holes[1].front().tag == BoundaryTag::hole(2));
}

TEST_CASE("degenerate domains") {
  CHECK(code_of([] { make_hypquad({0, 0}, 1, 0.0); }) == ErrorCode::DegenerateDomain);
  CHECK(code_of([] { make_hypquad({0, 0}, 1, kPi / 2); }) == ErrorCode::DegenerateDomain);
  CHECK(code_of([] { make_rect(0, 0, 0, 1); }) == ErrorCode::DegenerateDomain);
  CHECK(code_of([] {
          make_disk_with_holes({0, 0}, 1, {Point2(-0.2, 0), Point2(0.2, 0)}, {0.3, 0.3},
                               {0, kPi / 2, kPi, 1.5 * kPi});
        }) == ErrorCode::DegenerateDomain);
  CHECK(code_of([] {
          const std::array<Point2, 4> c = {Point2(0, 0), Point2(0, 1), Point2(1, 1), Point2(1, 0)};
          make_rect(0, 1, 0, 1, c);
        }) == ErrorCode::DegenerateDomain);
  CHECK(code_of([] { make_domain("rect", {{"width", {1}}}); }) == ErrorCode::BadParams);
}

TEST_CASE("boundary tag names round-trip") {
  for (const BoundaryTag t : {BoundaryTag::side(1), BoundaryTag::side(4), BoundaryTag::hole(2), BoundaryTag::natural()})
    CHECK(BoundaryTag::parse(t.str()) == t);
  CHECK(code_of([] { BoundaryTag::parse("gamma5"); }) == ErrorCode::UnknownTag);
}
