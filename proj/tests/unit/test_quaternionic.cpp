#include <cmath>
#include <numbers>

#include "doctest.h"
#include "freeprod/error.hpp"
#include "freeprod/quaternionic.hpp"

using namespace freeprod;
using std::numbers::pi;

TEST_CASE("single Ginibre matrix: g = conj(z), |b|^2 = 1 - |z|^2 inside") {
  for (cplx z : {cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.0, -0.9)}) {
    const auto q = qgreen_from_qr(ginibre_qr(), z);
    CHECK(std::abs(q.g - std::conj(z)) < 1e-10);
    CHECK(std::abs(std::norm(q.b) - (1.0 - std::norm(z))) < 1e-10);
  }
  const auto out = qgreen_from_qr(ginibre_qr(), 1.5);
  CHECK(std::abs(out.g - 1.0 / 1.5) < 1e-12);
  CHECK(std::norm(out.b) == 0.0);
}

TEST_CASE("single elliptic matrix against the closed form") {
  // Inside: g = (conj(v) - tau v) / (s^2 (1 - tau^2)), |b|^2 = 1/s^2 - |g|^2.
  const GaussianQR a{cplx(0.2, -0.1), 0.8, 0.4};
  for (cplx z : {cplx(0.3, 0.1), cplx(0.0, 0.3)}) {
    const cplx v = z - a.q;
    const double s2 = a.sigma * a.sigma;
    const cplx g = (std::conj(v) - a.tau * v) / (s2 * (1.0 - a.tau * a.tau));
    const auto q = qgreen_from_qr(a, z);
    CHECK(std::abs(q.g - g) < 1e-9);
    CHECK(std::abs(std::norm(q.b) - (1.0 / s2 - std::norm(g))) < 1e-9);
  }
}

TEST_CASE("quaternion layout and R transform") {
  const auto m = make_quaternion(cplx(1.0, 2.0), cplx(0.5, -0.5));
  CHECK(m(0, 1) == cplx(0.0, 1.0) * cplx(0.5, -0.5));
  CHECK(m(1, 0) == cplx(0.0, 1.0) * cplx(0.5, 0.5));
  CHECK(m(1, 1) == cplx(1.0, -2.0));
  const GaussianQR a{cplx(1.0, 0.0), 2.0, 0.5};
  const auto r = a.r_transform(m);
  CHECK(std::abs(r(0, 0) - (1.0 + 4.0 * 0.5 * cplx(1.0, 2.0))) < 1e-15);
  CHECK(std::abs(r(0, 1) - 4.0 * m(0, 1)) < 1e-15);
  CHECK(QuaternionicGreen{cplx(3.0, 0.0), cplx(0.0, 4.0)}.det() == 25.0);
}

TEST_CASE("factor specs") {
  const auto a = parse_gaussian_qr("q=1-0.5i,s=2,tau=0.25");
  CHECK(a.q == cplx(1.0, -0.5));
  CHECK(a.sigma == 2.0);
  CHECK(a.tau == 0.25);
  CHECK(parse_gaussian_qr("gue").tau == 1.0);
  CHECK(parse_gaussian_qr("elliptic:-0.5").tau == -0.5);
  CHECK(parse_gaussian_qr("tau=1").sigma == 1.0);
  CHECK_THROWS_AS(parse_gaussian_qr("tau=2"), Error);
  CHECK_THROWS_AS(parse_gaussian_qr("x=1"), Error);
  CHECK(parse_gaussian_qr(describe(a)).q == a.q);
}

TEST_CASE("Ginibre squared on a coarse grid") {
  const GridSpec grid{1.25, 65};
  const auto f = qmultiply_solve(ginibre_qr(), ginibre_qr(), grid);
  CHECK(f.unresolved_count() == 0);
  CHECK(std::abs(f.mass() - 1.0) < 0.02);
  const auto oracle = closed_form_product("ginibre*ginibre");
  for (int j = 1; j < grid.points - 1; ++j)
    for (int i = 1; i < grid.points - 1; ++i) {
      const double r = std::abs(grid.point(i, j));
      if (r >= 0.2 && r <= 0.8) CHECK(std::abs(f.rho[f.index(i, j)] - oracle.rho(grid.point(i, j))) < 5.0 * grid.h());
    }
  const auto c = support_contour(f);
  CHECK(c.loops.size() == 1);
  CHECK(c.max_distance_to([](cplx z) { return std::abs(std::abs(z) - 1.0); }) < 2.0 * grid.h());
  CHECK(c.contains(0.5));
  CHECK_FALSE(c.contains(cplx(1.1, 0.0)));
}

TEST_CASE("Gauss-law density at the border is an error") {
  const auto f = qmultiply_solve(ginibre_qr(), ginibre_qr(), GridSpec{1.25, 17});
  CHECK_THROWS_AS(density_from_field(f, 0, 5), Error);
}

TEST_CASE("closed forms and the limacon") {
  CHECK(closed_form_product("elliptic*elliptic").rho(0.5) == doctest::Approx(1.0 / pi));
  CHECK_THROWS_AS(closed_form_product("gue*haar"), Error);
  CHECK(limacon_distance(3.0) < 1e-9);
  CHECK(limacon_distance(cplx(0.0, 1.0)) < 1e-9);
  CHECK(limacon_distance(1.0) < 1e-9);  // inner loop passes through 1
  CHECK(limacon_distance(5.0) == doctest::Approx(2.0));
  for (cplx v : limacon_outline(64)) CHECK(limacon_distance(v) < 1e-9);
}

TEST_CASE("a grid too small for the support") {
  // Clipped on all four sides: the outside splits into corners.
  CHECK_THROWS_AS(qmultiply_solve(ginibre_qr(), ginibre_qr(), GridSpec{0.8, 33}), Error);
  // The limacon leaves through the right edge only: the contour cannot close.
  const GaussianQR shifted{1.0, 1.0, 0.0};
  const auto f = qmultiply_solve(shifted, shifted, GridSpec{2.5, 41});
  try {
    support_contour(f);
    FAIL("expected an open contour");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::open_contour);
  }
}
