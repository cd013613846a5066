#include <cmath>
#include <numbers>

#include "doctest.h"
#include "freeprod/error.hpp"
#include "freeprod/isotropic.hpp"

using namespace freeprod;
using std::numbers::pi;

TEST_CASE("Ginibre radial law and planar density") {
  const auto g = ginibre_radial();
  CHECK(g.cdf(0.5) == doctest::Approx(0.25));
  CHECK(planar_density(g, cplx(0.3, 0.4)) == doctest::Approx(1.0 / pi));
  CHECK(planar_density(g, 1.2) == 0.0);
  CHECK_THROWS_AS(planar_density(g, 0.0), Error);
  CHECK(g.shape() == RingShape::disk);
}

TEST_CASE("radial law round trip through the S transform") {
  const auto g = ginibre_radial();
  const auto back = hl_radial_from_s(hl_s_from_radial(g), 0.0);
  for (double x = 0.0; x <= 1.1; x += 0.01) CHECK(std::abs(back.cdf(x) - g.cdf(x)) < 1e-6);
  for (double x = 0.05; x < 1.0; x += 0.05) CHECK(std::abs(back.cdf_derivative(x) - 2.0 * x) < 1e-6);
  for (double v : {0.1, 0.5, 0.9}) CHECK(std::abs(back.inverse_cdf(v) - std::sqrt(v)) < 1e-6);
}

TEST_CASE("quarter circle singular values of the Ginibre law") {
  const auto d = singular_value_density(ginibre_radial());
  for (double l = 0.1; l < 2.0; l += 0.1) CHECK(std::abs(d(l) - std::sqrt(4.0 - l * l) / pi) < 1e-5);
  CHECK(d.upper() == doctest::Approx(2.0));
}

TEST_CASE("products of Ginibre laws: F = x^(2/n)") {
  const RadialLaw two[] = {ginibre_radial(), ginibre_radial()};
  const auto p = isotropic_product(two);
  CHECK(p.exponent() == doctest::Approx(1.0));
  CHECK(planar_density(p, 0.25) == doctest::Approx(1.0 / (2.0 * pi * 0.25)));
  const auto q = power_law(ginibre_radial(), 3);
  CHECK(q.exponent() == doctest::Approx(2.0 / 3.0));
  CHECK(planar_density(q, 0.5) == doctest::Approx(std::pow(0.5, -4.0 / 3.0) / (3.0 * pi)));
}

TEST_CASE("product and power agree for a tabulated law") {
  const auto grid = hl_radial_from_s(hl_s_from_radial(ginibre_radial()), 0.0);
  REQUIRE(grid.kind() == RadialLaw::Kind::grid);
  const RadialLaw two[] = {grid, grid};
  const auto p = isotropic_product(two);
  const auto q = power_law(grid, 2);
  for (double x = 0.0; x <= 1.05; x += 0.01) CHECK(std::abs(p.cdf(x) - q.cdf(x)) < 1e-6);
}

TEST_CASE("Fuss-Catalan edges and Green's functions") {
  CHECK(fuss_catalan_edge(1) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fuss_catalan_edge(2) == doctest::Approx(6.75).epsilon(1e-12));
  CHECK(fuss_catalan_edge(3) == doctest::Approx(256.0 / 27.0).epsilon(1e-12));
  // n = 1: Wishart G(z) = (1 - sqrt(1 - 4/z)) / 2.
  for (cplx z : {cplx(5.0, 0.0), cplx(2.0, 1.0), cplx(-1.0, 0.5)}) {
    const cplx expected = (z - std::sqrt(z) * std::sqrt(z - 4.0)) / (2.0 * z);
    CHECK(std::abs(fuss_catalan_green(1, z) - expected) < 1e-10);
  }
  const auto d = fuss_catalan_density(2);
  for (double x : {0.1, 1.0, 3.0, 6.0})
    CHECK(std::abs(d(x) - wishart_product_closed_form_value(x)) < 1e-8 * wishart_product_closed_form_value(x));
}

TEST_CASE("singular value exponent near zero for F = x") {
  const auto d = singular_value_density(RadialLaw::power(1.0));
  CHECK(std::abs(fit_power_exponent(d, 1e-3, 1e-2) + 1.0 / 3.0) < 0.1 / 3.0);
}

TEST_CASE("point masses") {
  const auto law = RadialLaw::power(2.0, 1.0, 0.5);
  const auto pm = point_masses(law, 2);
  CHECK(pm.power == doctest::Approx(0.5));
  CHECK(pm.product == doctest::Approx(0.5));
  CHECK(law.shape() == RingShape::disk_with_point_mass);
  CHECK(law.cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("anti-Wishart factor: disk with an atom") {
  const auto s = s_transform_of_square(anti_wishart_density(0.5));
  const auto f = hl_radial_from_s(s, 0.5);
  CHECK(f.shape() == RingShape::disk_with_point_mass);
  CHECK(f.point_mass() == doctest::Approx(0.5));
  CHECK(f.outer_radius() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
}

TEST_CASE("step law is a ring of zero width") {
  const auto s = RadialLaw::step(2.0);
  CHECK(s.cdf(1.999) == 0.0);
  CHECK(s.cdf(2.0) == 1.0);
  CHECK(s.shape() == RingShape::ring);
  CHECK_THROWS_AS(singular_value_density(s), Error);
}
