#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "freeprod/error.hpp"
#include "freeprod/hermitian.hpp"

using namespace freeprod;
using std::numbers::pi;

namespace {

// Brute force: enumerate all set partitions of {0..n-1}, keep the non-crossing ones.
double nc_moment(int n, const std::vector<double>& kappa) {
  std::vector<int> block(n, 0);
  double total = 0.0;
  std::function<void(int, int)> rec = [&](int pos, int blocks) {
    if (pos == n) {
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          for (int c = b + 1; c < n; ++c)
            for (int d = c + 1; d < n; ++d)
              if (block[a] == block[c] && block[b] == block[d] && block[a] != block[b]) return;
      std::vector<int> size(blocks, 0);
      for (int v : block) ++size[v];
      double term = 1.0;
      for (int s : size) term *= kappa[s - 1];
      total += term;
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      block[pos] = b;
      rec(pos + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  return total;
}

TransformFn semicircle_r() {
  TransformFn r;
  r.kind = TransformKind::r;
  r.series = TruncatedSeries::from_coefficients({0.0, 1.0});
  r.closed_form = [](cplx z) { return z; };
  r.support_radius = 2.0;
  return r;
}

}  // namespace

TEST_CASE("moment-cumulant maps agree with non-crossing partitions") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> kappa(8);
    for (auto& k : kappa) k = u(rng);
    const auto m = cumulants_to_moments({kappa});
    for (int n = 1; n <= 8; ++n) CHECK(std::abs(m(n) - nc_moment(n, kappa)) < 1e-10);
    const auto back = moments_to_cumulants(m);
    for (int n = 1; n <= 8; ++n) CHECK(std::abs(back(n) - kappa[n - 1]) < 1e-10);
  }
}

TEST_CASE("semicircle from R(z) = z") {
  const auto d = density_from_r(semicircle_r());
  CHECK(std::abs(d.lower() + 2.0) < 1e-6);
  CHECK(std::abs(d.upper() - 2.0) < 1e-6);
  for (double x : {-1.5, 0.0, 0.7, 1.9}) CHECK(std::abs(d(x) - std::sqrt(4.0 - x * x) / (2.0 * pi)) < 1e-6);
  const auto m = moments_from_density(semicircle(0.0, 1.0), 6);
  CHECK(std::abs(m(2) - 1.0) < 1e-10);
  CHECK(std::abs(m(4) - 2.0) < 1e-10);
  CHECK(std::abs(m(6) - 5.0) < 1e-10);
  CHECK(std::abs(m(3)) < 1e-12);
}

TEST_CASE("free Poisson cumulants are all equal to the ratio") {
  const auto r = r_transform(free_poisson(0.5), 8);
  for (int k = 0; k <= 7; ++k) CHECK(std::abs((*r.series)[k] - 0.5) < 1e-9);
}

TEST_CASE("semicircles add by variance") {
  const auto r = free_add(r_transform(semicircle(1.0, 0.5)), r_transform(semicircle(-1.0, 0.5)));
  CHECK(std::abs((*r.series)[0]) < 1e-12);
  CHECK(std::abs((*r.series)[1] - 0.5) < 1e-12);
  for (int k = 2; k <= r.series->order(); ++k) CHECK(std::abs((*r.series)[k]) < 1e-10);
}

TEST_CASE("Wishart S transform and its free square") {
  const auto s = s_transform(wishart());
  CHECK(std::abs((*s.series)[0] - 1.0) < 1e-14);
  CHECK(std::abs((*s.series)[1] + 1.0) < 1e-14);
  const auto s2 = free_multiply_s(s, s);
  for (int k = 0; k <= 6; ++k) CHECK(std::abs((*s2.series)[k] - std::pow(-1.0, k) * (k + 1)) < 1e-10);
  // S and R routes give the same moments.
  const auto via_r = moments_of(free_multiply_r_series(r_transform(wishart()), r_transform(wishart())));
  const auto via_s = moments_of(s2);
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(via_r(n) - via_s(n)) < 1e-8 * std::abs(via_s(n)));
  CHECK(std::abs(via_s(2) - 3.0) < 1e-10);  // Fuss-Catalan 1, 3, 12, 55
  CHECK(std::abs(via_s(3) - 12.0) < 1e-9);
}

TEST_CASE("centred semicircles: the S route is closed, the R route gives zero moments") {
  const auto g = semicircle(0.0, 1.0);
  CHECK_THROWS_AS(s_transform(g), Error);
  const auto m = moments_of(free_multiply_r_series(r_transform(g), r_transform(g)));
  for (int n = 1; n <= m.order(); ++n) CHECK(std::abs(m(n)) < 1e-12);
}

TEST_CASE("Hankel positivity") {
  CHECK(moments_from_density(semicircle(0.0, 1.0), 8).hankel_psd());
  CHECK_FALSE(MomentSequence{{0.0, -1.0, 0.0, 1.0}}.hankel_psd());
}

TEST_CASE("Green's function of the semicircle") {
  const cplx z(3.0, 0.0);
  CHECK(std::abs(green_from_density(semicircle(0.0, 1.0), z) - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-10);
  CHECK(std::abs(green_from_r(semicircle_r(), z) - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-12);
}

TEST_CASE("potential of the semicircle is x^2 / 2 up to a constant") {
  const auto d = semicircle(0.0, 1.0);
  CHECK(std::abs(potential_derivative(d, 0.5) - 0.5) < 1e-8);
}
