#include <cmath>
#include <numbers>

#include "doctest.h"
#include "freeprod/error.hpp"
#include "freeprod/matrix_lab.hpp"
#include "freeprod/rng.hpp"
#include "freeprod/stats.hpp"

using namespace freeprod;

TEST_CASE("sampling is a pure function of (spec, index, factor)") {
  const auto spec = EnsembleSpec::ginibre(20, 99);
  CHECK(sample_matrix(spec, 3, 1) == sample_matrix(spec, 3, 1));
  CHECK(sample_matrix(spec, 3, 1) != sample_matrix(spec, 3, 2));
  CHECK(sample_matrix(spec, 3, 1) != sample_matrix(spec, 4, 1));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("pooled spectra do not depend on the thread count") {
  const EnsembleSpec specs[] = {EnsembleSpec::gue(30, 5), EnsembleSpec::ginibre(30, 5)};
  const auto one = product_spectrum(specs, 6, SpectrumKind::eigen, true, 1);
  const auto four = product_spectrum(specs, 6, SpectrumKind::eigen, true, 4);
  CHECK(one.values == four.values);
}

TEST_CASE("Hermitian samplers are exactly Hermitian with a real spectrum") {
  for (const auto& spec : {EnsembleSpec::gue(40, 1), EnsembleSpec::wishart(40, 1)}) {
    const auto m = sample_matrix(spec, 0);
    CHECK(m == m.adjoint());
    const auto s = spectrum(m, SpectrumKind::eigen);
    for (cplx v : s.values) CHECK(std::abs(v.imag()) < 1e-10 * m.norm());
  }
  const auto w = spectrum(sample_matrix(EnsembleSpec::wishart(40, 2), 0), SpectrumKind::eigen);
  for (cplx v : w.values) CHECK(v.real() > -1e-12);
}

TEST_CASE("Haar unitaries") {
  const auto u = sample_matrix(EnsembleSpec::haar_unitary(60, 4), 0);
  CHECK((u.adjoint() * u - CMatrix::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-12);
  for (cplx v : spectrum(u, SpectrumKind::eigen).values) CHECK(std::abs(std::abs(v) - 1.0) < 1e-10);
}

TEST_CASE("Haar invariance: U and VU have the same eigenangle law") {
  const auto haar = EnsembleSpec::haar_unitary(50, 8);
  std::vector<double> a, b;
  for (int k = 0; k < 20; ++k) {
    const auto u = sample_matrix(haar, k, 0);
    const auto v = sample_matrix(haar, k, 1);
    for (cplx x : spectrum(u, SpectrumKind::eigen).values) a.push_back(std::arg(x));
    for (cplx x : spectrum(CMatrix(v * u), SpectrumKind::eigen).values) b.push_back(std::arg(x));
  }
  CHECK(stats::ks_two_sample_pvalue(stats::ks_two_sample(a, b), a.size(), b.size()) > 0.01);
}

TEST_CASE("elliptic at alpha = pi/4 has Ginibre entries") {
  const auto e = sample_matrix(EnsembleSpec::elliptic_alpha(80, std::numbers::pi / 4.0, 6), 0);
  const auto g = sample_matrix(EnsembleSpec::ginibre(80, 7), 0);
  std::vector<double> ea, ga;
  for (Eigen::Index j = 0; j < 80; ++j)
    for (Eigen::Index i = 0; i < 80; ++i)
      if (i != j) {
        ea.push_back(e(i, j).real());
        ga.push_back(g(i, j).real());
      }
  CHECK(stats::ks_two_sample_pvalue(stats::ks_two_sample(ea, ga), ea.size(), ga.size()) > 0.01);
}

TEST_CASE("singular values are sorted and non-negative") {
  const auto s = spectrum(sample_matrix(EnsembleSpec::ginibre(25, 2), 0), SpectrumKind::singular);
  REQUIRE(s.values.size() == 25);
  for (std::size_t k = 1; k < s.values.size(); ++k) CHECK(s.values[k - 1].real() >= s.values[k].real());
  CHECK(s.values.back().real() >= 0.0);
}

TEST_CASE("diagonal sampling follows the density") {
  const auto spec = EnsembleSpec::diagonal(400, semicircle(0.0, 1.0), 3);
  const auto m = sample_matrix(spec, 0);
  CHECK(m.isDiagonal());
  const EnsembleSpec one[] = {spec};
  const auto s = product_spectrum(one, 5, SpectrumKind::eigen);
  CHECK(compare(s, semicircle(0.0, 1.0)).ks_radial < 0.03);
}

TEST_CASE("anti-Wishart isotropic factor carries its atom") {
  const auto spec = parse_ensemble("isotropic:anti-wishart:0.5", 200, 9);
  const EnsembleSpec one[] = {spec};
  const auto s = product_spectrum(one, 2, SpectrumKind::singular);
  int zeros = 0;
  for (cplx v : s.values) zeros += v.real() < 1e-8;
  CHECK(std::abs(zeros / 400.0 - 0.5) < 0.1);
}

TEST_CASE("empirical CDF and KS statistics") {
  SpectrumSample single;
  single.values = {cplx(0.3, 0.4)};
  const auto f = empirical_radial_cdf(single);
  CHECK(f(0.49) == 0.0);
  CHECK(f(0.5) == 1.0);
  CHECK(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(stats::ks_one_sample({0.25, 0.75}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.25));
  single.kind = SpectrumKind::singular;
  CHECK_THROWS_AS(empirical_radial_cdf(single), Error);
}

TEST_CASE("comparison against an analytic law sampled exactly gives KS near 0") {
  // Moduli at the quantiles of F(x) = x^2.
  SpectrumSample s;
  const int n = 1000;
  for (int k = 0; k < n; ++k) s.values.push_back(std::sqrt((k + 0.5) / n));
  const auto r = compare(s, ginibre_radial());
  CHECK(r.ks_radial <= 0.5 / n + 1e-12);
}

TEST_CASE("kind checks") {
  SpectrumSample s;
  s.values = {cplx(0.0, 1.0), cplx(0.0, -1.0)};
  CHECK_THROWS_AS(compare(s, semicircle(0.0, 1.0)), Error);
  s.kind = SpectrumKind::singular;
  CHECK_THROWS_AS(compare(s, ginibre_radial()), Error);
}

TEST_CASE("ensemble strings") {
  const auto e = parse_ensemble("1+0.5*gue", 10, 1);
  CHECK(e.kind == EnsembleKind::shifted_scaled);
  CHECK(e.shift == 1.0);
  CHECK(e.scale == 0.5);
  CHECK(e.base->kind == EnsembleKind::gue);
  const auto m = sample_matrix(e, 0);
  const auto base = sample_matrix(*e.base, 0);
  CHECK((m - (CMatrix::Identity(10, 10) + 0.5 * base)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(parse_ensemble("elliptic:0.3", 10, 1).tau == 0.3);
  CHECK_THROWS_AS(parse_ensemble("bogus", 10, 1), Error);
  CHECK_THROWS_AS(parse_ensemble("ginibre", 1, 1), Error);
}
