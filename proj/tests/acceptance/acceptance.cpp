// One PASS/FAIL line per acceptance criterion. Analytic expectations come
// from closed forms or brute-force oracles written here, not from the library.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "freeprod/density.hpp"
#include "freeprod/error.hpp"
#include "freeprod/hermitian.hpp"
#include "freeprod/isotropic.hpp"
#include "freeprod/matrix_lab.hpp"
#include "freeprod/quaternionic.hpp"
#include "freeprod/stats.hpp"

using namespace freeprod;
using std::numbers::pi;

namespace {

constexpr int mc_size = 1000;
constexpr int mc_samples = 10;
constexpr std::uint64_t mc_seed = 20240611;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records "name=value (<limit)" and folds the comparison into pass.
  void below(const std::string& name, double value, double limit) {
    const bool ok = value < limit;
    pass = pass && ok;
    detail << ' ' << name << '=' << value << (ok ? " (<" : " (NOT <") << limit << ')';
  }
  void within(const std::string& name, double value, double target, double tol) {
    const bool ok = std::abs(value - target) <= tol;
    pass = pass && ok;
    detail << ' ' << name << '=' << value << (ok ? " (" : " (NOT ") << target << "+-" << tol << ')';
  }
  void at_least(const std::string& name, double value, double limit) {
    const bool ok = value >= limit;
    pass = pass && ok;
    detail << ' ' << name << '=' << value << (ok ? " (>=" : " (NOT >=") << limit << ')';
  }
};

int failures = 0;

void criterion(const char* id, const char* title, double time_limit, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail.precision(4);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " exception: " << e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.below("time_s", seconds, time_limit);
  if (!o.pass) ++failures;
  std::printf("%s %-4s %s:%s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str());
  std::fflush(stdout);
}

// Sum over non-crossing partitions of {1..n} of the product of block cumulants.
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

double semicircle_pdf(double x) { return x * x < 4.0 ? std::sqrt(4.0 - x * x) / (2.0 * pi) : 0.0; }

// Closed-form density of the free square of the Wishart law on (0, 27/4).
double ww_pdf(double x) {
  if (!(x > 0.0 && x < 6.75)) return 0.0;
  const double c = 27.0 + std::sqrt(27.0 * (27.0 - 4.0 * x));
  return std::cbrt(2.0) * std::sqrt(3.0) / (12.0 * pi) * (std::cbrt(2.0) * std::pow(c, 2.0 / 3.0) - 6.0 * std::cbrt(x)) /
         (std::pow(x, 2.0 / 3.0) * std::cbrt(c));
}

// Wishart Green's function, branch with G ~ 1/z.
cplx wishart_green(cplx z) { return (z - std::sqrt(z) * std::sqrt(z - 4.0)) / (2.0 * z); }

std::vector<EnsembleSpec> repeat(const EnsembleSpec& s, int n) { return std::vector<EnsembleSpec>(n, s); }

}  // namespace

int main() {
  std::printf("acceptance: MC at N=%d x %d samples, seed %llu\n", mc_size, mc_samples,
              static_cast<unsigned long long>(mc_seed));

  criterion("C1", "semicircle pipeline R(z)=z -> G -> rho", 1.0, [](Outcome& o) {
    TransformFn r;
    r.kind = TransformKind::r;
    r.series = TruncatedSeries::from_coefficients({0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    r.closed_form = [](cplx z) { return z; };
    r.support_radius = 2.0;
    const SpectralDensity d = density_from_r(r);
    double sup = 0.0;
    for (int k = 0; k <= 3800; ++k) {
      const double x = -1.9 + 3.8 * k / 3800.0;
      sup = std::max(sup, std::abs(d(x) - semicircle_pdf(x)));
    }
    o.below("sup_err", sup, 1e-6);
    const MomentSequence m = moments_of(r);
    o.within("m2", m(2), 1.0, 1e-8);
    o.within("m4", m(4), 2.0, 1e-8);
    o.within("m6", m(6), 5.0, 1e-8);
  });

  criterion("C2", "moment-cumulant bijection vs non-crossing partitions", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> kappa(8), m(8);
      for (auto& k : kappa) k = u(rng);
      for (int n = 1; n <= 8; ++n) m[n - 1] = nc_moment(n, kappa);
      const auto forward = cumulants_to_moments({kappa});
      const auto backward = moments_to_cumulants({m});
      for (int n = 1; n <= 8; ++n) {
        worst = std::max(worst, std::abs(forward(n) - m[n - 1]));
        worst = std::max(worst, std::abs(backward(n) - kappa[n - 1]));
      }
    }
    o.below("max_dev", worst, 1e-10);
  });

  criterion("C3", "Wishart x Wishart via S = 1/(1+z)^2", 5.0, [](Outcome& o) {
    const TransformFn s = free_multiply_s(s_transform(wishart()), s_transform(wishart()));
    double coeff = 0.0;
    for (int k = 0; k <= 8; ++k) coeff = std::max(coeff, std::abs((*s.series)[k] - std::pow(-1.0, k) * (k + 1)));
    o.below("s_coeff_err", coeff, 1e-10);
    const SpectralDensity d = density_from_s(s);
    double rel = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x = 6.75 * (k + 0.5) / 1000.0;
      const double expected = ww_pdf(x);
      rel = std::max(rel, std::abs(d(x) - expected) / expected);
    }
    o.below("rel_err", rel, 1e-8);
    o.within("edge", d.upper(), 6.75, 1e-6);
  });

  criterion("C4", "Haagerup-Larsen round trip for the Ginibre law", 5.0, [](Outcome& o) {
    const SpectralDensity quarter = singular_value_density(ginibre_radial());
    double sup = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const double x = 2.0 * (k + 0.5) / 2000.0;
      sup = std::max(sup, std::abs(quarter(x) - std::sqrt(std::max(0.0, 4.0 - x * x)) / pi));
    }
    o.below("quarter_circle_sup", sup, 1e-5);
    const RadialLaw back = hl_radial_from_s(s_transform_of_square(quarter_circle()), 0.0);
    double inv = 0.0;
    for (int k = 0; k <= 1100; ++k) {
      const double x = 1.1 * k / 1100.0;
      inv = std::max(inv, std::abs(back.cdf(x) - std::min(1.0, x * x)));
    }
    o.below("F_sup", inv, 1e-6);
  });

  criterion("C5", "Ginibre products: F = x^(2/n), MC radial KS", 300.0, [](Outcome& o) {
    for (int n = 1; n <= 3; ++n) {
      const RadialLaw law = power_law(ginibre_radial(), n);
      double err = 0.0;
      for (int k = 0; k <= 100; ++k) err = std::max(err, std::abs(law.cdf(k / 100.0) - std::pow(k / 100.0, 2.0 / n)));
      o.below("F_err_n" + std::to_string(n), err, 1e-10);
      const auto specs = repeat(EnsembleSpec::ginibre(mc_size, mc_seed), n);
      o.below("ks_n" + std::to_string(n), compare(product_spectrum(specs, mc_samples, SpectrumKind::eigen), law).ks_radial,
              0.02);
    }
  });

  criterion("C6", "Fuss-Catalan Green's functions and Ginibre^2 singular values", 180.0, [](Outcome& o) {
    double rel1 = 0.0, rel2 = 0.0;
    for (cplx z : {cplx(5.0, 0.0), cplx(2.0, 1.0), cplx(-1.0, 0.5), cplx(0.5, 0.1), cplx(10.0, -3.0)})
      rel1 = std::max(rel1, std::abs(fuss_catalan_green(1, z) - wishart_green(z)) / std::abs(wishart_green(z)));
    const SpectralDensity fc1 = fuss_catalan_density(1), fc2 = fuss_catalan_density(2);
    for (int k = 0; k < 1000; ++k) {
      const double x1 = 4.0 * (k + 0.5) / 1000.0, x2 = 6.75 * (k + 0.5) / 1000.0;
      const double w = std::sqrt((4.0 - x1) / x1) / (2.0 * pi);
      rel1 = std::max(rel1, std::abs(fc1(x1) - w) / w);
      rel2 = std::max(rel2, std::abs(fc2(x2) - ww_pdf(x2)) / ww_pdf(x2));
    }
    o.below("rel_n1", rel1, 1e-8);
    o.below("rel_n2", rel2, 1e-8);
    const auto specs = repeat(EnsembleSpec::ginibre(mc_size, mc_seed + 1), 2);
    const auto sv = product_spectrum(specs, mc_samples, SpectrumKind::singular);
    o.below("ks_singular", compare(sv, square_root_pushforward(fc2)).ks_radial, 0.02);
  });

  criterion("C7", "quaternionic Ginibre x Ginibre at 257^2", 120.0, [](Outcome& o) {
    const GridSpec grid{1.25, 257};
    const auto f = qmultiply_solve(ginibre_qr(), ginibre_qr(), grid);
    double sup = 0.0;
    for (int j = 1; j < grid.points - 1; ++j)
      for (int i = 1; i < grid.points - 1; ++i) {
        const double r = std::abs(grid.point(i, j));
        if (r >= 0.1 && r <= 0.9) sup = std::max(sup, std::abs(f.rho[f.index(i, j)] - 1.0 / (2.0 * pi * r)));
      }
    o.below("rho_sup", sup, 5.0 * grid.h() + 1e-15);
    const auto c = support_contour(f);
    o.below("contour_dist", c.max_distance_to([](cplx z) { return std::abs(std::abs(z) - 1.0); }), 2.0 * grid.h());
    const auto f11 = qmultiply_solve({0.0, 1.0, 1.0}, {0.0, 1.0, 1.0}, grid);
    const auto f55 = qmultiply_solve({0.0, 1.0, 0.5}, {0.0, 1.0, -0.5}, grid);
    double dg = 0.0;
    for (std::size_t k = 0; k < f.g.size(); ++k) {
      dg = std::max({dg, std::abs(f11.g[k] - f.g[k]), std::abs(f55.g[k] - f.g[k])});
      dg = std::max({dg, std::abs(f11.rho[k] - f.rho[k]), std::abs(f55.rho[k] - f.rho[k])});
    }
    o.below("tau_field_diff", dg, 1e-6);
  });

  criterion("C8", "limacon for (1+X1)(1+X2)", 300.0, [](Outcome& o) {
    const GaussianQR one{1.0, 1.0, 0.0};
    const auto grid = default_grid(one, one, 257);
    const auto c = support_contour(qmultiply_solve(one, one, grid));
    o.below("contour_dist", c.max_distance_to(limacon_distance), 2.0 * grid.h());
    // The support is the whole region inside the outer loop; the inner loop is populated.
    const auto inside = [](cplx z) { return std::abs(z) <= 1.0 + 2.0 * std::cos(std::arg(z)); };
    double fraction[2];
    const int sizes[2] = {100, mc_size};
    for (int k = 0; k < 2; ++k) {
      const auto specs = repeat(parse_ensemble("1+ginibre", sizes[k], mc_seed + 2), 2);
      fraction[k] = compare(product_spectrum(specs, mc_samples, SpectrumKind::eigen), inside).outlier_fraction;
    }
    o.below("outliers_N1000", fraction[1], 0.02);
    o.below("outliers_N1000_vs_N100", fraction[1], fraction[0]);
  });

  criterion("C9", "free addition u'au + v'bv of semicircles", 120.0, [](Outcome& o) {
    const SpectralDensity a = semicircle(0.0, 1.0), b = semicircle(0.0, 1.0);
    const SpectralDensity analytic = density_from_r(free_add(r_transform(a), r_transform(b)));
    double sup = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double x = -2.8 + 5.6 * k / 400.0;
      sup = std::max(sup, std::abs(analytic(x) - semicircle_pdf(x / std::sqrt(2.0)) / std::sqrt(2.0)));
    }
    o.below("analytic_sup", sup, 1e-6);
    const EnsembleSpec factors[] = {EnsembleSpec::diagonal(mc_size, a, mc_seed + 3),
                                    EnsembleSpec::diagonal(mc_size, b, mc_seed + 4)};
    o.below("ks", compare(free_sum_spectrum(factors, mc_samples), analytic).ks_radial, 0.02);
  });

  criterion("C10", "product vs power; point mass of anti-Wishart factors", 300.0, [](Outcome& o) {
    const auto specs = repeat(EnsembleSpec::ginibre(mc_size, mc_seed + 5), 3);
    const auto product = product_spectrum(specs, mc_samples, SpectrumKind::eigen, true);
    const auto power = product_spectrum(specs, mc_samples, SpectrumKind::eigen, false);
    o.below("ks_two_sample", stats::ks_two_sample(product.moduli(), power.moduli()), 0.03);
    const auto iso = repeat(parse_ensemble("isotropic:anti-wishart:0.5", mc_size, mc_seed + 6), 2);
    const auto p2 = product_spectrum(iso, mc_samples, SpectrumKind::eigen, true);
    const auto q2 = product_spectrum(iso, mc_samples, SpectrumKind::eigen, false);
    o.within("near_zero_product", near_zero_fraction(p2, mc_size), 0.75, 0.03);
    o.within("near_zero_square", near_zero_fraction(q2, mc_size), 0.5, 0.03);
  });

  criterion("C11", "singular value exponent at zero for s = 1", 30.0, [](Outcome& o) {
    const SpectralDensity d = singular_value_density(RadialLaw::power(1.0));
    o.within("exponent", fit_power_exponent(d, 1e-3, 1e-2), -1.0 / 3.0, 0.1 / 3.0);
  });

  criterion("F2", "(1+X)(1+H): solver mass in own contour, MC containment", 600.0, [](Outcome& o) {
    const GaussianQR x{1.0, 1.0, 0.0}, h{1.0, 1.0, 1.0};
    const auto field = qmultiply_solve(x, h, default_grid(x, h, 513));
    const auto c = support_contour(field);
    const auto inside = [&](cplx z) { return c.contains(z); };
    o.at_least("mass_inside", field.mass_where(inside), 0.98);
    const EnsembleSpec specs[] = {parse_ensemble("1+ginibre", mc_size, mc_seed + 7),
                                  parse_ensemble("1+gue", mc_size, mc_seed + 8)};
    o.below("outliers", compare(product_spectrum(specs, mc_samples, SpectrumKind::eigen), inside).outlier_fraction,
            0.02);
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
