#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "config.hpp"
#include "freeprod/density.hpp"
#include "freeprod/hermitian.hpp"
#include "freeprod/isotropic.hpp"
#include "freeprod/matrix_lab.hpp"
#include "freeprod/quaternionic.hpp"

namespace freeprod::cli {

namespace {

using json = nlohmann::ordered_json;

std::string with_suffix(const std::string& prefix, const char* suffix) { return prefix + suffix; }

json support_json(const SpectralDensity& d) {
  json s = json::array();
  for (const auto& iv : d.support()) s.push_back({iv.lo, iv.hi});
  return s;
}

std::vector<double> real_coefficients(const TruncatedSeries& s) {
  std::vector<double> out;
  for (cplx c : s.coeffs()) out.push_back(c.real());
  return out;
}

void write_line_density(const SpectralDensity& d, int points, const std::string& path) {
  double lo = d.support().front().lo, hi = d.support().back().hi;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  CsvWriter csv(path, {"lambda", "rho"});
  for (int k = 0; k < points; ++k) {
    const double x = lo + (hi - lo) * k / (points - 1);
    csv.row({x, d(x)});
  }
  csv.close();
}

// Semicircle when every cumulant past the second vanishes.
json recognise(const TruncatedSeries& r) {
  const auto c = r.with_offset_zero();
  for (int k = 2; k <= c.order(); ++k)
    if (std::abs(c[k]) > 1e-10) return nullptr;
  if (c.order() < 1 || c[1].real() <= 0.0) return nullptr;
  return {{"law", "semicircle"}, {"alpha", c[0].real()}, {"sigma", std::sqrt(c[1].real())}};
}

GaussianQR to_gaussian(const EnsembleSpec& s) {
  switch (s.kind) {
    case EnsembleKind::ginibre: return {0.0, 1.0, 0.0};
    case EnsembleKind::gue: return {0.0, 1.0, 1.0};
    case EnsembleKind::elliptic: return {0.0, 1.0, s.tau};
    case EnsembleKind::shifted_scaled: {
      GaussianQR g = to_gaussian(*s.base);
      g.q = s.shift + s.scale * g.q;
      g.sigma *= s.scale;
      return g;
    }
    default:
      throw Error(ErrorCode::invalid_argument, s.describe() + " is not a Gaussian factor");
  }
}

bool all_plain(const std::vector<EnsembleSpec>& f, EnsembleKind kind) {
  for (const auto& s : f)
    if (s.kind != kind) return false;
  return true;
}

}  // namespace

void run_density(const DensityOptions& o) {
  json side;
  side["law"] = o.law;
  if (o.law == "ginibre-product") {
    if (o.n < 1) throw Error(ErrorCode::invalid_argument, "-n must be >= 1");
    const RadialLaw law = RadialLaw::power(2.0 / o.n);
    const int points = o.points > 0 ? o.points : 251;
    const GridSpec grid{1.25 * law.outer_radius(), points};
    CsvWriter csv(with_suffix(o.out, ".csv"), {"re", "im", "rho"});
    for (int j = 0; j < points; ++j)
      for (int i = 0; i < points; ++i) {
        const cplx z = grid.point(i, j);
        double rho = std::abs(z) == 0.0 ? (law.exponent() < 2.0 ? INFINITY : planar_density(law, 1e-300))
                                        : planar_density(law, z);
        csv.row({z.real(), z.imag(), rho});
      }
    csv.close();
    side["n"] = o.n;
    side["shape"] = to_string(law.shape());
    side["point_mass_zero"] = law.point_mass();
    side["inner_radius"] = law.inner_radius();
    side["outer_radius"] = law.outer_radius();
    side["radial_cdf_exponent"] = law.exponent();
  } else {
    const SpectralDensity d = [&] {
      if (o.law == "semicircle") return semicircle(o.shift, o.scale);
      if (o.law == "free-poisson" || o.law == "wishart") return free_poisson(o.law == "wishart" ? 1.0 : o.ratio);
      if (o.law == "quarter-circle") return quarter_circle();
      if (o.law == "wishart-product") {
        if (o.n < 1) throw Error(ErrorCode::invalid_argument, "-n must be >= 1");
        return fuss_catalan_density(o.n);
      }
      throw Error(ErrorCode::invalid_argument, "unknown law '" + o.law + "'");
    }();
    write_line_density(d, o.points > 0 ? o.points : 441, with_suffix(o.out, ".csv"));
    side["description"] = d.describe();
    side["support"] = support_json(d);
    side["point_mass_zero"] = d.point_mass_zero();
  }
  write_json(with_suffix(o.out, ".json"), side);
}

void run_freeop(const FreeopOptions& o) {
  const SpectralDensity a = catalog_density(o.a), b = catalog_density(o.b);
  json side;
  side["op"] = o.op;
  side["a"] = o.a;
  side["b"] = o.b;
  if (o.op == "add") {
    const TransformFn r = free_add(r_transform(a, o.order), r_transform(b, o.order));
    side["route"] = "R";
    side["r_coefficients"] = real_coefficients(*r.series);
    side["moments"] = moments_of(r).m;
    side["catalog"] = recognise(*r.series);
    const SpectralDensity d = density_from_r(r);
    side["support"] = support_json(d);
    write_line_density(d, o.points, with_suffix(o.out, ".csv"));
  } else if (o.op == "mul") {
    try {
      const TransformFn s = free_multiply_s(s_transform(a, o.order), s_transform(b, o.order));
      side["route"] = "S";
      side["s_coefficients"] = real_coefficients(*s.series);
      side["moments"] = moments_of(s).m;
      const SpectralDensity d = density_from_s(s);
      side["support"] = support_json(d);
      side["point_mass_zero"] = d.point_mass_zero();
      write_line_density(d, o.points, with_suffix(o.out, ".csv"));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_first_moment) throw;
      // m1 = 0: the S transform does not exist; the R route still gives moments.
      const TransformFn r = free_multiply_r_series(r_transform(a, o.order), r_transform(b, o.order));
      const auto m = moments_of(r).m;
      bool zero = true;
      for (double v : m) zero = zero && std::abs(v) < 1e-12;
      side["route"] = "R";
      side["r_coefficients"] = real_coefficients(*r.series);
      side["moments"] = m;
      side["all_moments_zero"] = zero;
      std::cerr << "S route unavailable (" << e.what() << "); used the R route\n";
    }
  } else {
    throw Error(ErrorCode::invalid_argument, "freeop takes add or mul");
  }
  write_json(with_suffix(o.out, ".json"), side);
}

void run_simulate(const SimulateOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<EnsembleSpec> factors;
  if (!o.product.empty()) {
    std::stringstream in(o.product);
    std::string item;
    while (std::getline(in, item, ',')) factors.push_back(parse_ensemble(item, o.size, o.seed));
  } else {
    if (o.n_factors < 1) throw Error(ErrorCode::invalid_argument, "--n-factors must be >= 1");
    const auto spec = parse_ensemble(o.ensemble, o.size, o.seed);
    factors.assign(o.n_factors, spec);
  }
  if (o.kind != "eigen" && o.kind != "singular") throw Error(ErrorCode::invalid_argument, "--kind eigen|singular");
  const auto kind = o.kind == "eigen" ? SpectrumKind::eigen : SpectrumKind::singular;
  const auto sample = product_spectrum(factors, o.samples, kind, !o.power, o.threads);
  const int n = static_cast<int>(factors.size());

  ComparisonReport report;
  bool pass = true;
  if (o.against == "analytic") {
    if (all_plain(factors, EnsembleKind::ginibre) && kind == SpectrumKind::eigen) {
      report = compare(sample, RadialLaw::power(2.0 / n));
    } else if (all_plain(factors, EnsembleKind::ginibre)) {
      report = compare(sample, square_root_pushforward(fuss_catalan_density(n)));
    } else if (n == 1 && factors[0].kind == EnsembleKind::gue && kind == SpectrumKind::eigen) {
      report = compare(sample, semicircle(0.0, 1.0));
    } else if (n == 1 && factors[0].kind == EnsembleKind::wishart && kind == SpectrumKind::eigen) {
      report = compare(sample, wishart());
    } else {
      throw Error(ErrorCode::invalid_argument, "no analytic law for " + sample.source);
    }
    pass = pass && report.ks_radial < o.ks_tolerance;
  } else if (o.against != "none") {
    throw Error(ErrorCode::invalid_argument, "--against analytic|none");
  }

  std::optional<double> mass_inside;
  if (o.contour != "none") {
    std::function<bool(cplx)> inside;
    if (o.contour == "limacon") {
      inside = [](cplx z) { return std::abs(z) <= 1.0 + 2.0 * std::cos(std::arg(z)); };
    } else if (o.contour == "quat") {
      if (n != 2) throw Error(ErrorCode::invalid_argument, "--contour quat needs two factors");
      const auto a = to_gaussian(factors[0]), b = to_gaussian(factors[1]);
      const auto field = qmultiply_solve(a, b, default_grid(a, b, o.grid_points));
      auto contour = std::make_shared<Contour>(support_contour(field));
      mass_inside = field.mass_where([&](cplx z) { return contour->contains(z); });
      inside = [contour](cplx z) { return contour->contains(z); };
    } else {
      throw Error(ErrorCode::invalid_argument, "--contour limacon|quat|none");
    }
    const auto outliers = compare(sample, inside);
    report.outlier_fraction = outliers.outlier_fraction;
    pass = pass && report.outlier_fraction < o.outlier_tolerance;
  }

  CsvWriter csv(with_suffix(o.out, "_spectrum.csv"),
                kind == SpectrumKind::eigen ? std::vector<std::string>{"re", "im"} : std::vector<std::string>{"sigma"});
  for (cplx v : sample.values) {
    if (kind == SpectrumKind::eigen)
      csv.row({v.real(), v.imag()});
    else
      csv.row({v.real()});
  }
  csv.close();

  json doc;
  doc["ensemble"] = sample.source;
  doc["n_factors"] = n;
  doc["N"] = o.size;
  doc["samples"] = o.samples;
  doc["seed"] = o.seed;
  doc["ks_radial"] = report.ks_radial;
  doc["l1_density"] = report.l1_density;
  doc["outlier_fraction"] = report.outlier_fraction;
  if (mass_inside) doc["mass_inside_contour"] = *mass_inside;
  doc["near_zero_fraction"] = kind == SpectrumKind::eigen ? near_zero_fraction(sample, o.size) : 0.0;
  doc["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  doc["pass"] = pass;
  write_json(with_suffix(o.out, "_report.json"), doc);
  if (!pass) throw CommandFailure{exit_check_failed, "comparison failed; see " + o.out + "_report.json"};
}

void run_quat(const QuatOptions& o) {
  const GaussianQR a = parse_gaussian_qr(o.a), b = parse_gaussian_qr(o.b);
  const GridSpec grid = o.half_width > 0.0 ? GridSpec{o.half_width, o.points} : default_grid(a, b, o.points);
  const PlanarField field = qmultiply_solve(a, b, grid);

  CsvWriter csv(with_suffix(o.out, "_field.csv"), {"re", "im", "rho", "b_sq", "inside"});
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) {
      const auto k = field.index(i, j);
      const cplx z = grid.point(i, j);
      csv.row({z.real(), z.imag(), field.rho[k], field.b_sq[k], static_cast<double>(field.inside[k])});
    }
  csv.close();

  const Contour contour = support_contour(field);
  CsvWriter poly(with_suffix(o.out, "_contour.csv"), {"loop", "re", "im"});
  for (std::size_t l = 0; l < contour.loops.size(); ++l)
    for (cplx v : contour.loops[l]) poly.row({static_cast<double>(l), v.real(), v.imag()});
  poly.close();

  const int interior = (grid.points - 2) * (grid.points - 2);
  json doc;
  doc["a"] = describe(a);
  doc["b"] = describe(b);
  doc["half_width"] = grid.half_width;
  doc["points"] = grid.points;
  doc["h"] = grid.h();
  doc["mass"] = field.mass();
  doc["mass_inside_contour"] = field.mass_where([&](cplx z) { return contour.contains(z); });
  doc["unresolved"] = field.unresolved_count();
  doc["loops"] = contour.loops.size();
  doc["vertices"] = contour.vertex_count();
  write_json(with_suffix(o.out, ".json"), doc);
  if (field.unresolved_count() > 0.01 * interior)
    throw CommandFailure{exit_solver_coverage, std::to_string(field.unresolved_count()) + " unresolved grid points"};
}

}  // namespace freeprod::cli
