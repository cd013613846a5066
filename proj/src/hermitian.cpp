#include "freeprod/hermitian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "freeprod/error.hpp"
#include "freeprod/quadrature.hpp"

namespace freeprod {

namespace {

using std::numbers::pi;
bool finite(cplx x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

TruncatedSeries real_series(const std::vector<double>& values, int offset) {
  std::vector<cplx> c(offset, 0.0);
  for (double v : values) c.emplace_back(v);
  return TruncatedSeries(std::move(c), static_cast<int>(values.size()) + offset - 1, offset);
}

std::vector<double> real_coefficients(const TruncatedSeries& s, int from, int to) {
  std::vector<double> out;
  for (int k = from; k <= to; ++k) out.push_back(s[k].real());
  return out;
}

double radius_from_moments(const MomentSequence& m) {
  double r = 0.0;
  for (int n = 1; n <= m.order(); ++n) r = std::max(r, std::pow(std::abs(m(n)), 1.0 / n));
  return std::max(2.0 * r, 1e-3);
}

// Moments implied by whatever series a transform carries.
std::optional<MomentSequence> series_moments(const TransformFn& t) {
  if (!t.series) return std::nullopt;
  try {
    return moments_of(t);
  } catch (const Error&) {
    return std::nullopt;
  }
}

double radius_of(const TransformFn& t) {
  if (t.support_radius > 0.0) return t.support_radius;
  if (auto m = series_moments(t)) return radius_from_moments(*m);
  throw Error(ErrorCode::invalid_argument, "transform carries neither a support radius nor a series");
}

// Pointwise inverse: solve f(x) = w for x, seeded at x0.
std::optional<cplx> invert_pointwise(const ComplexFn& f, cplx w, cplx x0) {
  const auto r = newton_solve([&](cplx x) { return f(x) - w; }, x0, {}, 60, 1e-14);
  if (!r.converged || !finite(r.root)) return std::nullopt;
  return r.root;
}

void require_kind(const TransformFn& t, TransformKind kind) {
  if (t.kind != kind)
    throw Error(ErrorCode::kind_mismatch, "expected a " + to_string(kind) + " transform, got " + to_string(t.kind));
}

cplx semicircle_green(double alpha, double sigma, cplx z) {
  const cplx w = z - alpha;
  return (w - std::sqrt(w - 2.0 * sigma) * std::sqrt(w + 2.0 * sigma)) / (2.0 * sigma * sigma);
}

cplx free_poisson_green(double r, cplx z) {
  const double s = std::sqrt(r);
  const double lo = (1.0 - s) * (1.0 - s), hi = (1.0 + s) * (1.0 + s);
  return (z + 1.0 - r - std::sqrt(z - lo) * std::sqrt(z - hi)) / (2.0 * z);
}

std::shared_ptr<const BranchTracker> wishart_product_tracker() {
  return std::make_shared<const BranchTracker>(
      [](cplx z, cplx g) { return z * z * g * g * g - z * g + 1.0; }, 27.0 / 4.0,
      [](cplx z) { return std::vector<cplx>{1.0, -z, 0.0, z * z}; });
}

// Fixed point X = 1/Y(z X) for series, used in both R -> S and S -> R.
TruncatedSeries reciprocal_fixed_point(const TruncatedSeries& y) {
  const int order = y.order();
  const cplx y0 = y[0];
  if (std::abs(y0) < 1e-14) throw Error(ErrorCode::zero_first_moment, "constant term vanishes; S transform undefined");
  auto x = TruncatedSeries::constant(1.0 / y0, order);
  for (int it = 0; it <= order; ++it) {
    const auto inner = series_shift_up(x);
    x = series_reciprocal(series_compose(y.with_offset_zero(), inner));
  }
  return x;
}

}  // namespace

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::green: return "Green";
    case TransformKind::phi: return "Phi";
    case TransformKind::chi: return "Chi";
    case TransformKind::r: return "R";
    case TransformKind::s: return "S";
  }
  return "?";
}

bool MomentSequence::hankel_psd(double tolerance) const {
  const int half = order() / 2;
  Eigen::MatrixXd h(half + 1, half + 1);
  for (int i = 0; i <= half; ++i)
    for (int j = 0; j <= half; ++j) h(i, j) = (*this)(i + j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  const double top = solver.eigenvalues().cwiseAbs().maxCoeff();
  return solver.eigenvalues().minCoeff() >= -tolerance * std::max(1.0, top);
}

cplx TransformFn::operator()(cplx z) const {
  if (closed_form) return closed_form(z);
  if (!series) throw Error(ErrorCode::missing_closed_form, "transform has no representation");
  if (kind == TransformKind::green) return series->evaluate(1.0 / z) / z;
  return series->evaluate(z);
}

// ---------------------------------------------------------------------------
// density <-> Green

cplx green_from_density(const SpectralDensity& d, cplx z) {
  const double p0 = d.point_mass_zero();
  if (p0 > 0.0 && std::abs(z) < epsilon_support)
    throw Error(ErrorCode::point_on_support, "z sits on the point mass at zero");
  cplx total = (p0 > 0.0) ? cplx(p0) / z : cplx(0.0);
  for (const auto& iv : d.support()) {
    const double x = z.real(), y = z.imag();
    const bool above = x >= iv.lo && x <= iv.hi;
    const double dist = above ? std::abs(y) : std::min(std::abs(z - iv.lo), std::abs(z - iv.hi));
    if (dist < epsilon_support)
      throw Error(ErrorCode::point_on_support, "z is within epsilon of the support");
    if (above && x > iv.lo && x < iv.hi && std::abs(y) < 0.5 * iv.width()) {
      // Subtract rho(x) so the remaining integrand stays bounded as z approaches the axis.
      const double rx = d(x);
      const auto g = [&](double l) -> cplx { return (d(l) - rx) / (z - l); };
      total += quad::integrate_edges_complex(g, iv.lo, x, 1e-12) + quad::integrate_edges_complex(g, x, iv.hi, 1e-12);
      total += rx * std::log((z - iv.lo) / (z - iv.hi));
    } else {
      total += quad::integrate_edges_complex([&](double l) -> cplx { return d(l) / (z - l); }, iv.lo, iv.hi, 1e-12);
    }
  }
  return total;
}

double density_from_green(const TransformFn& green, double lambda, double tolerance) {
  require_kind(green, TransformKind::green);
  if (green.boundary) return std::max(0.0, -green.boundary(lambda).imag() / pi);
  if (!green.closed_form)
    throw Error(ErrorCode::missing_closed_form, "Stieltjes inversion needs a callable Green's function");
  // Neville extrapolation to eps = 0 over eps = 1e-3 .. 1e-7.
  constexpr int n = 5;
  std::array<double, n> eps{};
  std::array<double, n> table{};
  for (int k = 0; k < n; ++k) {
    eps[k] = std::pow(10.0, -3.0 - k);
    table[k] = -green.closed_form(cplx(lambda, eps[k])).imag() / pi;
  }
  double previous = table[n - 1];
  for (int level = 1; level < n; ++level) {
    for (int k = n - 1; k >= level; --k)
      table[k] = (eps[k - level] * table[k] - eps[k] * table[k - 1]) / (eps[k - level] - eps[k]);
    if (level == n - 1) break;
    previous = table[n - 1];
  }
  const double value = table[n - 1];
  if (!std::isfinite(value) || std::abs(value - previous) > tolerance * (1.0 + std::abs(value)))
    throw Error(ErrorCode::no_convergence, "Stieltjes extrapolation did not settle at lambda=" + std::to_string(lambda));
  return std::max(0.0, value);
}

MomentSequence moments_from_density(const SpectralDensity& d, int order) {
  if (d.support_radius() > 1e12) throw Error(ErrorCode::unbounded_support, "moments need a bounded support");
  MomentSequence m;
  for (int n = 1; n <= order; ++n) {
    double total = 0.0;
    for (const auto& iv : d.support())
      total += quad::integrate_edges([&](double l) { return d(l) * std::pow(l, n); }, iv.lo, iv.hi, 1e-13);
    m.m.push_back(total);
  }
  return m;
}

// ---------------------------------------------------------------------------
// moments <-> free cumulants

FreeCumulantSequence moments_to_cumulants(const MomentSequence& m) {
  const int k = m.order();
  if (k == 0) return {};
  // psi = z M(z); C(y) = y / psi^{-1}(y).
  std::vector<double> psi{0.0, 1.0};
  psi.insert(psi.end(), m.m.begin(), m.m.end());
  const auto inverse = series_revert(real_series(psi, 0));
  const auto c = series_reciprocal(series_shift_down(inverse));
  return {real_coefficients(c, 1, k)};
}

MomentSequence cumulants_to_moments(const FreeCumulantSequence& kappa) {
  const int k = kappa.order();
  if (k == 0) return {};
  std::vector<double> c{1.0};
  c.insert(c.end(), kappa.kappa.begin(), kappa.kappa.end());
  // y / C(y) inverts to psi = z M(z).
  std::vector<cplx> coeffs{0.0};
  const auto rc = series_reciprocal(real_series(c, 0));
  for (int j = 0; j <= k; ++j) coeffs.push_back(rc[j]);
  const auto psi = series_revert(TruncatedSeries(std::move(coeffs), k + 1, 0));
  return {real_coefficients(psi, 2, k + 1)};
}

// ---------------------------------------------------------------------------
// catalog transforms

TransformFn green_from_moments(const MomentSequence& m) {
  std::vector<double> c{1.0};
  c.insert(c.end(), m.m.begin(), m.m.end());
  TransformFn t;
  t.kind = TransformKind::green;
  t.series = real_series(c, 0);
  return t;
}

TransformFn r_from_cumulants(const FreeCumulantSequence& kappa) {
  if (kappa.order() == 0) throw Error(ErrorCode::invalid_argument, "need at least one cumulant");
  TransformFn t;
  t.kind = TransformKind::r;
  t.series = real_series(kappa.kappa, 0);
  return t;
}

MomentSequence moments_of(const TransformFn& t) {
  if (!t.series) throw Error(ErrorCode::missing_closed_form, "moments need a series representation");
  switch (t.kind) {
    case TransformKind::green:
      return {real_coefficients(*t.series, 1, t.series->order())};
    case TransformKind::phi:
      return {real_coefficients(*t.series, 1, t.series->order())};
    case TransformKind::r:
      return cumulants_to_moments({real_coefficients(*t.series, 0, t.series->order())});
    case TransformKind::s:
      return moments_of(s_r_convert(t));
    case TransformKind::chi: {
      TransformFn phi;
      phi.kind = TransformKind::phi;
      phi.series = series_revert(*t.series);
      return moments_of(phi);
    }
  }
  return {};
}

TransformFn point_mass_green(double alpha, int order) {
  std::vector<double> m;
  for (int n = 1; n <= order; ++n) m.push_back(std::pow(alpha, n));
  auto t = green_from_moments({m});
  t.closed_form = [alpha](cplx z) { return 1.0 / (z - alpha); };
  t.support_radius = std::max(std::abs(alpha), 1e-3);
  t.atom_at_zero = (alpha == 0.0) ? 1.0 : 0.0;
  return t;
}

TransformFn constant_transform(TransformKind kind, cplx value, int order) {
  TransformFn t;
  t.kind = kind;
  std::vector<cplx> c(order + 1, 0.0);
  c[0] = value;
  t.series = TruncatedSeries(std::move(c), order, 0);
  t.closed_form = [value](cplx) { return value; };
  return t;
}

TransformFn green_transform(const SpectralDensity& d, int order) {
  TransformFn t;
  t.kind = TransformKind::green;
  t.support_radius = d.support_radius();
  t.atom_at_zero = d.point_mass_zero();
  const auto quadrature_form = [d](cplx z) { return green_from_density(d, z); };
  const auto principal_value = [d](double l) -> cplx {
    for (const auto& iv : d.support()) {
      if (l > iv.lo && l < iv.hi) return {0.5 * potential_derivative(d, l), -pi * d(l)};
    }
    return green_from_density(d, cplx(l, 0.0));
  };
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CatalogForm>) {
          switch (f.law) {
            case CatalogLaw::semicircle: {
              const double a = f.a, s = f.b;
              t.closed_form = [a, s](cplx z) { return semicircle_green(a, s, z); };
              t.boundary = [a, s](double l) { return semicircle_green(a, s, cplx(l, 0.0)); };
              std::vector<double> kappa(order, 0.0);
              kappa[0] = a;
              if (order > 1) kappa[1] = s * s;
              t.series = green_from_moments(cumulants_to_moments({kappa})).series;
              break;
            }
            case CatalogLaw::free_poisson: {
              const double r = f.a;
              t.closed_form = [r](cplx z) { return free_poisson_green(r, z); };
              t.boundary = [r](double l) { return free_poisson_green(r, cplx(l, 0.0)); };
              t.series = green_from_moments(cumulants_to_moments({std::vector<double>(order, r)})).series;
              break;
            }
            case CatalogLaw::wishart_product: {
              const auto tracker = wishart_product_tracker();
              t.closed_form = [tracker](cplx z) { return tracker->evaluate(z); };
              t.boundary = [tracker](double l) { return tracker->boundary_value(l); };
              std::vector<double> m;
              for (int n = 1; n <= order; ++n) {
                // Fuss-Catalan numbers binom(3n, n) / (2n + 1).
                double b = 1.0;
                for (int j = 1; j <= n; ++j) b = b * (2.0 * n + j) / j;
                m.push_back(b / (2.0 * n + 1.0));
              }
              t.series = green_from_moments({m}).series;
              break;
            }
            case CatalogLaw::quarter_circle:
              t.closed_form = quadrature_form;
              t.boundary = principal_value;
              t.series = green_from_moments(moments_from_density(d, order)).series;
              break;
          }
        } else if constexpr (std::is_same_v<T, AlgebraicForm>) {
          const auto tracker = f.green;
          t.closed_form = [tracker](cplx z) { return tracker->evaluate(z); };
          t.boundary = [tracker](double l) { return tracker->boundary_value(l); };
          t.series = green_from_moments(moments_from_density(d, order)).series;
        } else {
          t.closed_form = quadrature_form;
          t.boundary = principal_value;
          t.series = green_from_moments(moments_from_density(d, order)).series;
        }
      },
      d.form());
  return t;
}

TransformFn r_transform(const SpectralDensity& d, int order) {
  if (const auto* c = std::get_if<CatalogForm>(&d.form())) {
    TransformFn t;
    t.kind = TransformKind::r;
    t.support_radius = d.support_radius();
    t.atom_at_zero = d.point_mass_zero();
    if (c->law == CatalogLaw::semicircle) {
      const double a = c->a, s2 = c->b * c->b;
      std::vector<cplx> k(order + 1, 0.0);
      k[0] = a;
      if (order >= 1) k[1] = s2;
      t.series = TruncatedSeries(std::move(k), order, 0);
      t.closed_form = [a, s2](cplx z) { return a + s2 * z; };
      return t;
    }
    if (c->law == CatalogLaw::free_poisson) {
      const double r = c->a;
      t.series = TruncatedSeries(std::vector<cplx>(order + 1, cplx(r)), order, 0);
      t.closed_form = [r](cplx z) { return r / (1.0 - z); };
      return t;
    }
  }
  return r_from_green(green_transform(d, order + 1), order);
}

TransformFn s_transform(const SpectralDensity& d, int order) {
  if (const auto* c = std::get_if<CatalogForm>(&d.form())) {
    if (c->law == CatalogLaw::free_poisson) {
      const double r = c->a;
      TransformFn t;
      t.kind = TransformKind::s;
      t.support_radius = d.support_radius();
      t.atom_at_zero = d.point_mass_zero();
      std::vector<cplx> k;
      for (int n = 0; n <= order; ++n) k.push_back(std::pow(-1.0, n) / std::pow(r, n + 1));
      t.series = TruncatedSeries(std::move(k), order, 0);
      t.closed_form = [r](cplx z) { return 1.0 / (z + r); };
      return t;
    }
  }
  return s_from_chi(chi_from_phi(phi_from_green(green_transform(d, order + 1))));
}

// ---------------------------------------------------------------------------
// R transform

TransformFn r_from_green(const TransformFn& green, int order) {
  require_kind(green, TransformKind::green);
  if (!green.series) throw Error(ErrorCode::missing_closed_form, "R from G needs the moment expansion");
  const int k = std::min(order + 1, green.series->order());
  const auto m = moments_of(green);
  MomentSequence mk{std::vector<double>(m.m.begin(), m.m.begin() + k)};
  auto r = r_from_cumulants(moments_to_cumulants(mk));
  r.support_radius = green.support_radius;
  r.atom_at_zero = green.atom_at_zero;
  if (green.closed_form) {
    // R(w) = G^{-1}(w) - 1/w, with the series as the Newton seed.
    const auto g = green.closed_form;
    const auto series = *r.series;
    r.closed_form = [g, series](cplx w) {
      const cplx seed = 1.0 / w + series.evaluate(w);
      if (auto z = invert_pointwise(g, w, seed)) return *z - 1.0 / w;
      return series.evaluate(w);
    };
  }
  return r;
}

std::shared_ptr<const BranchTracker> green_tracker_from_r(const TransformFn& r) {
  require_kind(r, TransformKind::r);
  const double radius = radius_of(r);
  return std::make_shared<const BranchTracker>([r](cplx z, cplx g) { return g * (z - r(g)) - 1.0; }, radius);
}

cplx green_from_r(const TransformFn& r, cplx z) { return green_tracker_from_r(r)->evaluate(z); }

TransformFn free_add(const TransformFn& ra, const TransformFn& rb) {
  require_kind(ra, TransformKind::r);
  require_kind(rb, TransformKind::r);
  TransformFn t;
  t.kind = TransformKind::r;
  if (ra.series && rb.series) t.series = series_add(*ra.series, *rb.series);
  if ((ra.closed_form || ra.series) && (rb.closed_form || rb.series) && (ra.closed_form || rb.closed_form))
    t.closed_form = [ra, rb](cplx z) { return ra(z) + rb(z); };
  if (ra.support_radius > 0.0 && rb.support_radius > 0.0) t.support_radius = ra.support_radius + rb.support_radius;
  return t;
}

// ---------------------------------------------------------------------------
// phi, chi, S

TransformFn phi_from_green(const TransformFn& green) {
  require_kind(green, TransformKind::green);
  TransformFn t;
  t.kind = TransformKind::phi;
  t.support_radius = green.support_radius;
  t.atom_at_zero = green.atom_at_zero;
  if (green.series) {
    const auto& s = *green.series;
    std::vector<cplx> c;
    for (int k = 1; k <= s.order(); ++k) c.push_back(s[k]);
    t.series = TruncatedSeries(std::move(c), s.order(), 1);
  }
  if (green.closed_form) {
    const auto g = green.closed_form;
    t.closed_form = [g](cplx z) { return g(1.0 / z) / z - 1.0; };
  }
  return t;
}

TransformFn chi_from_phi(const TransformFn& phi) {
  require_kind(phi, TransformKind::phi);
  if (!phi.series) throw Error(ErrorCode::missing_closed_form, "chi needs the phi series");
  if (std::abs((*phi.series)[1]) < 1e-14)
    throw Error(ErrorCode::zero_first_moment, "m1 = 0: chi and the S transform are undefined");
  TransformFn t;
  t.kind = TransformKind::chi;
  t.support_radius = phi.support_radius;
  t.atom_at_zero = phi.atom_at_zero;
  t.series = series_revert(*phi.series);
  if (phi.closed_form) {
    const auto f = phi.closed_form;
    const auto series = *t.series;
    t.closed_form = [f, series](cplx z) {
      const cplx seed = series.evaluate(z);
      if (auto x = invert_pointwise(f, z, seed)) return *x;
      return seed;
    };
  }
  return t;
}

TransformFn s_from_chi(const TransformFn& chi) {
  require_kind(chi, TransformKind::chi);
  TransformFn t;
  t.kind = TransformKind::s;
  t.support_radius = chi.support_radius;
  t.atom_at_zero = chi.atom_at_zero;
  if (chi.series) {
    const auto reduced = series_shift_down(*chi.series);
    const auto one_plus_z = TruncatedSeries::from_coefficients({1.0, 1.0});
    t.series = series_mul(series_add(one_plus_z, TruncatedSeries::zero(reduced.order())), reduced);
  }
  if (chi.closed_form) {
    const auto c = chi.closed_form;
    t.closed_form = [c](cplx z) { return (1.0 + z) / z * c(z); };
  }
  return t;
}

TransformFn s_r_convert(const TransformFn& t) {
  if (t.kind != TransformKind::r && t.kind != TransformKind::s)
    throw Error(ErrorCode::kind_mismatch, "s_r_convert takes an R or S transform");
  if (!t.series) throw Error(ErrorCode::missing_closed_form, "R <-> S conversion needs a series");
  TransformFn out;
  out.kind = (t.kind == TransformKind::r) ? TransformKind::s : TransformKind::r;
  out.support_radius = t.support_radius;
  out.atom_at_zero = t.atom_at_zero;
  out.series = reciprocal_fixed_point(*t.series);
  if (t.closed_form) {
    // X(z) = 1/Y(z X(z)) pointwise, seeded with the series.
    const auto y = t.closed_form;
    const auto series = *out.series;
    out.closed_form = [y, series](cplx z) {
      const cplx seed = series.evaluate(z);
      const auto r = newton_solve([&](cplx x) { return x * y(z * x) - 1.0; }, seed, {}, 60, 1e-14);
      return (r.converged && finite(r.root)) ? r.root : seed;
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// free multiplication

TransformFn free_multiply_s(const TransformFn& sa, const TransformFn& sb) {
  require_kind(sa, TransformKind::s);
  require_kind(sb, TransformKind::s);
  TransformFn t;
  t.kind = TransformKind::s;
  if (sa.series && sb.series) t.series = series_mul(*sa.series, *sb.series);
  if (sa.closed_form || sb.closed_form) t.closed_form = [sa, sb](cplx z) { return sa(z) * sb(z); };
  if (sa.support_radius > 0.0 && sb.support_radius > 0.0) t.support_radius = sa.support_radius * sb.support_radius;
  if (sa.atom_at_zero && sb.atom_at_zero) t.atom_at_zero = std::max(*sa.atom_at_zero, *sb.atom_at_zero);
  return t;
}

cplx free_multiply_r(const TransformFn& ra, const TransformFn& rb, cplx z) {
  require_kind(ra, TransformKind::r);
  require_kind(rb, TransformKind::r);
  // Newton on F = (v - s Ra(w), w - s Rb(v)) while s moves from 0 to z.
  cplx v = 0.0, w = 0.0;
  constexpr int steps = 20;
  for (int k = 1; k <= steps; ++k) {
    const cplx s = z * (static_cast<double>(k) / steps);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const cplx f1 = v - s * ra(w);
      const cplx f2 = w - s * rb(v);
      const cplx dra = holomorphic_derivative([&](cplx x) { return ra(x); }, w);
      const cplx drb = holomorphic_derivative([&](cplx x) { return rb(x); }, v);
      // Jacobian [[1, -s Ra'(w)], [-s Rb'(v), 1]].
      const cplx det = 1.0 - s * s * dra * drb;
      if (det == 0.0 || !finite(det)) break;
      const cplx dv = (f1 + s * dra * f2) / det;
      const cplx dw = (f2 + s * drb * f1) / det;
      v -= dv;
      w -= dw;
      if (!finite(v) || !finite(w)) break;
      if (std::abs(dv) + std::abs(dw) < 1e-14 * (1.0 + std::abs(v) + std::abs(w))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw Error(ErrorCode::newton_divergence, "R-route product system did not converge");
  }
  return ra(w) * rb(v);
}

TransformFn free_multiply_r_series(const TransformFn& ra, const TransformFn& rb) {
  require_kind(ra, TransformKind::r);
  require_kind(rb, TransformKind::r);
  if (!ra.series || !rb.series) throw Error(ErrorCode::missing_closed_form, "series product needs both R series");
  const int order = std::min(ra.series->order(), rb.series->order());
  const auto a = ra.series->truncated(order).with_offset_zero();
  const auto b = rb.series->truncated(order).with_offset_zero();
  auto v = TruncatedSeries::zero(order, 1);
  auto w = TruncatedSeries::zero(order, 1);
  for (int it = 0; it <= order; ++it) {
    const auto v_next = series_shift_up(series_compose(a, w));
    const auto w_next = series_shift_up(series_compose(b, v));
    v = v_next;
    w = w_next;
  }
  TransformFn t;
  t.kind = TransformKind::r;
  t.series = series_mul(series_compose(a, w), series_compose(b, v));
  t.closed_form = [ra, rb](cplx z) { return free_multiply_r(ra, rb, z); };
  if (ra.support_radius > 0.0 && rb.support_radius > 0.0) t.support_radius = ra.support_radius * rb.support_radius;
  return t;
}

// ---------------------------------------------------------------------------
// densities of implicitly defined laws

std::shared_ptr<const BranchTracker> green_tracker_from_s(const TransformFn& s) {
  require_kind(s, TransformKind::s);
  const double radius = radius_of(s);
  return std::make_shared<const BranchTracker>(
      [s](cplx z, cplx g) {
        const cplx u = z * g - 1.0;
        return u * s(u) - g;
      },
      radius);
}

SpectralDensity density_from_tracker(std::shared_ptr<const BranchTracker> green, double radius, bool nonnegative,
                                     std::optional<double> atom_at_zero) {
  constexpr double threshold = 1e-10;
  const double lo = nonnegative ? 0.0 : -radius;
  const double hi = radius;
  constexpr int n = 2000;
  const double h = (hi - lo) / n;
  const auto rho = [&](double l) {
    try {
      return -green->boundary_value(l).imag() / pi;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::vector<double> x(n), r(n);
  for (int j = 0; j < n; ++j) {
    x[j] = lo + (j + 0.5) * h;
    r[j] = rho(x[j]);
  }
  const auto inside = [&](double v) { return !(v <= threshold); };
  // Edge between a and b where inside() flips.
  const auto refine = [&](double a, double b) {
    try {
      const double e = green->refine_edge(0.5 * (a + b));
      if (e >= a - h && e <= b + h) return e;
    } catch (const Error&) {
    }
    const bool a_inside = inside(rho(a));
    for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if (inside(rho(mid)) == a_inside)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  };
  std::vector<Interval> support;
  int j = 0;
  while (j < n) {
    if (!inside(r[j])) {
      ++j;
      continue;
    }
    const int start = j;
    while (j < n && inside(r[j])) ++j;
    const int stop = j - 1;
    if (stop == n - 1) throw Error(ErrorCode::unbounded_support, "support reaches the scan radius");
    double left = (start == 0) ? lo : refine(x[start - 1], x[start]);
    double right = refine(x[stop], x[stop + 1]);
    if (std::abs(left) < 1e-9 * radius) left = 0.0;
    if (start == 0 && !nonnegative) throw Error(ErrorCode::unbounded_support, "support reaches the scan radius");
    support.push_back({left, right});
  }
  if (support.empty()) throw Error(ErrorCode::no_convergence, "no continuous spectrum found");
  auto density = algebraic_density(green, support, 0.0);
  double atom = 0.0;
  if (atom_at_zero) {
    atom = *atom_at_zero;
  } else {
    atom = 1.0 - density.continuous_mass();
    if (atom < 1e-7) atom = 0.0;
  }
  return algebraic_density(std::move(green), std::move(support), std::clamp(atom, 0.0, 1.0));
}

SpectralDensity density_from_s(const TransformFn& s) {
  auto tracker = green_tracker_from_s(s);
  const double radius = radius_of(s);
  // S is defined only for m1 != 0; the S route is used for laws on [0, inf).
  return density_from_tracker(std::move(tracker), 1.05 * radius, true, s.atom_at_zero);
}

SpectralDensity density_from_r(const TransformFn& r) {
  auto tracker = green_tracker_from_r(r);
  const double radius = radius_of(r);
  return density_from_tracker(std::move(tracker), 1.05 * radius, false, r.atom_at_zero);
}

SpectralDensity density_of_product(const TransformFn& sa, const TransformFn& sb) {
  return density_from_s(free_multiply_s(sa, sb));
}

// ---------------------------------------------------------------------------
// potential

double potential_derivative(const SpectralDensity& d, double x) {
  double total = 0.0;
  if (d.point_mass_zero() > 0.0 && x != 0.0) total += d.point_mass_zero() / x;
  for (const auto& iv : d.support()) {
    const double margin = 1e-9 * iv.width();
    if (std::abs(x - iv.lo) < margin || std::abs(x - iv.hi) < margin)
      throw Error(ErrorCode::edge_singularity, "x is at a support edge");
    if (x > iv.lo && x < iv.hi) {
      const double rx = d(x);
      const auto g = [&](double l) { return l == x ? 0.0 : (d(l) - rx) / (x - l); };
      total += quad::integrate_edges(g, iv.lo, x, 1e-12) + quad::integrate_edges(g, x, iv.hi, 1e-12);
      total += rx * std::log((x - iv.lo) / (iv.hi - x));
    } else {
      total += quad::integrate_edges([&](double l) { return d(l) / (x - l); }, iv.lo, iv.hi, 1e-12);
    }
  }
  return 2.0 * total;
}

double potential_from_density(const SpectralDensity& d, double x) {
  const double a = d.lower();
  if (x <= a) return 0.0;
  return quad::integrate([&](double t) { return potential_derivative(d, t); }, a, x, 1e-10);
}

}  // namespace freeprod
