#include "freeprod/isotropic.hpp"

#include <algorithm>
#include <cmath>
// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <limits>
#include <numbers>
#include <sstream>

#include "freeprod/error.hpp"
#include "freeprod/quadrature.hpp"

namespace freeprod {

namespace {

using std::numbers::pi;
constexpr int grid_points = 512;
constexpr double inf = std::numeric_limits<double>::infinity();

bool finite(cplx x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

double real_value(const TransformFn& s, double u) {
  const cplx v = s(cplx(u, 0.0));
  if (!finite(v) || std::abs(v.imag()) > 1e-8 * (1.0 + std::abs(v.real())))
    throw Error(ErrorCode::non_monotone_s, "S is not real and finite at u=" + std::to_string(u));
  return v.real();
}

// dS/du. Complex step when S is analytic (no cancellation even a hair away
// from the lower end of the domain), finite differences for tabulated S.
double real_derivative(const TransformFn& s, double u, double lower) {
  const double dist = u - lower;
  try {
    const double h = 1e-8 * (dist > 0.0 ? std::min(dist, 1.0) : 1e-7);
    const cplx v = s(cplx(u, h));
    if (finite(v)) return v.imag() / h;
  } catch (const Error&) {
  }
  const auto f = [&](double x) { return real_value(s, x); };
  if (dist <= 0.0) {
    const double h = 1e-7;
    return (-3.0 * f(u) + 4.0 * f(u + h) - f(u + 2.0 * h)) / (2.0 * h);
  }
  const double h = std::min(1e-4 * (1.0 + std::abs(u)), 1e-2 * dist);
  try {
    const double d = (f(u - 2.0 * h) - 8.0 * f(u - h) + 8.0 * f(u + h) - f(u + 2.0 * h)) / (12.0 * h);
    if (std::isfinite(d)) return d;
  } catch (const Error&) {
  }
  return (3.0 * f(u) - 4.0 * f(u - h) + f(u - 2.0 * h)) / (2.0 * h);
}

// Fritsch-Carlson: keep each Hermite piece monotone.
void limit_slopes(const std::vector<double>& x, const std::vector<double>& f, std::vector<double>& d) {
  for (auto& v : d) v = std::max(0.0, v);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double delta = (f[i + 1] - f[i]) / (x[i + 1] - x[i]);
    if (delta <= 0.0) {
      d[i] = d[i + 1] = 0.0;
      continue;
    }
    const double a = d[i] / delta, b = d[i + 1] / delta;
    const double norm = a * a + b * b;
    if (norm > 9.0) {
      const double tau = 3.0 / std::sqrt(norm);
      d[i] = tau * a * delta;
      d[i + 1] = tau * b * delta;
    }
  }
}

TransformFn product_of(std::vector<TransformFn> factors, double point_mass) {
  TransformFn t;
  t.kind = TransformKind::s;
  t.atom_at_zero = point_mass;
  t.closed_form = [factors](cplx u) {
    cplx acc = 1.0;
    for (const auto& f : factors) acc *= f(u);
    return acc;
  };
  return t;
}

}  // namespace

std::string to_string(RingShape shape) {
  switch (shape) {
    case RingShape::ring: return "ring";
    case RingShape::disk: return "disk";
    case RingShape::disk_with_point_mass: return "disk_with_point_mass";
  }
  return "unknown";
}

RadialLaw RadialLaw::power(double exponent, double radius, double point_mass) {
  if (!(exponent > 0.0) || !(radius > 0.0) || point_mass < 0.0 || point_mass >= 1.0)
    throw Error(ErrorCode::invalid_argument, "power law needs exponent > 0, radius > 0, point mass in [0, 1)");
  RadialLaw law;
  law.kind_ = Kind::power;
  law.exponent_ = exponent;
  law.outer_ = radius;
  law.inner_ = 0.0;
  law.p0_ = point_mass;
  return law;
}

RadialLaw RadialLaw::step(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "step radius must be positive");
  RadialLaw law;
  law.kind_ = Kind::step;
  law.inner_ = law.outer_ = radius;
  law.exponent_ = inf;
  return law;
}

RadialLaw RadialLaw::grid(std::vector<double> x, std::vector<double> f, std::vector<double> slope,
                          double point_mass) {
  if (x.size() < 2 || f.size() != x.size() || slope.size() != x.size())
    throw Error(ErrorCode::invalid_argument, "grid law needs at least two matching nodes");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw Error(ErrorCode::invalid_argument, "grid nodes must increase");
  if (!(x.front() > 0.0)) throw Error(ErrorCode::invalid_argument, "grid nodes must be positive");
  RadialLaw law;
  law.kind_ = Kind::grid;
  law.p0_ = point_mass;
  law.outer_ = x.back();
  // A first node at F = p0 is a genuine inner edge; otherwise the law is a
  // disk continued below the grid by a power law.
  if (f.front() <= point_mass + 1e-15) {
    law.inner_ = x.front();
  } else {
    law.inner_ = 0.0;
    law.tail_exponent_ = x.front() * slope.front() / (f.front() - point_mass);
    if (!(law.tail_exponent_ > 0.0) || !std::isfinite(law.tail_exponent_)) law.tail_exponent_ = 2.0;
  }
  limit_slopes(x, f, slope);
  law.x_ = std::move(x);
  law.f_ = std::move(f);
  law.slope_ = std::move(slope);
  return law;
}

std::size_t RadialLaw::interval_of(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::size_t>(it - x_.begin());
  return std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
}

double RadialLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x >= outer_) return 1.0;
  switch (kind_) {
    case Kind::step: return p0_;
    case Kind::power: return p0_ + (1.0 - p0_) * std::pow(x / outer_, exponent_);
    case Kind::grid: break;
  }
  if (x <= x_.front()) {
    if (inner_ > 0.0) return p0_;
    return p0_ + (f_.front() - p0_) * std::pow(x / x_.front(), tail_exponent_);
  }
  const auto i = interval_of(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double value = (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
                       (-2 * t3 + 3 * t2) * f_[i + 1] + (t3 - t2) * h * slope_[i + 1];
  return std::clamp(value, p0_, 1.0);
}

double RadialLaw::cdf_derivative(double x) const {
  if (x <= 0.0 || x >= outer_) return 0.0;
  switch (kind_) {
    case Kind::step: return 0.0;
    case Kind::power: return (1.0 - p0_) * exponent_ * std::pow(x / outer_, exponent_ - 1.0) / outer_;
    case Kind::grid: break;
  }
  if (x <= x_.front()) {
    if (inner_ > 0.0) return 0.0;
    return (f_.front() - p0_) * tail_exponent_ * std::pow(x / x_.front(), tail_exponent_ - 1.0) / x_.front();
  }
  const auto i = interval_of(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) * (f_[i] - f_[i + 1]) / h + (3 * t2 - 4 * t + 1) * slope_[i] +
         (3 * t2 - 2 * t) * slope_[i + 1];
}

double RadialLaw::inverse_cdf(double v) const {
  if (v <= p0_) return inner_;
  if (v >= 1.0) return outer_;
  switch (kind_) {
    case Kind::step: return outer_;
    case Kind::power: return outer_ * std::pow((v - p0_) / (1.0 - p0_), 1.0 / exponent_);
    case Kind::grid: break;
  }
  if (v <= f_.front()) {
    if (inner_ > 0.0) return inner_;
    return x_.front() * std::pow((v - p0_) / (f_.front() - p0_), 1.0 / tail_exponent_);
  }
  const auto it = std::lower_bound(f_.begin(), f_.end(), v);
  const auto j = static_cast<std::size_t>(it - f_.begin());
  double lo = x_[j - 1], hi = x_[j];
  for (int k = 0; k < 200 && hi - lo > 4e-16 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < v ? lo : hi) = mid;
  }
  return hi;
}

RingShape RadialLaw::shape() const {
  if (p0_ > 0.0) return RingShape::disk_with_point_mass;
  return inner_ > 0.0 ? RingShape::ring : RingShape::disk;
}

std::string RadialLaw::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::power: out << "power(p=" << exponent_ << ", R=" << outer_ << ", p0=" << p0_ << ")"; break;
    case Kind::step: out << "step(R=" << outer_ << ")"; break;
    case Kind::grid:
      out << "grid(" << x_.size() << " nodes, R_i=" << inner_ << ", R_e=" << outer_ << ", p0=" << p0_ << ")";
      break;
  }
  return out.str();
}

RadialLaw ginibre_radial() { return RadialLaw::power(2.0, 1.0, 0.0); }

double planar_density(const RadialLaw& law, cplx z) {
  const double r = std::abs(z);
  if (r == 0.0) throw Error(ErrorCode::invalid_argument, "the planar density is reported for z != 0");
  return law.cdf_derivative(r) / (2.0 * pi * r);
}

RadialLaw hl_radial_from_s(const TransformFn& s, double point_mass) {
  if (s.kind != TransformKind::s) throw Error(ErrorCode::kind_mismatch, "expected an S transform");
  if (point_mass < 0.0 || point_mass >= 1.0) throw Error(ErrorCode::invalid_argument, "point mass must lie in [0, 1)");
  const double lower = point_mass - 1.0;
  const double s0 = real_value(s, 0.0);
  if (!(s0 > 0.0)) throw Error(ErrorCode::non_monotone_s, "S(0) must be positive");
  const double outer = 1.0 / std::sqrt(s0);
  double s_lower = inf;
  try {
    s_lower = real_value(s, lower);
  } catch (const Error&) {
  }
  const double inner = (std::isfinite(s_lower) && s_lower > 0.0) ? 1.0 / std::sqrt(s_lower) : 0.0;
  if (inner >= outer * (1.0 - 1e-12)) {
    if (point_mass > 0.0) throw Error(ErrorCode::non_monotone_s, "flat S with a point mass");
    return RadialLaw::step(outer);
  }

  std::vector<double> x;
  const double a = std::max(inner, 1e-6) * 0.9, b = outer * 1.1;
  if (inner > 0.0) x.push_back(inner);
  for (int i = 0; i < grid_points; ++i) {
    const double xi = a * std::pow(b / a, static_cast<double>(i) / (grid_points - 1));
    if (xi > inner * (1.0 + 1e-12) && xi < outer * (1.0 - 1e-12)) x.push_back(xi);
  }
  x.push_back(outer);

  std::vector<double> f(x.size()), slope(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double u;
    if (i + 1 == x.size()) {
      u = 0.0;
    } else if (inner > 0.0 && i == 0) {
      u = lower;
    } else {
      const double target = 1.0 / (xi * xi);
      double lo = lower, hi = 0.0;
      const auto h = [&](double v) { return real_value(s, v) - target; };
      if (!(s_lower > target)) {
        std::ostringstream msg;
        msg << "no bracket for F at x=" << xi;
        throw Error(ErrorCode::non_monotone_s, msg.str());
      }
      while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
      }
      u = 0.5 * (lo + hi);
    }
    f[i] = std::clamp(1.0 + u, point_mass, 1.0);
    const double ds = real_derivative(s, u, lower);
    slope[i] = (ds < 0.0 && std::isfinite(ds)) ? -2.0 / (xi * xi * xi * ds) : 0.0;
    if (i > 0 && f[i] < f[i - 1]) {
      std::ostringstream msg;
      msg << "F decreases at x=" << xi;
      throw Error(ErrorCode::non_monotone_s, msg.str());
    }
  }
  return RadialLaw::grid(std::move(x), std::move(f), std::move(slope), point_mass);
}

TransformFn hl_s_from_radial(const RadialLaw& law, int order) {
  const double p0 = law.point_mass();
  const double radius = law.outer_radius();
  switch (law.kind()) {
    case RadialLaw::Kind::step: {
      auto t = constant_transform(TransformKind::s, 1.0 / (radius * radius), order);
      t.support_radius = radius * radius;
      t.atom_at_zero = 0.0;
      return t;
    }
    case RadialLaw::Kind::power: {
      const double k = 2.0 / law.exponent();
      const double q = 1.0 - p0;
      const double scale = 1.0 / (radius * radius);
      TransformFn t;
      t.kind = TransformKind::s;
      t.atom_at_zero = p0;
      t.closed_form = [k, q, scale](cplx u) { return scale * std::pow(1.0 + u / q, -k); };
      std::vector<cplx> c(order + 1);
      c[0] = scale;
      for (int n = 1; n <= order; ++n) c[n] = c[n - 1] * ((-k - n + 1.0) / (n * q));
      t.series = TruncatedSeries::from_coefficients(std::move(c));
      // Upper edge of the Fuss-Catalan law with real parameter k.
      if (p0 == 0.0) t.support_radius = radius * radius * std::pow(k + 1.0, k + 1.0) / std::pow(k, k);
      return t;
    }
    case RadialLaw::Kind::grid: break;
  }
  const auto& x = law.nodes();
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(law.cdf(x[i]) > law.cdf(x[i - 1]))) {
      std::ostringstream msg;
      msg << "F is flat near x=" << x[i];
      throw Error(ErrorCode::flat_region, msg.str());
    }
  TransformFn t;
  t.kind = TransformKind::s;
  t.atom_at_zero = p0;
  t.closed_form = [law, p0](cplx u) -> cplx {
    if (u.imag() != 0.0) throw Error(ErrorCode::missing_closed_form, "tabulated S is real-only");
    const double v = 1.0 + u.real();
    if (v > 1.0 + 1e-14 || v < p0) throw Error(ErrorCode::missing_closed_form, "u outside (p0 - 1, 0]");
    const double r = law.inverse_cdf(std::min(v, 1.0));
    return r > 0.0 ? 1.0 / (r * r) : inf;
  };
  return t;
}

TransformFn s_transform_of_square(const SpectralDensity& rho_a) {
  const double p0 = rho_a.point_mass_zero();
  if (rho_a.lower() < 0.0) throw Error(ErrorCode::invalid_argument, "singular values must be nonnegative");
  const auto moment = [&](const std::function<double(double)>& weight) {
    double total = 0.0;
    for (const auto& iv : rho_a.support())
      total += quad::integrate_edges([&](double l) { return weight(l) * rho_a(l); }, iv.lo, iv.hi, 1e-12);
    return total;
  };
  const double m2 = moment([](double l) { return l * l; });
  if (!(m2 > 0.0)) throw Error(ErrorCode::zero_first_moment, "a^2 has zero mean");
  const double top = rho_a.upper();
  const auto psi = [&](double x) { return moment([x](double l) { return x * l * l / (1.0 - x * l * l); }); };

  std::vector<std::pair<double, double>> table;  // (u, log S)
  table.emplace_back(0.0, -std::log(m2));
  if (p0 == 0.0 && rho_a.lower() > 0.0) table.emplace_back(-1.0, -std::log(moment([](double l) { return 1.0 / (l * l); })));
  const auto add = [&](double x) {
    const double ux = psi(x);
    const double sx = x * (1.0 + ux) / ux;
    if (sx > 0.0 && std::isfinite(sx)) table.emplace_back(ux, std::log(sx));
  };
  for (int i = 0; i < 600; ++i) add(-std::pow(10.0, 12.0 - 18.0 * i / 599.0) / m2);
  const double x_hi = 0.9 / (top * top), x_lo = std::min(1e-6 / m2, 0.5 * x_hi);
  for (int i = 0; i < 40; ++i) add(x_lo * std::pow(x_hi / x_lo, i / 39.0));
  std::sort(table.begin(), table.end());
  std::vector<double> u, log_s;
  for (const auto& [ux, ls] : table) {
    if (!u.empty() && ux <= u.back() + 1e-15) continue;
    u.push_back(ux);
    log_s.push_back(ls);
  }
  const double lower = p0 - 1.0;
  const double u_min = u.front(), u_max = u.back();
  // Below the table S grows like a power of 1/(u - lower).
  const double tail = (log_s[1] - log_s[0]) / (std::log(u[1] - lower) - std::log(u[0] - lower));
  const double log_s_min = log_s.front();
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(u), std::move(log_s));
  TransformFn t;
  t.kind = TransformKind::s;
  t.atom_at_zero = p0;
  t.support_radius = top * top;
  t.closed_form = [spline, lower, u_min, u_max, tail, log_s_min](cplx z) -> cplx {
    if (z.imag() != 0.0) throw Error(ErrorCode::missing_closed_form, "tabulated S is real-only");
    const double v = z.real();
    if (v <= lower || v > u_max) throw Error(ErrorCode::missing_closed_form, "u outside the tabulated range");
    if (v < u_min) return std::exp(log_s_min + tail * (std::log(v - lower) - std::log(u_min - lower)));
    return std::exp((*spline)(v));
  };
  return t;
}

SpectralDensity singular_value_density(const RadialLaw& law) {
  if (law.kind() == RadialLaw::Kind::step)
    throw Error(ErrorCode::invalid_argument, "all singular values coincide; there is no density");
  if (law.kind() == RadialLaw::Kind::grid)
    throw Error(ErrorCode::missing_closed_form, "tabulated laws have a real-only S transform");
  return square_root_pushforward(density_from_s(hl_s_from_radial(law)));
}

RadialLaw isotropic_product(std::span<const RadialLaw> laws) {
  if (laws.empty()) throw Error(ErrorCode::invalid_argument, "empty product");
  if (laws.size() == 1) return laws.front();
  const bool exact = std::all_of(laws.begin(), laws.end(), [](const RadialLaw& l) {
    return l.kind() != RadialLaw::Kind::grid && l.point_mass() == 0.0;
  });
  if (exact) {
    // S = prod R_i^-2 (1 + u)^(-2/p_i): again a power law.
    double radius = 1.0, inverse_exponent = 0.0;
    for (const auto& l : laws) {
      radius *= l.outer_radius();
      if (l.kind() == RadialLaw::Kind::power) inverse_exponent += 1.0 / l.exponent();
    }
    if (inverse_exponent == 0.0) return RadialLaw::step(radius);
    return RadialLaw::power(1.0 / inverse_exponent, radius, 0.0);
  }
  double p0 = 0.0;
  std::vector<TransformFn> factors;
  for (const auto& l : laws) {
    p0 = std::max(p0, l.point_mass());
    factors.push_back(hl_s_from_radial(l));
  }
  return hl_radial_from_s(product_of(std::move(factors), p0), p0);
}

RadialLaw power_law(const RadialLaw& law, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "power must be a positive integer");
  if (n == 1) return law;
  switch (law.kind()) {
    case RadialLaw::Kind::power:
      return RadialLaw::power(law.exponent() / n, std::pow(law.outer_radius(), n), law.point_mass());
    case RadialLaw::Kind::step: return RadialLaw::step(std::pow(law.outer_radius(), n));
    case RadialLaw::Kind::grid: break;
  }
  // F_Q(x) = F_A(x^(1/n)) on the mapped nodes.
  std::vector<double> x, f = law.values(), slope;
  for (std::size_t i = 0; i < law.nodes().size(); ++i) {
    const double y = law.nodes()[i];
    const double xn = std::pow(y, n);
    x.push_back(xn);
    slope.push_back(law.slopes()[i] * y / (n * xn));
  }
  return RadialLaw::grid(std::move(x), std::move(f), std::move(slope), law.point_mass());
}

PointMasses point_masses(const RadialLaw& law, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "power must be a positive integer");
  // A product of n factors, each of rank (1 - p0) N in general position, keeps
  // rank (1 - p0) N: the kernel does not grow with n.
  return {law.point_mass(), law.point_mass()};
}

double fuss_catalan_edge(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be a positive integer");
  return std::pow(n + 1.0, n + 1.0) / std::pow(static_cast<double>(n), n);
}

std::shared_ptr<const BranchTracker> fuss_catalan_tracker(int n) {
  const double edge = fuss_catalan_edge(n);
  return std::make_shared<const BranchTracker>(
      [n](cplx z, cplx g) { return std::pow(z, n) * std::pow(g, n + 1) - z * g + 1.0; }, edge,
      [n](cplx z) {
        std::vector<cplx> c(n + 2, 0.0);
        c[0] = 1.0;
        c[1] = -z;
        c[n + 1] = std::pow(z, n);
        return c;
      });
}

cplx fuss_catalan_green(int n, cplx z) { return fuss_catalan_tracker(n)->evaluate(z); }

SpectralDensity fuss_catalan_density(int n) {
  return density_from_tracker(fuss_catalan_tracker(n), 1.05 * fuss_catalan_edge(n), true, 0.0);
}

double fit_power_exponent(const SpectralDensity& d, double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw Error(ErrorCode::invalid_argument, "need 0 < lo < hi, two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1);
    const double y = std::log(d(std::exp(x)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (points * sxy - sx * sy) / (points * sxx - sx * sx);
}

}  // namespace freeprod
