#include "freeprod/density.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freeprod/error.hpp"
#include "freeprod/quadrature.hpp"

namespace freeprod {

namespace {

using std::numbers::pi;

double catalog_value(const CatalogForm& c, double x) {
  switch (c.law) {
    case CatalogLaw::semicircle: {
      const double u = (x - c.a) / c.b;
      return std::sqrt(std::max(0.0, 4.0 - u * u)) / (2.0 * pi * c.b);
    }
    case CatalogLaw::free_poisson: {
      const double s = std::sqrt(c.a);
      const double lo = (1.0 - s) * (1.0 - s), hi = (1.0 + s) * (1.0 + s);
      if (x <= 0.0) return 0.0;
      return std::sqrt(std::max(0.0, (hi - x) * (x - lo))) / (2.0 * pi * x);
    }
    case CatalogLaw::quarter_circle:
      return std::sqrt(std::max(0.0, 4.0 - x * x)) / pi;
    case CatalogLaw::wishart_product:
      return wishart_product_closed_form_value(x);
  }
  return 0.0;
}

double grid_value(const GridForm& g, double x) {
  const auto& l = g.lambda;
  if (l.empty() || x < l.front() || x > l.back()) return 0.0;
  auto it = std::upper_bound(l.begin(), l.end(), x);
  if (it == l.end()) return g.rho.back();
  const auto i = static_cast<std::size_t>(it - l.begin());
  if (i == 0) return g.rho.front();
  const double w = (x - l[i - 1]) / (l[i] - l[i - 1]);
  return (1.0 - w) * g.rho[i - 1] + w * g.rho[i];
}

}  // namespace

SpectralDensity::SpectralDensity(std::vector<Interval> support, double point_mass_zero, Form form)
    : support_(std::move(support)), point_mass_zero_(point_mass_zero), form_(std::move(form)) {
  if (support_.empty() && point_mass_zero_ < 1.0)
    throw Error(ErrorCode::invalid_argument, "a density needs a support interval unless it is a pure point mass");
  if (point_mass_zero_ < 0.0 || point_mass_zero_ > 1.0)
    throw Error(ErrorCode::invalid_argument, "point mass must lie in [0, 1]");
  for (const auto& iv : support_) {
    if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw Error(ErrorCode::unbounded_support, "support intervals must be finite and nondegenerate");
  }
  std::sort(support_.begin(), support_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
}

bool SpectralDensity::on_support(double lambda) const {
  return std::any_of(support_.begin(), support_.end(), [&](const Interval& iv) { return iv.contains(lambda); });
}

double SpectralDensity::operator()(double lambda) const {
  if (!on_support(lambda)) return 0.0;
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CatalogForm>) {
          return catalog_value(f, lambda);
        } else if constexpr (std::is_same_v<T, GridForm>) {
          return grid_value(f, lambda);
        } else if constexpr (std::is_same_v<T, SquareRootForm>) {
          return lambda <= 0.0 ? 0.0 : 2.0 * lambda * (*f.base)(lambda * lambda);
        } else {
          try {
            return std::max(0.0, -f.green->boundary_value(lambda).imag() / pi);
          } catch (const Error&) {
            // Continuation cannot resolve the last few ulps next to an edge
            // singularity; that sliver carries no measurable mass.
            for (const auto& iv : support_) {
              const double reach = 1e-15 * std::max(1.0, iv.width());
              if (std::abs(lambda - iv.lo) < reach || std::abs(lambda - iv.hi) < reach) return 0.0;
            }
            throw;
          }
        }
      },
      form_);
}

double SpectralDensity::support_radius() const {
  double r = 0.0;
  for (const auto& iv : support_) r = std::max({r, std::abs(iv.lo), std::abs(iv.hi)});
  return r;
}

double SpectralDensity::continuous_mass() const {
  double total = 0.0;
  for (const auto& iv : support_)
    total += quad::integrate_edges([this](double x) { return (*this)(x); }, iv.lo, iv.hi, 1e-11);
  return total;
}

std::string SpectralDensity::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CatalogForm>) {
          switch (f.law) {
            case CatalogLaw::semicircle: out << "semicircle(alpha=" << f.a << ", sigma=" << f.b << ")"; break;
            case CatalogLaw::free_poisson: out << "free_poisson(r=" << f.a << ")"; break;
            case CatalogLaw::quarter_circle: out << "quarter_circle"; break;
            case CatalogLaw::wishart_product: out << "wishart_product"; break;
          }
        } else if constexpr (std::is_same_v<T, GridForm>) {
          out << "grid(" << f.lambda.size() << " points)";
        } else if constexpr (std::is_same_v<T, SquareRootForm>) {
          out << "sqrt(" << f.base->describe() << ")";
        } else {
          out << "algebraic";
        }
      },
      form_);
  return out.str();
}

SpectralDensity semicircle(double alpha, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_argument, "semicircle scale must be positive");
  return SpectralDensity({{alpha - 2.0 * sigma, alpha + 2.0 * sigma}}, 0.0,
                         CatalogForm{CatalogLaw::semicircle, alpha, sigma});
}

SpectralDensity free_poisson(double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "free Poisson ratio must be positive");
  const double s = std::sqrt(r);
  return SpectralDensity({{(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)}}, std::max(0.0, 1.0 - r),
                         CatalogForm{CatalogLaw::free_poisson, r, 0.0});
}

SpectralDensity wishart() { return free_poisson(1.0); }

SpectralDensity anti_wishart_density(double r) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::invalid_argument, "anti-Wishart ratio must lie in (0, 1)");
  return free_poisson(r);
}

SpectralDensity quarter_circle() {
  return SpectralDensity({{0.0, 2.0}}, 0.0, CatalogForm{CatalogLaw::quarter_circle, 0.0, 0.0});
}

SpectralDensity wishart_product_closed_form() {
  return SpectralDensity({{0.0, 27.0 / 4.0}}, 0.0, CatalogForm{CatalogLaw::wishart_product, 0.0, 0.0});
}

double wishart_product_closed_form_value(double x) {
  if (x <= 0.0 || x > 27.0 / 4.0) return 0.0;
  const double root = std::sqrt(std::max(0.0, 27.0 * (27.0 - 4.0 * x)));
  const double u = 27.0 + root;
  const double c = std::cbrt(2.0) * std::sqrt(3.0) / (12.0 * pi);
  const double value =
      c * (std::cbrt(2.0) * std::pow(u, 2.0 / 3.0) - 6.0 * std::cbrt(x)) / (std::pow(x, 2.0 / 3.0) * std::cbrt(u));
  return std::max(0.0, value);
}

SpectralDensity grid_density(std::vector<double> lambda, std::vector<double> rho, double point_mass_zero) {
  if (lambda.size() != rho.size() || lambda.size() < 2)
    throw Error(ErrorCode::invalid_argument, "grid density needs at least two matching samples");
  if (!std::is_sorted(lambda.begin(), lambda.end()))
    throw Error(ErrorCode::invalid_argument, "grid abscissae must be sorted");
  const Interval iv{lambda.front(), lambda.back()};
  return SpectralDensity({iv}, point_mass_zero, GridForm{std::move(lambda), std::move(rho)});
}

SpectralDensity catalog_density(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::vector<double> args;
  if (colon != std::string_view::npos) {
    std::stringstream in{std::string(text.substr(colon + 1))};
    std::string item;
    try {
      while (std::getline(in, item, ',')) args.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_argument, "bad parameters in '" + std::string(text) + "'");
    }
  }
  const auto arg = [&](std::size_t k, double fallback) { return k < args.size() ? args[k] : fallback; };
  if (name == "semicircle") return semicircle(arg(0, 0.0), arg(1, 1.0));
  if (name == "gue") return semicircle(0.0, 1.0);
  if (name == "wishart") return wishart();
  if (name == "free-poisson") return free_poisson(arg(0, 1.0));
  if (name == "anti-wishart") return anti_wishart_density(arg(0, 0.5));
  if (name == "quarter-circle") return quarter_circle();
  if (name == "wishart-product") return wishart_product_closed_form();
  throw Error(ErrorCode::unknown_catalog_entry, "unknown law '" + std::string(text) + "'");
}

SpectralDensity square_root_pushforward(const SpectralDensity& base) {
  std::vector<Interval> support;
  for (const auto& iv : base.support()) {
    if (iv.lo < 0.0) throw Error(ErrorCode::invalid_argument, "square root needs a law on [0, inf)");
    support.push_back({std::sqrt(iv.lo), std::sqrt(iv.hi)});
  }
  return SpectralDensity(std::move(support), base.point_mass_zero(),
                         SquareRootForm{std::make_shared<const SpectralDensity>(base)});
}

SpectralDensity algebraic_density(std::shared_ptr<const BranchTracker> green, std::vector<Interval> support,
                                  double point_mass_zero) {
  return SpectralDensity(std::move(support), point_mass_zero, AlgebraicForm{std::move(green)});
}

CdfTable::CdfTable(const SpectralDensity& density, int pieces_per_interval) : density_(density) {
  const int m = std::max(8, pieces_per_interval);
  double running = 0.0;
  for (std::size_t k = 0; k < density_.support().size(); ++k) {
    interval_start_mass_.push_back(running);
    std::vector<Piece> pieces;
    pieces.reserve(m);
    for (int j = 0; j < m; ++j) {
      const double t0 = static_cast<double>(j) / m, t1 = static_cast<double>(j + 1) / m;
      pieces.push_back({t0, t1, running});
      running += partial(k, t0, t1);
    }
    pieces_.push_back(std::move(pieces));
  }
  total_continuous_ = running;
}

double CdfTable::partial(std::size_t interval, double t0, double t1) const {
  const auto& iv = density_.support()[interval];
  const double w = iv.width();
  return boost::math::quadrature::gauss<double, 20>::integrate(
      [&](double t) {
        const double jacobian = quad::edge_jacobian(t);
        if (jacobian <= 0.0) return 0.0;
        return density_(position(interval, t)) * w * jacobian;
      },
      t0, t1);
}

double CdfTable::position(std::size_t interval, double t) const {
  const auto& iv = density_.support()[interval];
  return t <= 0.5 ? iv.lo + iv.width() * quad::edge_map(t) : iv.hi - iv.width() * quad::edge_map(1.0 - t);
}

double CdfTable::quantile(double v) const {
  const auto& support = density_.support();
  const double atom = density_.point_mass_zero();
  const double below_zero = (*this)(std::nextafter(0.0, -1.0));
  v = std::clamp(v, 0.0, 1.0);
  if (atom > 0.0 && v > below_zero && v <= below_zero + atom) return 0.0;
  double w = std::min(v > below_zero ? v - atom : v, total_continuous_);
  if (support.empty()) return 0.0;
  std::size_t k = 0;
  while (k + 1 < support.size() && interval_start_mass_[k + 1] <= w) ++k;
  const auto& pieces = pieces_[k];
  auto it = std::upper_bound(pieces.begin(), pieces.end(), w,
                             [](double value, const Piece& p) { return value < p.cumulative_before; });
  const auto& piece = *(it == pieces.begin() ? it : std::prev(it));
  const double need = w - piece.cumulative_before;
  double lo = piece.t0, hi = piece.t1;
  for (int step = 0; step < 60 && hi - lo > 1e-15; ++step) {
    const double mid = 0.5 * (lo + hi);
    (partial(k, piece.t0, mid) < need ? lo : hi) = mid;
  }
  return position(k, 0.5 * (lo + hi));
}

double CdfTable::operator()(double x) const {
  const double atom = (x >= 0.0) ? density_.point_mass_zero() : 0.0;
  const auto& support = density_.support();
  double mass = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto& iv = support[k];
    if (x < iv.lo) break;
    if (x >= iv.hi) {
      mass = (k + 1 < support.size()) ? interval_start_mass_[k + 1] : total_continuous_;
      continue;
    }
    const double t = quad::edge_inverse((x - iv.lo) / iv.width());
    const auto& pieces = pieces_[k];
    const auto j = std::min(pieces.size() - 1, static_cast<std::size_t>(t * pieces.size()));
    mass = pieces[j].cumulative_before + partial(k, pieces[j].t0, t);
    break;
  }
  return std::clamp(atom + mass, 0.0, 1.0);
}

}  // namespace freeprod
