#ifndef FREEPROD_DENSITY_HPP
#define FREEPROD_DENSITY_HPP

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "freeprod/continuation.hpp"

namespace freeprod {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

enum class CatalogLaw {
  semicircle,       // (alpha, sigma): (1/2 pi sigma) sqrt(4 - ((x - alpha)/sigma)^2)
  free_poisson,     // (r): (1 - r)_+ delta_0 + sqrt((x+ - x)(x - x-)) / (2 pi x), x+- = (1 +- sqrt r)^2
  quarter_circle,   // (1/pi) sqrt(4 - x^2) on [0, 2]
  wishart_product,  // closed-form density of the free square of the Wishart law on [0, 27/4]
};

struct CatalogForm {
  CatalogLaw law = CatalogLaw::semicircle;
  double a = 0.0;
  double b = 0.0;
};

// Density read off an implicitly defined Green's function, rho = -Im G(x + i0) / pi.
struct AlgebraicForm {
  std::shared_ptr<const BranchTracker> green;
};

// Samples (lambda_i, rho_i), linearly interpolated.
struct GridForm {
  std::vector<double> lambda;
  std::vector<double> rho;
};

class SpectralDensity;

// Law of sqrt(X) for X >= 0 with law `base`: rho(l) = 2 l rho_base(l^2).
struct SquareRootForm {
  std::shared_ptr<const SpectralDensity> base;
};

/// Real-line spectral density: a continuous part on a union of closed intervals
/// plus an optional point mass at zero, which is carried separately and never
/// discretized.
class SpectralDensity {
 public:
  using Form = std::variant<CatalogForm, AlgebraicForm, GridForm, SquareRootForm>;

  SpectralDensity(std::vector<Interval> support, double point_mass_zero, Form form);

  const std::vector<Interval>& support() const noexcept { return support_; }
  double point_mass_zero() const noexcept { return point_mass_zero_; }
  const Form& form() const noexcept { return form_; }

  // Continuous part at lambda; zero off the support.
  double operator()(double lambda) const;
  bool on_support(double lambda) const;
  double support_radius() const;
  double lower() const { return support_.front().lo; }
  double upper() const { return support_.back().hi; }

  double continuous_mass() const;
  std::string describe() const;

 private:
  std::vector<Interval> support_;
  double point_mass_zero_;
  Form form_;
};

SpectralDensity semicircle(double alpha, double sigma);
// (1/2 pi) sqrt((4 - x)/x) on [0, 4].
SpectralDensity wishart();
// Free Poisson law with ratio r in (0, 1): point mass 1 - r at zero.
SpectralDensity anti_wishart_density(double r);
SpectralDensity free_poisson(double r);
SpectralDensity quarter_circle();
// Closed form (Cardano) of the product of two free Wishart laws.
SpectralDensity wishart_product_closed_form();
double wishart_product_closed_form_value(double lambda);
SpectralDensity grid_density(std::vector<double> lambda, std::vector<double> rho, double point_mass_zero = 0.0);
// "semicircle[:alpha,sigma]", "gue", "wishart", "free-poisson:r", "quarter-circle", "wishart-product".
SpectralDensity catalog_density(std::string_view text);

SpectralDensity square_root_pushforward(const SpectralDensity& base);
SpectralDensity algebraic_density(std::shared_ptr<const BranchTracker> green, std::vector<Interval> support,
                                  double point_mass_zero);

/// Cumulative distribution with cached per-piece masses; cheap to query many times.
class CdfTable {
 public:
  explicit CdfTable(const SpectralDensity& density, int pieces_per_interval = 256);
  double operator()(double x) const;
  // Smallest x with F(x) >= v; the atom at zero absorbs its whole mass range.
  double quantile(double v) const;
  const SpectralDensity& density() const noexcept { return density_; }

 private:
  struct Piece {
    double t0, t1;
    double cumulative_before;
  };
  double partial(std::size_t interval, double t0, double t1) const;
  double position(std::size_t interval, double t) const;

  SpectralDensity density_;
  std::vector<std::vector<Piece>> pieces_;
  std::vector<double> interval_start_mass_;
  double total_continuous_ = 0.0;
};

}  // namespace freeprod

#endif  // FREEPROD_DENSITY_HPP
