#ifndef FREEPROD_ISOTROPIC_HPP
#define FREEPROD_ISOTROPIC_HPP

#include <span>
#include <string>
#include <vector>

#include "freeprod/density.hpp"
#include "freeprod/hermitian.hpp"

namespace freeprod {

enum class RingShape { ring, disk, disk_with_point_mass };

std::string to_string(RingShape shape);

/// Radial eigenvalue CDF F(x) = Prob(|lambda| <= x) of an isotropic matrix.
///
/// Three representations: an exact power law p0 + (1 - p0) (x/R)^p on [0, R],
/// a step at R (all eigenvalues on a circle), or monotone cubic Hermite data
/// on [R_i, R_e] solved from an S transform.
class RadialLaw {
 public:
  enum class Kind { power, step, grid };

  static RadialLaw power(double exponent, double radius = 1.0, double point_mass = 0.0);
  static RadialLaw step(double radius = 1.0);
  // Nodes must be increasing and span [inner, outer]; slopes are dF/dx.
  static RadialLaw grid(std::vector<double> x, std::vector<double> f, std::vector<double> slope,
                        double point_mass);

  double cdf(double x) const;
  double cdf_derivative(double x) const;
  // Smallest x with F(x) >= v, for v in (p0, 1].
  double inverse_cdf(double v) const;

  Kind kind() const noexcept { return kind_; }
  double point_mass() const noexcept { return p0_; }
  double inner_radius() const noexcept { return inner_; }
  double outer_radius() const noexcept { return outer_; }
  double exponent() const noexcept { return exponent_; }
  RingShape shape() const;
  // Grid data: nodes, F at the nodes, and left-limit slopes.
  const std::vector<double>& nodes() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return f_; }
  const std::vector<double>& slopes() const noexcept { return slope_; }

  std::string describe() const;

 private:
  RadialLaw() = default;
  std::size_t interval_of(double x) const;

  Kind kind_ = Kind::power;
  double p0_ = 0.0;
  double inner_ = 0.0;
  double outer_ = 1.0;
  double exponent_ = 2.0;
  std::vector<double> x_, f_, slope_;
  double tail_exponent_ = 0.0;  // grid: F - p0 ~ x^tail below the first node when inner = 0
};

RadialLaw ginibre_radial();

double planar_density(const RadialLaw& law, cplx z);

// F(x) from S_{a^2}(F(x) - 1) = 1/x^2 on a 512-point geometric grid.
RadialLaw hl_radial_from_s(const TransformFn& s, double point_mass);
// S_{a^2}(u) = F^{-1}(u + 1)^{-2}. Complex arguments only for power and step laws.
TransformFn hl_s_from_radial(const RadialLaw& law, int order = default_series_order);

// S transform of a^2 for a singular-value law rho_a, real arguments only,
// tabulated through psi(x) = int x l^2 / (1 - x l^2) rho_a(l) dl.
TransformFn s_transform_of_square(const SpectralDensity& rho_a);

// Singular-value law rho_a(l) = 2 l rho_{a^2}(l^2) of an isotropic matrix.
SpectralDensity singular_value_density(const RadialLaw& law);

// The product's point mass is the largest factor mass (see README).
RadialLaw isotropic_product(std::span<const RadialLaw> laws);
RadialLaw power_law(const RadialLaw& law, int n);

struct PointMasses {
  double power;    // A^n
  double product;  // A_1 ... A_n with iid factors
};
PointMasses point_masses(const RadialLaw& law, int n);

// Green's function of z^n G^{n+1} - zG + 1 = 0: squared singular values of a
// product of n Ginibre matrices.
std::shared_ptr<const BranchTracker> fuss_catalan_tracker(int n);
cplx fuss_catalan_green(int n, cplx z);
double fuss_catalan_edge(int n);
SpectralDensity fuss_catalan_density(int n);

// Least-squares slope of log rho against log lambda at log-spaced points in [lo, hi].
double fit_power_exponent(const SpectralDensity& d, double lo, double hi, int points = 9);

}  // namespace freeprod

#endif  // FREEPROD_ISOTROPIC_HPP
