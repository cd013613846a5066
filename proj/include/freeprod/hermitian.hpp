#ifndef FREEPROD_HERMITIAN_HPP
#define FREEPROD_HERMITIAN_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "freeprod/continuation.hpp"
#include "freeprod/density.hpp"
#include "freeprod/series.hpp"

namespace freeprod {

inline constexpr double epsilon_support = 1e-12;

struct MomentSequence {
  std::vector<double> m;  // m_1 .. m_K; m_0 = 1 is implicit

  int order() const noexcept { return static_cast<int>(m.size()); }
  double operator()(int n) const { return n == 0 ? 1.0 : m.at(n - 1); }
  // Hankel matrix of m_0 .. m_{2 floor(K/2)} is positive semi-definite up to tol (relative).
  bool hankel_psd(double tolerance = 1e-9) const;
};

struct FreeCumulantSequence {
  std::vector<double> kappa;  // kappa_1 .. kappa_K

  int order() const noexcept { return static_cast<int>(kappa.size()); }
  double operator()(int n) const { return kappa.at(n - 1); }
};

enum class TransformKind { green, phi, chi, r, s };

std::string to_string(TransformKind kind);

/// A transform known as a power series, as a callable, or both.
///
/// Series conventions: for phi, chi, R and S the series is the expansion at
/// z = 0. For the Green kind it is M(w) = 1 + m_1 w + m_2 w^2 + ..., so that
/// G(z) = M(1/z)/z.
struct TransformFn {
  TransformKind kind = TransformKind::green;
  std::optional<TruncatedSeries> series;
  ComplexFn closed_form;
  // Green only: G(lambda + i0+) for real lambda.
  std::function<cplx(double)> boundary;
  std::optional<double> atom_at_zero;
  // Any R with supp rho in [-R, R]; zero when unknown.
  double support_radius = 0.0;

  // Closed form when available, series otherwise.
  cplx operator()(cplx z) const;
  bool has_closed_form() const noexcept { return static_cast<bool>(closed_form); }
};

cplx green_from_density(const SpectralDensity& d, cplx z);
double density_from_green(const TransformFn& green, double lambda, double tolerance = 1e-6);
MomentSequence moments_from_density(const SpectralDensity& d, int order);

FreeCumulantSequence moments_to_cumulants(const MomentSequence& m);
MomentSequence cumulants_to_moments(const FreeCumulantSequence& kappa);

// Transforms of a density: catalog entries get exact callables, everything
// gets quadrature moments to the given order.
TransformFn green_transform(const SpectralDensity& d, int order = default_series_order);
TransformFn r_transform(const SpectralDensity& d, int order = default_series_order);
TransformFn s_transform(const SpectralDensity& d, int order = default_series_order);

// Transforms from coefficient lists.
TransformFn green_from_moments(const MomentSequence& m);
TransformFn r_from_cumulants(const FreeCumulantSequence& kappa);
MomentSequence moments_of(const TransformFn& t);

// Point mass at alpha: G = 1/(z - alpha), R = alpha, S = 1/alpha.
TransformFn point_mass_green(double alpha, int order = default_series_order);
TransformFn constant_transform(TransformKind kind, cplx value, int order = default_series_order);

TransformFn r_from_green(const TransformFn& green, int order = default_series_order);
// Green's function on the 1/z branch of G = 1/(z - R(G)).
cplx green_from_r(const TransformFn& r, cplx z);
std::shared_ptr<const BranchTracker> green_tracker_from_r(const TransformFn& r);

TransformFn free_add(const TransformFn& ra, const TransformFn& rb);

TransformFn phi_from_green(const TransformFn& green);
TransformFn chi_from_phi(const TransformFn& phi);
TransformFn s_from_chi(const TransformFn& chi);
TransformFn s_r_convert(const TransformFn& t);

TransformFn free_multiply_s(const TransformFn& sa, const TransformFn& sb);
// R_{ab}(z) from v = z Ra(w), w = z Rb(v).
cplx free_multiply_r(const TransformFn& ra, const TransformFn& rb, cplx z);
TransformFn free_multiply_r_series(const TransformFn& ra, const TransformFn& rb);

// Green's function defined by (zG - 1) S(zG - 1) = G.
std::shared_ptr<const BranchTracker> green_tracker_from_s(const TransformFn& s);
SpectralDensity density_from_tracker(std::shared_ptr<const BranchTracker> green, double radius, bool nonnegative,
                                     std::optional<double> atom_at_zero);
SpectralDensity density_from_s(const TransformFn& s);
SpectralDensity density_from_r(const TransformFn& r);
SpectralDensity density_of_product(const TransformFn& sa, const TransformFn& sb);

// V'(x) = 2 P.V. int rho(l)/(x - l) dl.
double potential_derivative(const SpectralDensity& d, double x);
// V(x) with V(lower edge of support) = 0.
double potential_from_density(const SpectralDensity& d, double x);

}  // namespace freeprod

#endif  // FREEPROD_HERMITIAN_HPP
