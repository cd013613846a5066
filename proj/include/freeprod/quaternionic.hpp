#ifndef FREEPROD_QUATERNIONIC_HPP
#define FREEPROD_QUATERNIONIC_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "freeprod/series.hpp"

namespace freeprod {

using Quaternion = Eigen::Matrix2cd;

/// [[g, i b], [i conj(b), conj(g)]]
struct QuaternionicGreen {
  cplx g{0.0, 0.0};
  cplx b{0.0, 0.0};

  Quaternion matrix() const;
  double det() const { return std::norm(g) + std::norm(b); }
};

Quaternion make_quaternion(cplx g, cplx b);

/// A = q 1 + sigma X with X elliptic of correlation tau. sigma is the scale of
/// A, so the second cumulant, and hence the R transform, carries sigma^2.
struct GaussianQR {
  cplx q{0.0, 0.0};
  double sigma = 1.0;
  double tau = 0.0;

  Quaternion r_transform(const Quaternion& g) const;
  void validate() const;
};

GaussianQR ginibre_qr();
GaussianQR gue_qr();
// "ginibre", "gue", "elliptic:<tau>", or "q=<re>[+<im>i],s=<sigma>,tau=<tau>" with any key omitted.
GaussianQR parse_gaussian_qr(std::string_view text);
std::string describe(const GaussianQR& a);

// Single matrix: G = (Z - R(G))^-1 by Newton on (g, b); the |b| > 0 solution wins when it exists.
QuaternionicGreen qgreen_from_qr(const GaussianQR& a, cplx z);

struct GridSpec {
  double half_width = 1.25;
  int points = 257;

  double h() const { return 2.0 * half_width / (points - 1); }
  cplx point(int i, int j) const { return {-half_width + i * h(), -half_width + j * h()}; }
};

/// Solved product (or single-matrix) field on a square lattice; i runs along
/// Re z and j along Im z.
struct PlanarField {
  GridSpec grid;
  std::vector<cplx> g;         // upper-left element of the Green's function
  std::vector<double> b_sq;    // |b|^2 of the (first) factor, zero outside
  std::vector<char> inside;    // non-trivial solution selected
  std::vector<char> resolved;  // Newton converged
  std::vector<double> rho;     // Gauss-law density, zero on the lattice border

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * grid.points + i; }
  int unresolved_count() const;
  double mass() const;
  double mass_where(const std::function<bool(cplx)>& keep) const;
};

PlanarField qsingle_solve(const GaussianQR& a, const GridSpec& grid);
PlanarField qmultiply_solve(const GaussianQR& a, const GaussianQR& b, const GridSpec& grid);
// Grid of half width 1.25 R_e, R_e read off a coarse solve.
GridSpec default_grid(const GaussianQR& a, const GaussianQR& b, int points = 257);

// (1/2 pi) div (Re g, -Im g) by central differences.
double density_from_field(const PlanarField& field, int i, int j);

/// Closed polylines of the |b|^2 = 0 level set; membership is even-odd.
struct Contour {
  std::vector<std::vector<cplx>> loops;

  bool contains(cplx z) const;
  std::size_t vertex_count() const;
  // Largest distance from a vertex to the given curve.
  double max_distance_to(const std::function<double(cplx)>& distance) const;
};

Contour support_contour(const PlanarField& field);

struct ClosedFormProduct {
  std::string name;
  std::function<double(cplx)> rho;
  double outer_radius = 1.0;
};

// "ginibre*ginibre" or "elliptic*elliptic" (any tau_A, tau_B): rho = 1/(2 pi |z|) on the unit disk.
ClosedFormProduct closed_form_product(std::string_view kind);

// Distance from z to r = 1 + 2 cos(phi), the boundary for (1 + X1)(1 + X2).
double limacon_distance(cplx z);
std::vector<cplx> limacon_outline(int points = 2048);

}  // namespace freeprod

#endif  // FREEPROD_QUATERNIONIC_HPP
