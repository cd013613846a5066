#ifndef FREEPROD_CONTINUATION_HPP
#define FREEPROD_CONTINUATION_HPP

#include <functional>
#include <span>
#include <vector>

#include "freeprod/series.hpp"

namespace freeprod {

using ComplexFn = std::function<cplx(cplx)>;
using BivariateFn = std::function<cplx(cplx z, cplx g)>;
// Coefficients c_0..c_d of a polynomial in g whose root set is the branch set at z.
using PolynomialInG = std::function<std::vector<cplx>(cplx z)>;

struct NewtonResult {
  cplx root;
  bool converged = false;
  int iterations = 0;
};

// Central difference on a circle of radius h around x (exact to O(h^4) for holomorphic f).
cplx holomorphic_derivative(const ComplexFn& f, cplx x);

NewtonResult newton_solve(const ComplexFn& f, cplx x0, const ComplexFn& df = {}, int max_iterations = 60,
                          double tolerance = 1e-14);

std::vector<cplx> polynomial_roots(std::span<const cplx> coefficients);

struct TrackResult {
  cplx value;
  bool ok = false;
  double last_good_t = 0.0;
};

/// Follows the root x(t) of f(t, x) = 0 from t = 0 to t = 1 with a secant
/// predictor and Newton corrector. x0 must be (close to) the root at t = 0.
TrackResult track_root(const std::function<cplx(double, cplx)>& f, cplx x0);

/// Green's function defined implicitly by F(z, G) = 0 on the branch with
/// G ~ 1/z at infinity. Each evaluation continues the root from a base point
/// Re z + i*10*radius (same half-plane as z) where the 1/z seed is reliable.
class BranchTracker {
 public:
  BranchTracker(BivariateFn residual, double radius, PolynomialInG polynomial = {});

  cplx evaluate(cplx z) const;
  // G(lambda + i0+), the boundary value from the upper half-plane.
  cplx boundary_value(double lambda) const;
  // Real branch point (double root in G) nearest to lambda_guess.
  double refine_edge(double lambda_guess) const;

  double radius() const noexcept { return radius_; }
  const BivariateFn& residual() const noexcept { return residual_; }

 private:
  cplx dg(cplx z, cplx g) const;

  BivariateFn residual_;
  double radius_;
  PolynomialInG polynomial_;
};

}  // namespace freeprod

#endif  // FREEPROD_CONTINUATION_HPP
