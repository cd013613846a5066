#include "freeprod/continuation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "freeprod/error.hpp"

namespace freeprod {

namespace {

constexpr cplx I{0.0, 1.0};

bool finite(cplx x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

}  // namespace

cplx holomorphic_derivative(const ComplexFn& f, cplx x) {
  const double h = 1e-5 * (1.0 + std::abs(x));
  return (f(x + h) - f(x - h) - I * (f(x + I * h) - f(x - I * h))) / (4.0 * h);
}

NewtonResult newton_solve(const ComplexFn& f, cplx x0, const ComplexFn& df, int max_iterations,
                          double tolerance) {
  NewtonResult r{x0, false, 0};
  cplx x = x0;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    const cplx fx = f(x);
    if (!finite(fx)) break;
    const cplx d = df ? df(x) : holomorphic_derivative(f, x);
    if (d == 0.0 || !finite(d)) break;
    const cplx step = fx / d;
    x -= step;
    r.iterations = it;
    if (!finite(x)) break;
    const double size = std::abs(step);
    const double scale = 1.0 + std::abs(x);
    // Also stop once the steps stall at the roundoff floor of f.
    const bool stalled = size <= 1e-9 * scale && (size > 0.5 * previous || it >= 6);
    previous = size;
    if (size <= tolerance * scale || stalled) {
      r.root = x;
      r.converged = true;
      return r;
    }
  }
  r.root = x;
  return r;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coefficients) {
  std::vector<cplx> c(coefficients.begin(), coefficients.end());
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  const int degree = static_cast<int>(c.size()) - 1;
  if (degree < 1) return {};
  // Substitute x = s y with |c_0| = |c_d s^d| so the roots are O(1); the
  // companion eigenvalues are garbage when the coefficients span many decades.
  const double s = (std::abs(c[0]) > 0.0) ? std::pow(std::abs(c[0]) / std::abs(c[degree]), 1.0 / degree) : 1.0;
  std::vector<cplx> scaled(c.size());
  double power = 1.0;
  for (int i = 0; i <= degree; ++i, power *= s) scaled[i] = c[i] * power;
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -scaled[i] / scaled[degree];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> roots(degree);
  for (int i = 0; i < degree; ++i) roots[i] = s * solver.eigenvalues()[i];
  return roots;
}

TrackResult track_root(const std::function<cplx(double, cplx)>& f, cplx x0) {
  auto at = [&](double t) { return [&f, t](cplx x) { return f(t, x); }; };
  const auto start = newton_solve(at(0.0), x0);
  TrackResult result{start.root, false, 0.0};
  if (!start.converged) return result;

  double t = 0.0;
  cplx x = start.root;
  double t_prev = 0.0;
  cplx x_prev = x;
  bool have_prev = false;
  double dt = 0.02;
  while (t < 1.0) {
    dt = std::min(dt, 1.0 - t);
    const double t_next = (1.0 - t - dt < 1e-15) ? 1.0 : t + dt;
    const cplx predicted = have_prev ? x + (x - x_prev) * ((t_next - t) / (t - t_prev)) : x;
    const auto step = newton_solve(at(t_next), predicted, {}, 12, 1e-14);
    const double jump = std::abs(step.root - predicted);
    const double scale = std::abs(x - x_prev) + 1e-3 * (1.0 + std::abs(x));
    if (step.converged && step.iterations <= 8 && jump <= 0.5 * scale) {
      t_prev = t;
      x_prev = x;
      have_prev = true;
      t = t_next;
      x = step.root;
      result.last_good_t = t;
      if (step.iterations <= 4) dt = std::min(0.25, dt * 2.0);
    } else {
      dt *= 0.5;
      if (dt < 1e-13) {
        result.value = x;
        return result;
      }
    }
  }
  result.value = x;
  result.ok = true;
  return result;
}

BranchTracker::BranchTracker(BivariateFn residual, double radius, PolynomialInG polynomial)
    : residual_(std::move(residual)), radius_(std::max(radius, 1e-3)), polynomial_(std::move(polynomial)) {}

cplx BranchTracker::dg(cplx z, cplx g) const {
  if (polynomial_) {
    const auto c = polynomial_(z);
    cplx acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * g + static_cast<double>(k) * c[k];
    return acc;
  }
  return holomorphic_derivative([&](cplx w) { return residual_(z, w); }, g);
}

cplx BranchTracker::evaluate(cplx z) const {
  const double height = 10.0 * radius_;
  const double side = z.imag() < 0.0 ? -1.0 : 1.0;
  const cplx base = (std::abs(z) >= height) ? z : cplx(z.real(), side * height);
  // Descend geometrically in Im z so that each step is a fixed fraction of the
  // distance to the real axis, where all the singularities live.
  double y_end = std::abs(z.imag());
  if (y_end == 0.0) y_end = std::max(std::min(1e-17 * height, 1e-8 * std::abs(z.real())), 1e-300);
  const double ratio = std::log(y_end / height);
  const auto path = [&](double t) {
    if (base == z) return z;
    if (t >= 1.0) return z;
    return cplx(z.real(), side * height * std::exp(t * ratio));
  };
  const auto tracked = track_root(
      [&](double t, cplx g) { return residual_(path(t), g); }, 1.0 / base);
  if (!tracked.ok) {
    std::ostringstream msg;
    msg << "lost the 1/z branch on the way to z=" << z << "; last good z=" << path(tracked.last_good_t);
    throw Error(ErrorCode::continuation_failure, msg.str());
  }
  cplx g = tracked.value;
  if (polynomial_) {
    // Tie-break among the polynomial roots by distance to the continued value.
    const auto roots = polynomial_roots(polynomial_(z));
    if (!roots.empty()) {
      const auto best = std::min_element(roots.begin(), roots.end(), [&](cplx a, cplx b) {
        return std::abs(a - g) < std::abs(b - g);
      });
      const auto polished = newton_solve([&](cplx w) { return residual_(z, w); }, *best,
                                         [&](cplx w) { return dg(z, w); }, 8);
      if (finite(polished.root) && std::abs(residual_(z, polished.root)) <= std::abs(residual_(z, g)))
        g = polished.root;
    }
  }
  return g;
}

cplx BranchTracker::boundary_value(double lambda) const { return evaluate(cplx(lambda, 0.0)); }

double BranchTracker::refine_edge(double lambda_guess) const {
  // Newton on (F, dF/dG) = 0 in the unknowns (z, G).
  cplx z = lambda_guess;
  cplx g = evaluate(cplx(lambda_guess, 1e-9));
  const auto F = [&](cplx zz, cplx gg) { return residual_(zz, gg); };
  const auto Fg = [&](cplx zz, cplx gg) { return dg(zz, gg); };
  for (int it = 0; it < 60; ++it) {
    const cplx f1 = F(z, g);
    const cplx f2 = Fg(z, g);
    const double h = 1e-6 * (1.0 + std::abs(z));
    const double hg = 1e-6 * (1.0 + std::abs(g));
    const cplx a11 = (F(z + h, g) - F(z - h, g)) / (2.0 * h);
    const cplx a12 = (F(z, g + hg) - F(z, g - hg)) / (2.0 * hg);
    const cplx a21 = (Fg(z + h, g) - Fg(z - h, g)) / (2.0 * h);
    const cplx a22 = (Fg(z, g + hg) - Fg(z, g - hg)) / (2.0 * hg);
    const cplx det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !finite(det)) break;
    const cplx dz = (f1 * a22 - a12 * f2) / det;
    const cplx dgv = (a11 * f2 - a21 * f1) / det;
    z -= dz;
    g -= dgv;
    if (std::abs(dz) < 1e-14 * (1.0 + std::abs(z)) && std::abs(dgv) < 1e-12 * (1.0 + std::abs(g))) break;
  }
  if (!finite(z) || std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z)))
    throw Error(ErrorCode::no_convergence, "edge refinement did not reach a real branch point");
  return z.real();
}

}  // namespace freeprod
