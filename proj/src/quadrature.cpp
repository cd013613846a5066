#include "freeprod/quadrature.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <queue>
#include <vector>

namespace freeprod::quad {

namespace {

constexpr int max_panels = 4000;
using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class T>
struct Panel {
  double a, b;
  T estimate;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// Globally adaptive: always bisect the panel with the largest error estimate,
// stopping at tolerance * L1 or after max_panels panels. Boost's recursive
// driver uses a purely relative tolerance per panel, which never terminates on
// vanishing integrals or on integrands with a roundoff floor.
template <class T, class F>
T integrate_impl(const F& f, double a, double b, double tolerance) {
  const auto panel = [&](double lo, double hi, double& l1) {
    double error = 0.0;
    const T estimate = Rule::integrate(f, lo, hi, 0, 0.0, &error, &l1);
    return Panel<T>{lo, hi, estimate, error};
  };
  double l1 = 0.0;
  std::priority_queue<Panel<T>> heap;
  heap.push(panel(a, b, l1));
  T total = heap.top().estimate;
  double total_error = heap.top().error;
  const double target = tolerance * std::max(std::abs(total), l1);
  int count = 1;
  while (total_error > target && count < max_panels) {
    const auto worst = heap.top();
    if (worst.error == 0.0) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    double l1_left = 0.0, l1_right = 0.0;
    const auto left = panel(worst.a, mid, l1_left);
    const auto right = panel(mid, worst.b, l1_right);
    total += left.estimate + right.estimate - worst.estimate;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift of the running updates.
  T sum{};
  while (!heap.empty()) {
    sum += heap.top().estimate;
    heap.pop();
  }
  return sum;
}

}  // namespace

double integrate(const RealFn& f, double a, double b, double tolerance) {
  if (a == b) return 0.0;
  return integrate_impl<double>(f, a, b, tolerance);
}

std::complex<double> integrate_complex(const ComplexIntegrand& f, double a, double b, double tolerance) {
  if (a == b) return 0.0;
  return integrate_impl<std::complex<double>>(f, a, b, tolerance);
}

double edge_map(double t) {
  // Regularized incomplete beta I_t(6, 6), a degree-11 polynomial.
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  static constexpr std::array<double, 12> binomial{1, 11, 55, 165, 330, 462, 462, 330, 165, 55, 11, 1};
  const double u = 1.0 - t;
  if (t > 0.5) return 1.0 - edge_map(u);
  double sum = 0.0;
  for (int j = 6; j <= 11; ++j) sum += binomial[j] * std::pow(t, j) * std::pow(u, 11 - j);
  return sum;
}

double edge_jacobian(double t) {
  const double u = t * (1.0 - t);
  return 2772.0 * u * u * u * u * u;
}

double edge_inverse(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return boost::math::ibeta_inv(6.0, 6.0, s);
}

double integrate_edges(const RealFn& f, double a, double b, double tolerance) {
  const double w = b - a;
  return integrate(
      [&](double t) {
        const double jacobian = edge_jacobian(t);
        if (jacobian == 0.0) return 0.0;
        return f(t <= 0.5 ? a + w * edge_map(t) : b - w * edge_map(1.0 - t)) * w * jacobian;
      },
      0.0, 1.0, tolerance);
}

std::complex<double> integrate_edges_complex(const ComplexIntegrand& f, double a, double b, double tolerance) {
  const double w = b - a;
  return integrate_complex(
      [&](double t) -> std::complex<double> {
        const double jacobian = edge_jacobian(t);
        if (jacobian == 0.0) return 0.0;
        return f(t <= 0.5 ? a + w * edge_map(t) : b - w * edge_map(1.0 - t)) * (w * jacobian);
      },
      0.0, 1.0, tolerance);
}

}  // namespace freeprod::quad
