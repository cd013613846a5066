#ifndef FREEPROD_QUADRATURE_HPP
#define FREEPROD_QUADRATURE_HPP

#include <complex>
#include <functional>

namespace freeprod::quad {

using RealFn = std::function<double(double)>;
using ComplexIntegrand = std::function<std::complex<double>(double)>;

// Adaptive 31-point Gauss-Kronrod on [a, b].
double integrate(const RealFn& f, double a, double b, double tolerance = 1e-12);
std::complex<double> integrate_complex(const ComplexIntegrand& f, double a, double b, double tolerance = 1e-12);

// Same rule after the change of variable lambda = a + (b - a) I_t(6, 6), which
// vanishes to sixth order at both ends and so flattens square-root edges and
// integrable power singularities down to lambda^(-5/6).
double integrate_edges(const RealFn& f, double a, double b, double tolerance = 1e-12);
std::complex<double> integrate_edges_complex(const ComplexIntegrand& f, double a, double b, double tolerance = 1e-12);

// The map t -> I_t(6, 6) on [0, 1], its derivative and its inverse.
double edge_map(double t);
double edge_jacobian(double t);
double edge_inverse(double s);

}  // namespace freeprod::quad

#endif  // FREEPROD_QUADRATURE_HPP
