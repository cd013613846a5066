#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freeprod/density.hpp"
#include "freeprod/error.hpp"
#include "freeprod/hermitian.hpp"
#include "freeprod/isotropic.hpp"
#include "freeprod/matrix_lab.hpp"
#include "freeprod/quaternionic.hpp"
#include "freeprod/stats.hpp"

namespace py = pybind11;
using namespace freeprod;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class F>
py::array_t<double> map_array(const DoubleArray& x, F&& f) {
  py::array_t<double> out(x.request().shape);
  const double* in = x.data();
  double* o = out.mutable_data();
  for (py::ssize_t k = 0; k < x.size(); ++k) o[k] = f(in[k]);
  return out;
}

std::vector<double> to_vector(const DoubleArray& x) { return {x.data(), x.data() + x.size()}; }

std::vector<double> real_coefficients(const TruncatedSeries& s) {
  std::vector<double> out;
  for (cplx c : s.coeffs()) out.push_back(c.real());
  return out;
}

py::dict density_dict(const SpectralDensity& d, const DoubleArray& x) {
  py::dict out;
  out["x"] = x;
  out["rho"] = map_array(x, [&](double v) { return d(v); });
  py::list support;
  for (const auto& iv : d.support()) support.append(py::make_tuple(iv.lo, iv.hi));
  out["support"] = support;
  out["point_mass_zero"] = d.point_mass_zero();
  return out;
}

}  // namespace

PYBIND11_MODULE(_freeprod, m) {
  m.doc() = "Free probability transforms, isotropic and quaternionic laws, and Monte Carlo spectra";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "density", [](const std::string& law, const DoubleArray& x) {
        const SpectralDensity d = catalog_density(law);
        return map_array(x, [&](double v) { return d(v); });
      },
      py::arg("law"), py::arg("x"), "Density of a catalogue law such as 'semicircle:0,1' or 'free-poisson:0.5'.");

  m.def("moments_to_cumulants",
        [](std::vector<double> moments) { return moments_to_cumulants({std::move(moments)}).kappa; });
  m.def("cumulants_to_moments",
        [](std::vector<double> kappa) { return cumulants_to_moments({std::move(kappa)}).m; });

  m.def(
      "free_add", [](const std::string& a, const std::string& b, const DoubleArray& x, int order) {
        const TransformFn r = free_add(r_transform(catalog_density(a), order), r_transform(catalog_density(b), order));
        py::dict out = density_dict(density_from_r(r), x);
        out["r_coefficients"] = real_coefficients(*r.series);
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("x"), py::arg("order") = 16);

  m.def(
      "free_multiply", [](const std::string& a, const std::string& b, const DoubleArray& x, int order) {
        const TransformFn s =
            free_multiply_s(s_transform(catalog_density(a), order), s_transform(catalog_density(b), order));
        py::dict out = density_dict(density_from_s(s), x);
        out["s_coefficients"] = real_coefficients(*s.series);
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("x"), py::arg("order") = 16);

  m.def(
      "fuss_catalan_density", [](int n, const DoubleArray& x) {
        const SpectralDensity d = fuss_catalan_density(n);
        return map_array(x, [&](double v) { return d(v); });
      },
      py::arg("n"), py::arg("x"));

  m.def(
      "ginibre_product_cdf", [](int n, const DoubleArray& x) {
        const std::vector<RadialLaw> laws(n, ginibre_radial());
        const RadialLaw law = isotropic_product(laws);
        return map_array(x, [&](double v) { return law.cdf(v); });
      },
      py::arg("n"), py::arg("x"), "Radial eigenvalue CDF of a product of n independent Ginibre matrices.");

  m.def(
      "radial_from_s_of_singular_law",
      [](const std::string& law, const DoubleArray& x, double point_mass) {
        const RadialLaw radial = hl_radial_from_s(s_transform_of_square(catalog_density(law)), point_mass);
        return map_array(x, [&](double v) { return radial.cdf(v); });
      },
      py::arg("law"), py::arg("x"), py::arg("point_mass") = 0.0,
      "Radial eigenvalue CDF of an isotropic matrix whose singular values follow the given law.");

  m.def(
      "spectrum",
      [](const std::vector<std::string>& factors, int size, int samples, std::uint64_t seed, const std::string& kind,
         bool independent) {
        if (kind != "eigen" && kind != "singular") throw Error(ErrorCode::invalid_argument, "kind is eigen or singular");
        std::vector<EnsembleSpec> specs;
        for (const auto& f : factors) specs.push_back(parse_ensemble(f, size, seed));
        SpectrumSample s;
        {
          py::gil_scoped_release release;
          s = product_spectrum(specs, samples, kind == "eigen" ? SpectrumKind::eigen : SpectrumKind::singular,
                               independent);
        }
        return py::array_t<cplx>(static_cast<py::ssize_t>(s.values.size()), s.values.data());
      },
      py::arg("factors"), py::arg("size"), py::arg("samples") = 1, py::arg("seed") = 1, py::arg("kind") = "eigen",
      py::arg("independent") = true);

  m.def(
      "ks_two_sample",
      [](const DoubleArray& a, const DoubleArray& b) { return stats::ks_two_sample(to_vector(a), to_vector(b)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "quaternionic_product",
      [](const std::string& a, const std::string& b, int points, double half_width) {
        const GaussianQR qa = parse_gaussian_qr(a), qb = parse_gaussian_qr(b);
        const GridSpec grid = half_width > 0.0 ? GridSpec{half_width, points} : default_grid(qa, qb, points);
        PlanarField field;
        Contour contour;
        {
          py::gil_scoped_release release;
          field = qmultiply_solve(qa, qb, grid);
          contour = support_contour(field);
        }
        const auto n = static_cast<py::ssize_t>(points);
        py::array_t<double> axis(n), rho({n, n}), b_sq({n, n});
        py::array_t<bool> inside({n, n});
        for (int k = 0; k < points; ++k) axis.mutable_at(k) = grid.point(k, 0).real();
        for (int j = 0; j < points; ++j)
          for (int i = 0; i < points; ++i) {
            const auto idx = field.index(i, j);
            rho.mutable_at(j, i) = field.rho[idx];
            b_sq.mutable_at(j, i) = field.b_sq[idx];
            inside.mutable_at(j, i) = field.inside[idx] != 0;
          }
        py::list loops;
        for (const auto& loop : contour.loops)
          loops.append(py::array_t<cplx>(static_cast<py::ssize_t>(loop.size()), loop.data()));
        py::dict out;
        out["axis"] = axis;
        out["rho"] = rho;
        out["b_sq"] = b_sq;
        out["inside"] = inside;
        out["contour"] = loops;
        out["mass"] = field.mass();
        out["unresolved"] = field.unresolved_count();
        return out;
      },
      py::arg("a") = "ginibre", py::arg("b") = "ginibre", py::arg("points") = 129, py::arg("half_width") = 0.0,
      "Quaternionic solve for a product of two Gaussian factors; rho[j, i] sits at axis[i] + 1j * axis[j].");
}
