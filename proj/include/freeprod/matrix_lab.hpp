#ifndef FREEPROD_MATRIX_LAB_HPP
#define FREEPROD_MATRIX_LAB_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freeprod/density.hpp"
#include "freeprod/isotropic.hpp"

namespace freeprod {

using CMatrix = Eigen::MatrixXcd;

enum class EnsembleKind { gue, ginibre, elliptic, haar_unitary, wishart, diagonal, isotropic, shifted_scaled };

std::string to_string(EnsembleKind kind);

/// Normalizations: GUE has E|a_ij|^2 = 1/N (spectrum -> semicircle on [-2, 2]),
/// Ginibre has iid entries of variance 1/N (spectrum -> unit disk).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gue;
  int n = 2;
  std::uint64_t seed = 0;
  double tau = 0.0;                        // elliptic: tau = cos 2 alpha
  std::shared_ptr<const CdfTable> law;     // diagonal entries, or isotropic singular values
  cplx shift = 0.0;                        // shifted_scaled: shift + scale * base
  double scale = 1.0;
  std::shared_ptr<const EnsembleSpec> base;

  static EnsembleSpec gue(int n, std::uint64_t seed = 0);
  static EnsembleSpec ginibre(int n, std::uint64_t seed = 0);
  static EnsembleSpec elliptic(int n, double tau, std::uint64_t seed = 0);
  static EnsembleSpec elliptic_alpha(int n, double alpha, std::uint64_t seed = 0);
  static EnsembleSpec haar_unitary(int n, std::uint64_t seed = 0);
  static EnsembleSpec wishart(int n, std::uint64_t seed = 0);
  static EnsembleSpec diagonal(int n, const SpectralDensity& d, std::uint64_t seed = 0);
  static EnsembleSpec isotropic(int n, const SpectralDensity& singular_values, std::uint64_t seed = 0);
  static EnsembleSpec shifted_scaled(cplx shift, double scale, const EnsembleSpec& base);

  // Same ensemble at another size or seed (propagates into the base).
  EnsembleSpec with(int size, std::uint64_t new_seed) const;
  std::string describe() const;
  void validate() const;
};

// "gue", "ginibre", "haar", "wishart", "elliptic:<tau>", "semicircle-diag",
// "isotropic:anti-wishart:<r>", with an optional "<q>+" prefix and "<s>*"
// scale, e.g. "1+ginibre" or "1+0.5*gue".
EnsembleSpec parse_ensemble(std::string_view text, int n, std::uint64_t seed);

// Pure function of (spec, index, factor).
CMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t index, std::uint64_t factor = 0);

enum class SpectrumKind { eigen, singular };

struct SpectrumSample {
  std::vector<cplx> values;  // singular values are real, sorted nonincreasing
  SpectrumKind kind = SpectrumKind::eigen;
  std::string source;
  std::uint64_t index = 0;

  std::vector<double> moduli() const;
  std::vector<double> real_parts() const;
};

// LAPACK: zheevd for exactly Hermitian input, zgeev otherwise, zgesdd for singular values.
SpectrumSample spectrum(const CMatrix& m, SpectrumKind kind);

// Factors multiplied left to right. independent = false draws one matrix and
// raises it to the number of factors. Samples run on `threads` workers and
// are pooled in index order.
SpectrumSample product_spectrum(std::span<const EnsembleSpec> specs, int samples, SpectrumKind kind,
                                bool independent = true, int threads = 1);

// a_0 + u^dagger a_1 u + v^dagger a_2 v + ...: diagonal factors conjugated by fresh Haar unitaries.
SpectrumSample free_sum_spectrum(std::span<const EnsembleSpec> specs, int samples, int threads = 1);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);
  double operator()(double x) const;
  const std::vector<double>& sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_radial_cdf(const SpectrumSample& s);

struct ComparisonReport {
  std::string ensemble;
  int n_factors = 1;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double ks_radial = 0.0;
  double l1_density = 0.0;
  double outlier_fraction = 0.0;
  double mass_inside_contour = 0.0;
  double wall_seconds = 0.0;
  bool pass = true;
};

// Radial KS and L1 (64 bins on [0, 1.05 R_e]) of the moduli against F.
ComparisonReport compare(const SpectrumSample& s, const RadialLaw& law);
// 1-D KS and L1 (64 bins over the support +- 5%). Eigenvalues must be real
// up to 1e-8 relative.
ComparisonReport compare(const SpectrumSample& s, const SpectralDensity& d);
// Fraction of eigenvalues outside the region.
ComparisonReport compare(const SpectrumSample& s, const std::function<bool(cplx)>& inside);

// Fraction of |lambda| below 10/N.
double near_zero_fraction(const SpectrumSample& s, int n);

}  // namespace freeprod

#endif  // FREEPROD_MATRIX_LAB_HPP
