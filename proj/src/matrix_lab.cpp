#include "freeprod/matrix_lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <regex>
#include <sstream>
#include <thread>

// LAPACKE must see std::complex before its own complex typedefs.
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "freeprod/error.hpp"
#include "freeprod/rng.hpp"
#include "freeprod/stats.hpp"

extern "C" void zgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
                       const std::complex<double>* alpha, const std::complex<double>* a, const int* lda,
                       const std::complex<double>* b, const int* ldb, const std::complex<double>* beta,
                       std::complex<double>* c, const int* ldc);

namespace freeprod {

namespace {

void backend_check(lapack_int info, const char* routine) {
  if (info != 0) {
    std::ostringstream msg;
    msg << routine << " returned info = " << info;
    throw Error(ErrorCode::backend_failure, msg.str());
  }
}

// op(a) * b through BLAS; op is 'N' or 'C' (conjugate transpose).
CMatrix multiply(const CMatrix& a, const CMatrix& b, char op_a = 'N') {
  const int m = static_cast<int>(op_a == 'N' ? a.rows() : a.cols());
  const int k = static_cast<int>(op_a == 'N' ? a.cols() : a.rows());
  const int n = static_cast<int>(b.cols());
  CMatrix c(m, n);
  const cplx one = 1.0, zero = 0.0;
  const int lda = static_cast<int>(a.rows()), ldb = static_cast<int>(b.rows());
  zgemm_(&op_a, "N", &m, &n, &k, &one, a.data(), &lda, b.data(), &ldb, &zero, c.data(), &m);
  return c;
}

CMatrix ginibre_draw(int n, Rng& rng, double scale) {
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = scale * rng.complex_normal();
  return m;
}

CMatrix gue_draw(int n, Rng& rng) {
  const CMatrix g = ginibre_draw(n, rng, 1.0 / std::sqrt(static_cast<double>(n)));
  CMatrix h = (g + g.adjoint()) * M_SQRT1_2;
  for (int i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  return h;
}

// Q of a QR factorization with the phases of diag(R) moved into Q.
CMatrix haar_draw(int n, Rng& rng) {
  CMatrix q = ginibre_draw(n, rng, 1.0);
  std::vector<cplx> tau(n);
  backend_check(LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, n, q.data(), n, tau.data()), "zgeqrf");
  std::vector<cplx> phase(n);
  for (int k = 0; k < n; ++k) {
    const double mod = std::abs(q(k, k));
    phase[k] = mod > 0.0 ? q(k, k) / mod : 1.0;
  }
  backend_check(LAPACKE_zungqr(LAPACK_COL_MAJOR, n, n, n, q.data(), n, tau.data()), "zungqr");
  for (int k = 0; k < n; ++k) q.col(k) *= phase[k];
  return q;
}

Eigen::VectorXd quantile_draws(const CdfTable& law, int n, Rng& rng) {
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = law.quantile(rng.uniform());
  return d;
}

CMatrix draw(const EnsembleSpec& spec, Rng& rng) {
  const int n = spec.n;
  switch (spec.kind) {
    case EnsembleKind::gue:
      return gue_draw(n, rng);
    case EnsembleKind::ginibre:
      return ginibre_draw(n, rng, 1.0 / std::sqrt(static_cast<double>(n)));
    case EnsembleKind::elliptic: {
      const double alpha = 0.5 * std::acos(std::clamp(spec.tau, -1.0, 1.0));
      const CMatrix a = gue_draw(n, rng);
      const CMatrix b = gue_draw(n, rng);
      return std::cos(alpha) * a + cplx(0.0, std::sin(alpha)) * b;
    }
    case EnsembleKind::haar_unitary:
      return haar_draw(n, rng);
    case EnsembleKind::wishart: {
      const CMatrix a = gue_draw(n, rng);
      CMatrix w = multiply(a, a, 'C');
      // a^dagger a is Hermitian; make it so bit for bit.
      return (0.5 * (w + w.adjoint())).eval();
    }
    case EnsembleKind::diagonal:
      return quantile_draws(*spec.law, n, rng).cast<cplx>().asDiagonal();
    case EnsembleKind::isotropic: {
      const Eigen::VectorXd s = quantile_draws(*spec.law, n, rng);
      const CMatrix u = haar_draw(n, rng);
      const CMatrix v = haar_draw(n, rng);
      const CMatrix su = s.cast<cplx>().asDiagonal() * u;
      return multiply(v, su, 'C');
    }
    case EnsembleKind::shifted_scaled: {
      CMatrix m = spec.scale * draw(*spec.base, rng);
      m.diagonal().array() += spec.shift;
      return m;
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown ensemble");
}

bool exactly_hermitian(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (m(i, j) != std::conj(m(j, i))) return false;
  return true;
}

template <typename Task>
std::vector<SpectrumSample> run_samples(int samples, int threads, Task task) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "need at least one sample");
  std::vector<SpectrumSample> out(samples);
  std::vector<std::exception_ptr> errors(samples);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int k; (k = next.fetch_add(1)) < samples;) {
      try {
        out[k] = task(static_cast<std::uint64_t>(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, samples);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

SpectrumSample pool(std::vector<SpectrumSample> parts, std::string source) {
  SpectrumSample all;
  all.kind = parts.front().kind;
  all.source = std::move(source);
  for (auto& p : parts) all.values.insert(all.values.end(), p.values.begin(), p.values.end());
  return all;
}

void check_sizes(std::span<const EnsembleSpec> specs) {
  if (specs.empty()) throw Error(ErrorCode::invalid_argument, "no factors");
  for (const auto& s : specs) {
    s.validate();
    if (s.n != specs.front().n) throw Error(ErrorCode::invalid_argument, "factors must share N");
  }
}

std::string joined(std::span<const EnsembleSpec> specs, const char* sep) {
  std::string out;
  for (const auto& s : specs) out += (out.empty() ? "" : sep) + s.describe();
  return out;
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::gue: return "gue";
    case EnsembleKind::ginibre: return "ginibre";
    case EnsembleKind::elliptic: return "elliptic";
    case EnsembleKind::haar_unitary: return "haar";
    case EnsembleKind::wishart: return "wishart";
    case EnsembleKind::diagonal: return "diagonal";
    case EnsembleKind::isotropic: return "isotropic";
    case EnsembleKind::shifted_scaled: return "shifted_scaled";
  }
  return "?";
}

namespace {

EnsembleSpec bare(EnsembleKind kind, int n, std::uint64_t seed) {
  EnsembleSpec s;
  s.kind = kind;
  s.n = n;
  s.seed = seed;
  return s;
}

}  // namespace

EnsembleSpec EnsembleSpec::gue(int n, std::uint64_t seed) { return bare(EnsembleKind::gue, n, seed); }
EnsembleSpec EnsembleSpec::ginibre(int n, std::uint64_t seed) { return bare(EnsembleKind::ginibre, n, seed); }
EnsembleSpec EnsembleSpec::haar_unitary(int n, std::uint64_t seed) { return bare(EnsembleKind::haar_unitary, n, seed); }
EnsembleSpec EnsembleSpec::wishart(int n, std::uint64_t seed) { return bare(EnsembleKind::wishart, n, seed); }

EnsembleSpec EnsembleSpec::elliptic(int n, double tau, std::uint64_t seed) {
  EnsembleSpec s = bare(EnsembleKind::elliptic, n, seed);
  s.tau = tau;
  return s;
}

EnsembleSpec EnsembleSpec::elliptic_alpha(int n, double alpha, std::uint64_t seed) {
  return elliptic(n, std::cos(2.0 * alpha), seed);
}

EnsembleSpec EnsembleSpec::diagonal(int n, const SpectralDensity& d, std::uint64_t seed) {
  EnsembleSpec s = bare(EnsembleKind::diagonal, n, seed);
  s.law = std::make_shared<const CdfTable>(d);
  return s;
}

EnsembleSpec EnsembleSpec::isotropic(int n, const SpectralDensity& singular_values, std::uint64_t seed) {
  for (const auto& iv : singular_values.support())
    if (iv.lo < 0.0) throw Error(ErrorCode::invalid_argument, "singular values must be >= 0");
  EnsembleSpec s = bare(EnsembleKind::isotropic, n, seed);
  s.law = std::make_shared<const CdfTable>(singular_values);
  return s;
}

EnsembleSpec EnsembleSpec::shifted_scaled(cplx shift, double scale, const EnsembleSpec& base) {
  EnsembleSpec s = bare(EnsembleKind::shifted_scaled, base.n, base.seed);
  s.shift = shift;
  s.scale = scale;
  s.base = std::make_shared<const EnsembleSpec>(base);
  return s;
}

EnsembleSpec EnsembleSpec::with(int size, std::uint64_t new_seed) const {
  EnsembleSpec s = *this;
  s.n = size;
  s.seed = new_seed;
  if (base) s.base = std::make_shared<const EnsembleSpec>(base->with(size, new_seed));
  return s;
}

std::string EnsembleSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case EnsembleKind::elliptic: out << "elliptic:" << tau; break;
    case EnsembleKind::diagonal: out << "diagonal(" << law->density().describe() << ")"; break;
    case EnsembleKind::isotropic: out << "isotropic(" << law->density().describe() << ")"; break;
    case EnsembleKind::shifted_scaled:
      if (shift != 0.0) out << shift.real() << "+";
      if (scale != 1.0) out << scale << "*";
      out << base->describe();
      break;
    default: out << to_string(kind);
  }
  return out.str();
}

void EnsembleSpec::validate() const {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "N must be at least 2");
  if (kind == EnsembleKind::elliptic && !(tau >= -1.0 && tau <= 1.0))
    throw Error(ErrorCode::invalid_argument, "tau must lie in [-1, 1]");
  if ((kind == EnsembleKind::diagonal || kind == EnsembleKind::isotropic) && !law)
    throw Error(ErrorCode::invalid_argument, "missing law");
  if (kind == EnsembleKind::shifted_scaled) {
    if (!base) throw Error(ErrorCode::invalid_argument, "missing base ensemble");
    base->validate();
  }
}

EnsembleSpec parse_ensemble(std::string_view text, int n, std::uint64_t seed) {
  static const std::regex shape(R"(^\s*(?:([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\+)?(?:([0-9.]+(?:[eE][-+]?[0-9]+)?)\*)?([a-z:\-0-9.]+)\s*$)");
  std::cmatch m;
  if (!std::regex_match(text.begin(), text.end(), m, shape))
    throw Error(ErrorCode::invalid_argument, "cannot parse ensemble '" + std::string(text) + "'");
  const std::string name = m[3].str();
  EnsembleSpec base;
  try {
    if (name == "gue") {
      base = EnsembleSpec::gue(n, seed);
    } else if (name == "ginibre") {
      base = EnsembleSpec::ginibre(n, seed);
    } else if (name == "haar") {
      base = EnsembleSpec::haar_unitary(n, seed);
    } else if (name == "wishart") {
      base = EnsembleSpec::wishart(n, seed);
    } else if (name.rfind("elliptic:", 0) == 0) {
      base = EnsembleSpec::elliptic(n, std::stod(name.substr(9)), seed);
    } else if (name == "semicircle-diag") {
      base = EnsembleSpec::diagonal(n, semicircle(0.0, 1.0), seed);
    } else if (name.rfind("isotropic:anti-wishart:", 0) == 0) {
      base = EnsembleSpec::isotropic(n, anti_wishart_density(std::stod(name.substr(23))), seed);
    } else if (name == "isotropic:ginibre") {
      base = EnsembleSpec::isotropic(n, quarter_circle(), seed);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown ensemble '" + name + "'");
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::invalid_argument, "bad parameter in '" + name + "'");
  }
  base.validate();
  if (!m[1].matched && !m[2].matched) return base;
  const double shift = m[1].matched ? std::stod(m[1].str()) : 0.0;
  const double scale = m[2].matched ? std::stod(m[2].str()) : 1.0;
  return EnsembleSpec::shifted_scaled(shift, scale, base);
}

CMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t index, std::uint64_t factor) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, index, factor));
  return draw(spec, rng);
}

std::vector<double> SpectrumSample::moduli() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (cplx v : values) out.push_back(std::abs(v));
  return out;
}

std::vector<double> SpectrumSample::real_parts() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (cplx v : values) out.push_back(v.real());
  return out;
}

SpectrumSample spectrum(const CMatrix& m, SpectrumKind kind) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(ErrorCode::invalid_argument, "square matrix required");
  const auto n = static_cast<lapack_int>(m.rows());
  CMatrix a = m;
  SpectrumSample out;
  out.kind = kind;
  if (kind == SpectrumKind::singular) {
    std::vector<double> s(n);
    backend_check(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(), nullptr, 1, nullptr, 1),
                  "zgesdd");
    out.values.assign(s.begin(), s.end());
    return out;
  }
  if (exactly_hermitian(m)) {
    std::vector<double> w(n);
    backend_check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data()), "zheevd");
    out.values.assign(w.begin(), w.end());
    return out;
  }
  out.values.resize(n);
  backend_check(
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, out.values.data(), nullptr, 1, nullptr, 1), "zgeev");
  return out;
}

SpectrumSample product_spectrum(std::span<const EnsembleSpec> specs, int samples, SpectrumKind kind,
                                bool independent, int threads) {
  check_sizes(specs);
  auto parts = run_samples(samples, threads, [&](std::uint64_t index) {
    CMatrix p = sample_matrix(specs[0], index, 0);
    const CMatrix first = p;
    for (std::size_t f = 1; f < specs.size(); ++f)
      p = multiply(p, independent ? sample_matrix(specs[f], index, f) : first);
    auto s = spectrum(p, kind);
    s.index = index;
    return s;
  });
  const std::string source = independent ? joined(specs, " x ")
                                         : "(" + specs[0].describe() + ")^" + std::to_string(specs.size());
  return pool(std::move(parts), source);
}

SpectrumSample free_sum_spectrum(std::span<const EnsembleSpec> specs, int samples, int threads) {
  check_sizes(specs);
  const int n = specs.front().n;
  auto parts = run_samples(samples, threads, [&](std::uint64_t index) {
    CMatrix sum = CMatrix::Zero(n, n);
    for (std::size_t f = 0; f < specs.size(); ++f) {
      // Rotation streams sit above the factor streams.
      Rng rng(derive_seed(specs[f].seed, index, specs.size() + f));
      const CMatrix u = haar_draw(n, rng);
      sum += multiply(u, multiply(sample_matrix(specs[f], index, f), u), 'C');
    }
    // Restore exact Hermiticity lost to rounding.
    sum = (0.5 * (sum + sum.adjoint())).eval();
    auto s = spectrum(sum, SpectrumKind::eigen);
    s.index = index;
    return s;
  });
  return pool(std::move(parts), joined(specs, " + "));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(k) / sorted_.size();
}

EmpiricalCdf empirical_radial_cdf(const SpectrumSample& s) {
  if (s.kind != SpectrumKind::eigen) throw Error(ErrorCode::kind_mismatch, "radial CDF needs eigenvalues");
  return EmpiricalCdf(s.moduli());
}

ComparisonReport compare(const SpectrumSample& s, const RadialLaw& law) {
  if (s.kind != SpectrumKind::eigen) throw Error(ErrorCode::kind_mismatch, "radial comparison needs eigenvalues");
  ComparisonReport r;
  const auto moduli = s.moduli();
  r.ks_radial = stats::ks_one_sample(moduli, [&](double x) { return x < 0.0 ? 0.0 : law.cdf(x); });
  r.l1_density = stats::l1_histogram(moduli, 0.0, 1.05 * law.outer_radius(), 64, [&](double a, double b) {
    return law.cdf(b) - (a <= 0.0 ? 0.0 : law.cdf(a));
  });
  return r;
}

ComparisonReport compare(const SpectrumSample& s, const SpectralDensity& d) {
  std::vector<double> values = s.real_parts();
  if (s.kind == SpectrumKind::eigen) {
    double scale = 0.0, imag = 0.0;
    for (cplx v : s.values) {
      scale = std::max(scale, std::abs(v));
      imag = std::max(imag, std::abs(v.imag()));
    }
    if (imag > 1e-8 * std::max(scale, 1.0))
      throw Error(ErrorCode::kind_mismatch, "complex eigenvalues compared against a real density");
  }
  const CdfTable cdf(d);
  ComparisonReport r;
  r.ks_radial = stats::ks_one_sample(values, [&](double x) { return cdf(x); });
  double lo = d.support().front().lo, hi = d.support().back().hi;
  for (const auto& iv : d.support()) {
    lo = std::min(lo, iv.lo);
    hi = std::max(hi, iv.hi);
  }
  if (d.point_mass_zero() > 0.0) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  const double pad = 0.05 * (hi - lo);
  r.l1_density = stats::l1_histogram(values, lo - pad, hi + pad, 64, [&](double a, double b) {
    return cdf(std::nextafter(b, -INFINITY)) - cdf(std::nextafter(a, -INFINITY));
  });
  return r;
}

ComparisonReport compare(const SpectrumSample& s, const std::function<bool(cplx)>& inside) {
  if (s.kind != SpectrumKind::eigen) throw Error(ErrorCode::kind_mismatch, "outlier count needs eigenvalues");
  ComparisonReport r;
  const auto outside = std::count_if(s.values.begin(), s.values.end(), [&](cplx z) { return !inside(z); });
  r.outlier_fraction = static_cast<double>(outside) / s.values.size();
  return r;
}

double near_zero_fraction(const SpectrumSample& s, int n) {
  const double threshold = 10.0 / n;
  const auto count =
      std::count_if(s.values.begin(), s.values.end(), [&](cplx z) { return std::abs(z) < threshold; });
  return static_cast<double>(count) / s.values.size();
}

}  // namespace freeprod
