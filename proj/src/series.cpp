#include "freeprod/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freeprod/error.hpp"

namespace freeprod {

namespace {

double coefficient_scale(const TruncatedSeries& s) { return std::max(1.0, s.max_abs_coefficient()); }

// Dense coefficient vector c_0..c_K.
std::vector<cplx> dense(const TruncatedSeries& s, int order) {
  std::vector<cplx> out(static_cast<std::size_t>(order) + 1);
  for (int k = s.offset(); k <= order; ++k) out[k] = s[k];
  return out;
}

TruncatedSeries from_dense(std::vector<cplx> c, int offset) {
  const int order = static_cast<int>(c.size()) - 1;
  if (offset == 1) c.erase(c.begin());
  return TruncatedSeries(std::move(c), order, offset);
}

}  // namespace

TruncatedSeries::TruncatedSeries(std::vector<cplx> coeffs, int order, int offset)
    : coeffs_(std::move(coeffs)), order_(order), offset_(offset) {
  if (offset_ != 0 && offset_ != 1)
    throw Error(ErrorCode::invalid_argument, "series offset must be 0 or 1");
  if (order_ < offset_ || order_ < 1)
    throw Error(ErrorCode::invalid_argument, "series order must be >= max(1, offset)");
  if (coeffs_.size() != static_cast<std::size_t>(order_ - offset_ + 1))
    throw Error(ErrorCode::invalid_argument,
                "series needs order - offset + 1 coefficients, got " + std::to_string(coeffs_.size()));
}

TruncatedSeries TruncatedSeries::zero(int order, int offset) {
  return TruncatedSeries(std::vector<cplx>(static_cast<std::size_t>(order - offset + 1)), order, offset);
}

TruncatedSeries TruncatedSeries::constant(cplx c, int order) {
  std::vector<cplx> v(static_cast<std::size_t>(order) + 1);
  v[0] = c;
  return TruncatedSeries(std::move(v), order, 0);
}

TruncatedSeries TruncatedSeries::identity(int order) {
  std::vector<cplx> v(static_cast<std::size_t>(order));
  v[0] = 1.0;
  return TruncatedSeries(std::move(v), order, 1);
}

TruncatedSeries TruncatedSeries::from_coefficients(std::vector<cplx> coeffs) {
  const int order = static_cast<int>(coeffs.size()) - 1;
  return TruncatedSeries(std::move(coeffs), order, 0);
}

cplx TruncatedSeries::operator[](int power) const {
  if (power > order_)
    throw Error(ErrorCode::invalid_argument,
                "coefficient z^" + std::to_string(power) + " beyond truncation order " + std::to_string(order_));
  if (power < offset_) return 0.0;
  return coeffs_[static_cast<std::size_t>(power - offset_)];
}

cplx TruncatedSeries::evaluate(cplx z) const {
  cplx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return offset_ == 1 ? acc * z : acc;
}

TruncatedSeries TruncatedSeries::truncated(int order) const {
  order = std::min(order, order_);
  std::vector<cplx> c(coeffs_.begin(), coeffs_.begin() + (order - offset_ + 1));
  return TruncatedSeries(std::move(c), order, offset_);
}

TruncatedSeries TruncatedSeries::with_offset_zero() const { return from_dense(dense(*this, order_), 0); }

double TruncatedSeries::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int order = std::min(a.order(), b.order());
  auto c = dense(a, order);
  for (int k = b.offset(); k <= order; ++k) c[k] += b[k];
  return from_dense(std::move(c), std::min(a.offset(), b.offset()));
}

TruncatedSeries series_sub(const TruncatedSeries& a, const TruncatedSeries& b) {
  return series_add(a, series_scale(b, -1.0));
}

TruncatedSeries series_scale(const TruncatedSeries& a, cplx factor) {
  std::vector<cplx> c(a.coeffs().begin(), a.coeffs().end());
  for (auto& x : c) x *= factor;
  return TruncatedSeries(std::move(c), a.order(), a.offset());
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int order = std::min(a.order(), b.order());
  const auto x = dense(a, order);
  const auto y = dense(b, order);
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  for (int i = a.offset(); i <= order; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = b.offset(); i + j <= order; ++j) c[i + j] += x[i] * y[j];
  }
  return from_dense(std::move(c), std::min(1, a.offset() + b.offset()));
}

TruncatedSeries series_pow(const TruncatedSeries& a, int exponent) {
  if (exponent < 0) return series_pow(series_reciprocal(a), -exponent);
  auto result = TruncatedSeries::constant(1.0, a.order());
  auto base = a;
  while (exponent > 0) {
    if (exponent & 1) result = series_mul(result, base);
    exponent >>= 1;
    if (exponent > 0) base = series_mul(base, base);
  }
  return result;
}

TruncatedSeries series_reciprocal(const TruncatedSeries& a) {
  const int order = a.order();
  const cplx a0 = a[0];
  if (std::abs(a0) <= 1e-300)
    throw Error(ErrorCode::invalid_argument, "reciprocal of a series with zero constant term");
  const auto x = dense(a, order);
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  c[0] = 1.0 / a0;
  for (int n = 1; n <= order; ++n) {
    cplx acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += x[k] * c[n - k];
    c[n] = -acc / a0;
  }
  return from_dense(std::move(c), 0);
}

TruncatedSeries series_compose(const TruncatedSeries& outer, const TruncatedSeries& inner) {
  if (std::abs(inner[0]) > 1e-14 * coefficient_scale(inner))
    throw Error(ErrorCode::nonzero_inner_constant, "inner series has constant term " +
                                                       std::to_string(std::abs(inner[0])));
  const int order = std::min(outer.order(), inner.order());
  auto in = dense(inner, order);
  in[0] = 0.0;
  const auto inner0 = from_dense(std::move(in), 1);
  // Horner in the ring of truncated series.
  auto acc = TruncatedSeries::constant(outer[order], order);
  for (int k = order - 1; k >= 0; --k)
    acc = series_add(series_mul(acc, inner0), TruncatedSeries::constant(outer[k], order));
  if (outer.offset() == 1) {
    auto c = dense(acc, order);
    return from_dense(std::move(c), 1);
  }
  return acc;
}

TruncatedSeries series_revert(const TruncatedSeries& s) {
  const double scale = coefficient_scale(s);
  if (std::abs(s[0]) > 1e-14 * scale)
    throw Error(ErrorCode::nonzero_inner_constant, "reversion needs a series without constant term");
  const cplx c1 = s[1];
  if (std::abs(c1) <= 1e-14 * scale)
    throw Error(ErrorCode::zero_linear_term, "reversion needs a nonzero linear coefficient");
  const int order = s.order();
  std::vector<cplx> t(static_cast<std::size_t>(order) + 1);
  t[1] = 1.0 / c1;
  // Fix one coefficient per pass: s(t) = z + e_k z^k + ... is corrected by t_k -= e_k / c1.
  for (int k = 2; k <= order; ++k) {
    const auto current = from_dense(t, 1);
    const auto e = series_compose(s, current);
    t[k] -= e[k] / c1;
  }
  return from_dense(std::move(t), 1);
}

TruncatedSeries series_shift_up(const TruncatedSeries& a) {
  const int order = a.order();
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k < order; ++k) c[k + 1] = a[k];
  return from_dense(std::move(c), 1);
}

TruncatedSeries series_shift_down(const TruncatedSeries& a) {
  if (std::abs(a[0]) > 1e-14 * coefficient_scale(a))
    throw Error(ErrorCode::invalid_argument, "series_shift_down needs a vanishing constant term");
  const int order = a.order() - 1;
  if (order < 1) throw Error(ErrorCode::invalid_argument, "series order too small to shift down");
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) c[k] = a[k + 1];
  return from_dense(std::move(c), 0);
}

double series_distance(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int order = std::min(a.order(), b.order());
  double d = 0.0;
  for (int k = 0; k <= order; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace freeprod
