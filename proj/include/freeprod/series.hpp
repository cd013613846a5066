#ifndef FREEPROD_SERIES_HPP
#define FREEPROD_SERIES_HPP

#include <complex>
#include <span>
#include <vector>

namespace freeprod {

using cplx = std::complex<double>;

inline constexpr int default_series_order = 16;

/// Complex power series c_offset z^offset + ... + c_K z^K + O(z^{K+1}).
///
/// The offset is 0 or 1; series such as phi(z) = m1 z + m2 z^2 + ... are
/// stored with offset 1 so the absent constant term is structural rather than
/// a numerical zero. Values are immutable; every operation returns a new
/// series whose order never exceeds the orders of its operands.
class TruncatedSeries {
 public:
  TruncatedSeries(std::vector<cplx> coeffs, int order, int offset = 0);

  static TruncatedSeries zero(int order, int offset = 0);
  static TruncatedSeries constant(cplx c, int order);
  // The series z.
  static TruncatedSeries identity(int order);
  // Coefficient list c_0, c_1, ... with order = size - 1.
  static TruncatedSeries from_coefficients(std::vector<cplx> coeffs);

  int order() const noexcept { return order_; }
  int offset() const noexcept { return offset_; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }

  // Coefficient of z^power; zero below the offset. Throws past the order.
  cplx operator[](int power) const;

  cplx evaluate(cplx z) const;
  TruncatedSeries truncated(int order) const;
  // Same series stored with offset 0.
  TruncatedSeries with_offset_zero() const;
  double max_abs_coefficient() const;

 private:
  std::vector<cplx> coeffs_;
  int order_;
  int offset_;
};

TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_sub(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_scale(const TruncatedSeries& a, cplx factor);
// Cauchy product truncated to min(order(a), order(b)).
TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_pow(const TruncatedSeries& a, int exponent);
// 1/a; requires a nonzero constant term.
TruncatedSeries series_reciprocal(const TruncatedSeries& a);
// outer(inner(z)); inner must have a vanishing constant term.
TruncatedSeries series_compose(const TruncatedSeries& outer, const TruncatedSeries& inner);
// Compositional inverse t with s(t(z)) = z + O(z^{K+1}).
TruncatedSeries series_revert(const TruncatedSeries& s);
// z * a, keeping the order (the top coefficient is dropped).
TruncatedSeries series_shift_up(const TruncatedSeries& a);
// a / z for a series without constant term; the order drops by one.
TruncatedSeries series_shift_down(const TruncatedSeries& a);

// Largest |a_k - b_k| over the common order.
double series_distance(const TruncatedSeries& a, const TruncatedSeries& b);

}  // namespace freeprod

#endif  // FREEPROD_SERIES_HPP
