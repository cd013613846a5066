#include "freeprod/stats.hpp"

#include <algorithm>
#include <cmath>

#include "freeprod/error.hpp"

namespace freeprod::stats {

double ks_one_sample(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    // Ties move the empirical CDF in one jump.
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double f = cdf(values[i]);
    const double left = std::nextafter(values[i], -INFINITY);
    d = std::max({d, std::abs(f - j / n), std::abs(cdf(left) - i / n)});
    i = j;
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::invalid_argument, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  const double en = std::sqrt(static_cast<double>(n) * m / (n + m));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double l1_histogram(std::span<const double> values, double lo, double hi, int bins,
                    const std::function<double(double, double)>& mass) {
  if (!(hi > lo) || bins < 1) throw Error(ErrorCode::invalid_argument, "bad histogram range");
  std::vector<double> counts(bins, 0.0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    counts[std::min(bins - 1, static_cast<int>((v - lo) / width))] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double l1 = 0.0;
  for (int k = 0; k < bins; ++k) l1 += std::abs(counts[k] / total - mass(lo + k * width, lo + (k + 1) * width));
  return l1;
}

}  // namespace freeprod::stats
