#ifndef FREEPROD_STATS_HPP
#define FREEPROD_STATS_HPP

#include <functional>
#include <span>
#include <vector>

namespace freeprod::stats {

// sup |F_n - F| for a sample against a continuous CDF (which may jump at 0).
double ks_one_sample(std::vector<double> values, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// Asymptotic Kolmogorov tail probability for a two-sample statistic.
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);

// sum_k |count_k / total - mass_k| over bins of equal width on [lo, hi];
// mass(a, b) is the reference mass of [a, b).
double l1_histogram(std::span<const double> values, double lo, double hi, int bins,
                    const std::function<double(double, double)>& mass);

}  // namespace freeprod::stats

#endif  // FREEPROD_STATS_HPP
