#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fracsr::stats {

struct MeanSe {
    double mean = 0.0;
    double std_error = 0.0;
    long n = 0;
};

// Mean and standard error (sample std / sqrt(n)); pairwise-summed so the result does
// not depend on how the values were produced.
MeanSe mean_se(std::span<const double> v);

// sup |F_n - F| for a continuous reference CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample sup |F_n - G_m|.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

// Critical value of the two-sample statistic at level alpha (asymptotic Kolmogorov law).
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

}  // namespace fracsr::stats
