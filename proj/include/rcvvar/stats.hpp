#pragma once

#include <cstddef>
#include <vector>

namespace rcvvar {

double normal_cdf(double x);

// Inverse standard normal CDF, accurate to near machine precision
// (rational approximation plus one Halley refinement).
double normal_quantile(double p);

// Neumaier-compensated sum; order-stable accumulation for aggregates.
double compensated_sum(const std::vector<double>& values);

double mean(const std::vector<double>& values);

// Sample variance with n-1 denominator; 0 for fewer than two values.
double sample_variance(const std::vector<double>& values);

double sample_sd(const std::vector<double>& values);

// Median with mid-pair averaging; input copied.
double median(std::vector<double> values);

// Two-sided Kolmogorov-Smirnov distance of the sample against the standard
// normal CDF.  Sorts a copy.
double ks_statistic_normal(std::vector<double> values);

// Asymptotic critical value for the two-sided KS test: K_alpha / sqrt(n)
// with K_alpha = sqrt(-log(alpha/2) / 2).
double ks_critical(double alpha, std::size_t n);

}  // namespace rcvvar
