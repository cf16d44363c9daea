#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfk {

// Cascade (pairwise) summation. Error grows like O(log n) instead of O(n).
double pairwise_sum(std::span<const double> values);

// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double q);

double median(std::vector<double> values);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mfk
