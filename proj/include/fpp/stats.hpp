#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace fpp {

inline double norm_cdf(double z) {
    if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Inverse of the standard normal CDF (Acklam's rational approximation
// polished with one Halley step, ~1e-15 relative accuracy).
double norm_inv(double p);

// Mean and standard error of the mean.
struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

MeanStderr mean_stderr(std::span<const double> xs);

// Two-sided Kolmogorov-Smirnov distance between the ECDF of a sorted
// sample and a reference CDF.
double ks_distance(std::span<const double> sorted_sample,
                   const std::function<double(double)>& cdf);

inline double falling_factorial(double x, int r) {
    double v = 1.0;
    for (int i = 0; i < r; ++i) v *= x - i;
    return v;
}

}  // namespace fpp
