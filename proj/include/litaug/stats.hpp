#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "litaug/error.hpp"

namespace litaug {

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw ValidationError("mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation / sqrt(n); 0 for a single value.
inline double standard_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
}

// One-sided paired t-test of H1: mean(a - b) > 0.
inline double paired_t_test_greater(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("paired t-test needs samples of equal size");
    if (a.size() < 2) throw ValidationError("paired t-test needs at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double m = mean(d);
    const double se = standard_error(d);
    if (se == 0.0) return m > 0.0 ? 0.0 : (m < 0.0 ? 1.0 : 0.5);
    const boost::math::students_t dist(static_cast<double>(d.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, m / se));
}

}  // namespace litaug
