#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyapprox {

// Error taxonomy mirrors the CLI exit codes: invalid_input -> 2,
// unsupported_model -> 3, numeric_failure -> 4.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class invalid_input : public error {
public:
    using error::error;
};

class unsupported_model : public error {
public:
    using error::error;
};

class numeric_failure : public error {
public:
    using error::error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw invalid_input(msg);
}

// Pairwise (cascade) summation: deterministic and independent of any
// chunking used to produce the values.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(std::span<const double>(v));
}

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
};

// Ordinary least squares fit y = a + b x; returns the slope b.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "ls_slope: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace levyapprox
