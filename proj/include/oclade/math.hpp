#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "oclade/errors.hpp"

namespace oclade {

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline double log_gamma(double x) { return std::lgamma(x); }

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -inf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

/// Exact for small arguments, falls back to exp(log_choose) afterwards.
inline double choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    if (k <= 32 && n <= 62) {
        double r = 1.0;
        for (std::int64_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
        return std::round(r);
    }
    return std::exp(log_choose(n, k));
}

/// x^n for small integer n by repeated squaring.
inline double pow_int(double x, int n) {
    if (n < 0) return 1.0 / pow_int(x, -n);
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

/// Compensated accumulator for long sums of mixed-magnitude terms.
class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline bool close_rel(double a, double b, double rel_tol, double abs_tol = 0.0) {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= std::max(abs_tol, rel_tol * scale);
}

} // namespace oclade
