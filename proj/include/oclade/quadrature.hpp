#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "oclade/errors.hpp"
#include "oclade/math.hpp"

namespace oclade {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1] (Kronrod points and
// weights from the QUADPACK tables; Gauss weights for the embedded rule).
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * gk_nodes[i]);
        fv[14 - i] = f(c + h * gk_nodes[i]);
    }
    fv[7] = f(c);
    double kronrod = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) kronrod += gk_wk[i] * (i == 7 ? fv[7] : fv[i] + fv[14 - i]);
    for (int i = 0; i < 4; ++i) {
        int j = 2 * i + 1;
        gauss += gk_wg[i] * (i == 3 ? fv[7] : fv[j] + fv[14 - j]);
    }
    value = kronrod * h;
    err = std::abs(kronrod - gauss) * h;
}

struct Interval {
    double a, b, value, err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

} // namespace detail

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::int64_t max_evals = 1'000'000;
};

/// Globally adaptive Gauss-Kronrod integration on a finite interval.
/// Throws quadrature_error when the evaluation budget runs out first.
template <class F>
inline double integrate_adaptive(const F& f, double a, double b,
                                 QuadratureOptions opt = {}) {
    std::priority_queue<detail::Interval> heap;
    detail::Interval whole{a, b, 0.0, 0.0};
    detail::gk15(f, a, b, whole.value, whole.err);
    std::int64_t evals = 15;
    heap.push(whole);
    double total = whole.value, total_err = whole.err;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (evals + 30 > opt.max_evals || heap.empty())
            throw quadrature_error("adaptive integration did not converge within budget");
        detail::Interval top = heap.top();
        heap.pop();
        double mid = 0.5 * (top.a + top.b);
        if (!(top.a < mid && mid < top.b))
            throw quadrature_error("adaptive integration interval collapsed");
        detail::Interval left{top.a, mid, 0.0, 0.0}, right{mid, top.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.err);
        detail::gk15(f, right.a, right.b, right.value, right.err);
        evals += 30;
        total += left.value + right.value - top.value;
        total_err += left.err + right.err - top.err;
        heap.push(left);
        heap.push(right);
    }
    return total;
}

/// Integral over (0,1) of a function with possible integrable endpoint
/// singularities. The interval is split at 1/2 and each half is mapped
/// by a square-root substitution (x = u^2, 1-x = v^2), which turns any
/// x^p or (1-x)^p factor with p > -1 into a milder u^(2p+1) one.
template <class F>
inline double integrate_unit_interval(const F& f, QuadratureOptions opt = {}) {
    opt.max_evals /= 2;
    const double s = std::sqrt(0.5);
    double left = integrate_adaptive(
        [&f](double u) { return 2.0 * u * f(u * u); }, 0.0, s, opt);
    double right = integrate_adaptive(
        [&f](double v) { return 2.0 * v * f(1.0 - v * v); }, 0.0, s, opt);
    return left + right;
}

/// Integral over [0, inf) via the rational map t = u/(1-u).
template <class F>
inline double integrate_halfline(const F& f, QuadratureOptions opt = {}) {
    return integrate_adaptive(
        [&f](double u) {
            double w = 1.0 - u;
            return f(u / w) / (w * w);
        },
        0.0, 1.0, opt);
}

} // namespace oclade
