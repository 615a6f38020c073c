#pragma once

#include <type_traits>
#include <utility>
#include <vector>

#include "oclade/errors.hpp"
#include "oclade/math.hpp"
#include "oclade/rates.hpp"

namespace oclade {

/// a_{i,j,k} = C(j,i) (k-1)^(j-i), the expansion coefficient of
/// (k-1+x)^j; a_{-1,j,k} = 0 by convention.
template <class Real = double>
inline Real merge_coefficient_a(int i, int j, int k) {
    if (i == -1) return Real(0);
    if (i < -1 || i > j || k < 2)
        throw precondition_error("merge coefficient needs -1 <= i <= j, k >= 2");
    Real binom(1);
    for (int t = 1; t <= i; ++t) binom = binom * Real(j - i + t) / Real(t);
    Real pw(1);
    for (int t = 0; t < j - i; ++t) pw = pw * Real(k - 1);
    return binom * pw;
}

/// (a_{i,j,k}, b_{i,j,k}) with b_{i,j,k} = a_{i-1,j,k} - a_{i,j,k}.
template <class Real = double>
inline std::pair<Real, Real> merge_coefficients(int i, int j, int k) {
    if (i < 0 || i > j || k < 2)
        throw precondition_error("merge coefficients need 0 <= i <= j, k >= 2");
    Real a = merge_coefficient_a<Real>(i, j, k);
    Real am1 = merge_coefficient_a<Real>(i - 1, j, k);
    return {a, am1 - a};
}

/// Exact moments E(X_m^i) and E(O_m^j) for all m <= n_max and exponents
/// up to j_max; exponent 0 entries are pinned to 1.
template <class Real>
struct BasicMomentTable {
    int n_max = 0;
    int j_max = 0;
    Real theta{};

    Real x(int m, int i) const { return x_[idx_x(m, i)]; }
    Real o(int m, int j) const { return o_[idx_o(m, j)]; }

    bool has_x = false;
    bool has_o = false;

    std::size_t idx_x(int m, int i) const {
        if (m < 1 || m > n_max || i < 0 || i > j_max)
            throw precondition_error("moment table X lookup out of range");
        return std::size_t(m - 1) * std::size_t(j_max + 1) + std::size_t(i);
    }
    std::size_t idx_o(int m, int j) const {
        if (m < 2 || m > n_max || j < 0 || j > j_max)
            throw precondition_error("moment table O lookup out of range");
        return std::size_t(m - 2) * std::size_t(j_max + 1) + std::size_t(j);
    }

    std::vector<Real> x_;
    std::vector<Real> o_;
};

using MomentTable = BasicMomentTable<double>;

namespace detail {

/// Kahan compensation for doubles, plain accumulation for exact types.
template <class Real>
struct Accumulator {
    Real sum{};
    void add(const Real& v) { sum += v; }
    const Real& value() const { return sum; }
};

template <>
struct Accumulator<double> {
    KahanSum k;
    void add(double v) { k.add(v); }
    double value() const { return k.value(); }
};

} // namespace detail

/// Fills the X part bottom-up in m; the recursion for exponent j at m
/// consumes exponents <= j at strictly smaller m. `rates` must provide
/// weight(b,k) = C(b,k) lambda_{b,k} and total(b) in Real arithmetic.
template <class Real, class Rates>
inline BasicMomentTable<Real> moments_x(int n_max, int j_max, Real theta,
                                        const Rates& rates) {
    if (n_max < 1 || j_max < 1)
        throw precondition_error("moments_x needs n_max >= 1 and j_max >= 1");
    BasicMomentTable<Real> table;
    table.n_max = n_max;
    table.j_max = j_max;
    table.theta = theta;
    table.has_x = true;
    table.x_.assign(std::size_t(n_max) * std::size_t(j_max + 1), Real(0));
    const Real half_theta = theta / Real(2);

    for (int i = 0; i <= j_max; ++i) table.x_[table.idx_x(1, i)] = Real(1);
    for (int m = 2; m <= n_max; ++m) {
        table.x_[table.idx_x(m, 0)] = Real(1);
        for (int j = 1; j <= j_max; ++j) {
            detail::Accumulator<Real> acc;
            acc.add(half_theta);
            for (int k = 2; k <= m; ++k) {
                Real w = rates.weight(m, k);
                if (w == Real(0)) continue;
                int mp = m - k + 1;
                detail::Accumulator<Real> inner;
                inner.add(table.x(mp, j));
                detail::Accumulator<Real> esc;
                for (int i = 1; i <= j; ++i)
                    esc.add(merge_coefficient_a<Real>(i - 1, j, k) * table.x(mp, i));
                inner.add(esc.value() / Real(mp));
                acc.add(w * inner.value());
            }
            table.x_[table.idx_x(m, j)] = acc.value() / (half_theta + rates.total(m));
        }
    }
    return table;
}

/// Fills the O part; the X part must already cover (n_max, j_max).
/// Uses the identity C(n,k) lambda_{n,k} * k/n = C(n-1,k-1) lambda_{n,k}
/// and C(n,k) lambda_{n,k} * (n-k)/n = C(n-1,k) lambda_{n,k}, which
/// cancels the 1/(n-k) factor of the O branch exactly and annihilates
/// the k = n term.
template <class Real, class Rates>
inline void moments_o(BasicMomentTable<Real>& table, const Rates& rates) {
    if (!table.has_x) throw precondition_error("moments_o needs the X part first");
    if (table.n_max < 2) throw precondition_error("moments_o needs n_max >= 2");
    const int n_max = table.n_max, j_max = table.j_max;
    table.has_o = true;
    table.o_.assign(std::size_t(n_max - 1) * std::size_t(j_max + 1), Real(0));

    // base: E(O_2^j) = 2^j, exactly
    for (int j = 0; j <= j_max; ++j) {
        Real v(1);
        for (int t = 0; t < j; ++t) v = v * Real(2);
        table.o_[table.idx_o(2, j)] = v;
    }
    for (int m = 3; m <= n_max; ++m) {
        table.o_[table.idx_o(m, 0)] = Real(1);
        for (int j = 1; j <= j_max; ++j) {
            detail::Accumulator<Real> acc;
            for (int k = 2; k <= m; ++k) {
                Real w = rates.weight(m, k);
                if (w == Real(0)) continue;
                int mp = m - k + 1;
                detail::Accumulator<Real> x_part;
                for (int i = 0; i <= j; ++i)
                    x_part.add(merge_coefficient_a<Real>(i, j, k) * table.x(mp, i));
                Real inner = Real(k) * x_part.value();
                if (k < m) {
                    detail::Accumulator<Real> o_part;
                    for (int i = 0; i <= j; ++i) {
                        auto [ai, bi] = merge_coefficients<Real>(i, j, k);
                        Real coeff = (i == j) ? Real(mp) + bi : bi;
                        o_part.add(coeff * table.o(mp, i));
                    }
                    inner = inner + o_part.value();
                }
                acc.add(w * inner);
            }
            table.o_[table.idx_o(m, j)] = acc.value() / (Real(m) * rates.total(m));
        }
    }
}

/// Convenience wrapper: both parts against a double RateTable.
inline MomentTable moment_table(int n_max, int j_max, double theta,
                                const RateTable& rates) {
    if (rates.n_max() < n_max)
        throw precondition_error("rate table too small for requested n_max");
    MomentTable t = moments_x<double>(n_max, j_max, theta, rates);
    moments_o(t, rates);
    return t;
}

/// First two moments of X_n and O_n for Kingman's coalescent via the
/// simplified direct recursions; an independent validation path for the
/// general engine on that measure.
inline MomentTable kingman_moments(int n_max, double theta) {
    if (n_max < 2) throw precondition_error("kingman_moments needs n_max >= 2");
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    MomentTable t;
    t.n_max = n_max;
    t.j_max = 2;
    t.theta = theta;
    t.has_x = t.has_o = true;
    t.x_.assign(std::size_t(n_max) * 3, 1.0);
    t.o_.assign(std::size_t(n_max - 1) * 3, 1.0);
    const double h = 0.5 * theta;
    for (int n = 2; n <= n_max; ++n) {
        double c = 0.5 * double(n) * double(n - 1);
        double ex = h / (h + c) +
                    c / (h + c) * (double(n) / double(n - 1)) * t.x(n - 1, 1);
        double ex2 = h / (h + c) +
                     c / (h + c) *
                         ((double(n + 1) / double(n - 1)) * t.x(n - 1, 2) +
                          t.x(n - 1, 1) / double(n - 1));
        t.x_[t.idx_x(n, 1)] = ex;
        t.x_[t.idx_x(n, 2)] = ex2;
    }
    t.o_[t.idx_o(2, 1)] = 2.0;
    t.o_[t.idx_o(2, 2)] = 4.0;
    for (int n = 3; n <= n_max; ++n) {
        double eo = (2.0 / n) * (1.0 + t.x(n - 1, 1)) - 1.0 / n +
                    (double(n - 1) / n) * t.o(n - 1, 1);
        double eo2 = (2.0 / n) * (1.0 + 2.0 * t.x(n - 1, 1) + t.x(n - 1, 2)) -
                     1.0 / n - t.o(n - 1, 1) / n + t.o(n - 1, 2);
        t.o_[t.idx_o(n, 1)] = eo;
        t.o_[t.idx_o(n, 2)] = eo2;
    }
    return t;
}

} // namespace oclade
