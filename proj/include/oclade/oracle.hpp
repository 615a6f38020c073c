#pragma once

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "oclade/errors.hpp"
#include "oclade/math.hpp"
#include "oclade/rates.hpp"

namespace oclade {

/// Lumped state of the marked block-size chain: the multiset of block
/// sizes, the size of the block carrying leaf 1, and whether the
/// mutation clock is already running. Sufficient for the statistics
/// because merger rates depend only on block counts and the payoff only
/// on the marked block's size.
struct MarkedConfiguration {
    std::vector<int> sizes; // sorted descending, sums to n
    int marked_size;
    bool clock_running; // false: waiting for the mark's first merger
};

namespace detail {

using ConfigKey = std::tuple<std::vector<int>, int, bool>;

inline ConfigKey key_of(const MarkedConfiguration& c) {
    return {c.sizes, c.marked_size, c.clock_running};
}

/// Blocks of a configuration as a positional list, marked block first.
inline std::vector<int> block_list(const MarkedConfiguration& c) {
    std::vector<int> blocks;
    blocks.push_back(c.marked_size);
    bool removed = false;
    for (int s : c.sizes) {
        if (!removed && s == c.marked_size) {
            removed = true;
            continue;
        }
        blocks.push_back(s);
    }
    return blocks;
}

inline MarkedConfiguration merge_subset(const MarkedConfiguration& c,
                                        const std::vector<int>& blocks,
                                        unsigned subset_mask) {
    MarkedConfiguration next;
    int merged_size = 0;
    bool mark_in = false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (subset_mask & (1u << i)) {
            merged_size += blocks[i];
            if (i == 0) mark_in = true;
        } else {
            next.sizes.push_back(blocks[i]);
        }
    }
    next.sizes.push_back(merged_size);
    std::sort(next.sizes.begin(), next.sizes.end(), std::greater<>());
    next.marked_size = mark_in ? merged_size : c.marked_size;
    next.clock_running = c.clock_running || mark_in;
    return next;
}

/// Dense LU solve with partial pivoting (the systems here are tiny).
inline std::vector<double> lu_solve(std::vector<std::vector<double>> a,
                                    std::vector<std::vector<double>> rhs_columns) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw error("singular first-step system");
        std::swap(a[col], a[piv]);
        for (auto& rhs : rhs_columns) std::swap(rhs[col], rhs[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            a[r][col] = 0.0;
            for (std::size_t c2 = col + 1; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
            for (auto& rhs : rhs_columns) rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> out;
    out.reserve(rhs_columns.size() * n);
    for (auto& rhs : rhs_columns) {
        for (std::size_t r = n; r-- > 0;) {
            double v = rhs[r];
            for (std::size_t c2 = r + 1; c2 < n; ++c2) v -= a[r][c2] * rhs[c2];
            rhs[r] = v / a[r][r];
        }
        out.insert(out.end(), rhs.begin(), rhs.end());
    }
    return out;
}

} // namespace detail

/// All configurations reachable from the n-singleton start in either
/// phase, deduplicated by (sorted sizes, marked size, phase).
inline std::vector<MarkedConfiguration> enumerate_states(int n) {
    if (n < 2) throw precondition_error("state enumeration needs n >= 2");
    if (n > 7) throw precondition_error("state space too large (n > 7)");
    std::map<detail::ConfigKey, int> index;
    std::vector<MarkedConfiguration> states;
    auto push = [&](const MarkedConfiguration& c) {
        auto [it, fresh] = index.emplace(detail::key_of(c), int(states.size()));
        if (fresh) states.push_back(c);
        return fresh;
    };
    MarkedConfiguration start{std::vector<int>(std::size_t(n), 1), 1, false};
    push(start);
    start.clock_running = true;
    push(start);
    for (std::size_t cursor = 0; cursor < states.size(); ++cursor) {
        MarkedConfiguration cur = states[cursor];
        if (cur.sizes.size() < 2) continue;
        auto blocks = detail::block_list(cur);
        unsigned full = (1u << blocks.size()) - 1u;
        for (unsigned mask = 1; mask <= full; ++mask) {
            if (std::popcount(mask) < 2) continue;
            push(detail::merge_subset(cur, blocks, mask));
        }
    }
    return states;
}

struct OracleMoments {
    std::vector<double> x; // x[j] = E(X_n^j), j = 0..j_max
    std::vector<double> o; // o[j] = E(O_n^j)
};

/// Exact moments by first-step analysis over the lumped configuration
/// space, independent of the moment recursions: from a running-clock
/// state the Exp(theta/2) clock competes with every k-subset merger and
/// pays the current marked size to the j-th power when it rings; in the
/// waiting phase the clock is inert until the mark's first merger.
inline OracleMoments exact_moments_dp(int n, int j_max, double theta,
                                      const RateTable& rates) {
    if (n < 2 || n > 7) throw precondition_error("oracle supports 2 <= n <= 7");
    if (j_max < 1) throw precondition_error("oracle needs j_max >= 1");
    if (rates.n_max() < n) throw precondition_error("rate table too small for oracle");
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");

    const auto states = enumerate_states(n);
    std::map<detail::ConfigKey, int> index;
    for (std::size_t i = 0; i < states.size(); ++i)
        index.emplace(detail::key_of(states[i]), int(i));

    const std::size_t ns = states.size();
    const double half_theta = 0.5 * theta;
    std::vector<std::vector<double>> a(ns, std::vector<double>(ns, 0.0));
    // rhs_columns[j][s]: absorption payoff of exponent j+1 from state s
    std::vector<std::vector<double>> rhs(std::size_t(j_max),
                                         std::vector<double>(ns, 0.0));

    for (std::size_t s = 0; s < ns; ++s) {
        const auto& cur = states[s];
        a[s][s] = 1.0;
        if (cur.sizes.size() < 2) {
            // single block: the clock eventually rings on the full sample
            for (int j = 1; j <= j_max; ++j)
                rhs[std::size_t(j - 1)][s] = pow_int(double(cur.marked_size), j);
            continue;
        }
        auto blocks = detail::block_list(cur);
        int b = int(blocks.size());
        std::map<int, double> flows; // target state -> rate
        KahanSum total_out;
        unsigned full = (1u << blocks.size()) - 1u;
        for (unsigned mask = 1; mask <= full; ++mask) {
            int k = std::popcount(mask);
            if (k < 2) continue;
            double rate = rates.rate(b, k);
            if (rate == 0.0) continue;
            auto next = detail::merge_subset(cur, blocks, mask);
            flows[index.at(detail::key_of(next))] += rate;
            total_out.add(rate);
        }
        double denom = total_out.value() + (cur.clock_running ? half_theta : 0.0);
        for (const auto& [target, rate] : flows)
            a[s][std::size_t(target)] -= rate / denom;
        if (cur.clock_running) {
            double pay = half_theta / denom;
            for (int j = 1; j <= j_max; ++j)
                rhs[std::size_t(j - 1)][s] = pay * pow_int(double(cur.marked_size), j);
        }
    }

    auto solution = detail::lu_solve(std::move(a), std::move(rhs));
    const int x_start = index.at(detail::ConfigKey{
        std::vector<int>(std::size_t(n), 1), 1, true});
    const int o_start = index.at(detail::ConfigKey{
        std::vector<int>(std::size_t(n), 1), 1, false});

    OracleMoments out;
    out.x.assign(std::size_t(j_max) + 1, 1.0);
    out.o.assign(std::size_t(j_max) + 1, 1.0);
    for (int j = 1; j <= j_max; ++j) {
        out.x[std::size_t(j)] = solution[std::size_t(j - 1) * ns + std::size_t(x_start)];
        out.o[std::size_t(j)] = solution[std::size_t(j - 1) * ns + std::size_t(o_start)];
    }
    return out;
}

} // namespace oclade
