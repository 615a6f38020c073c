#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oclade/genealogy.hpp"

namespace oclade {

struct Mutation {
    BlockId block;
    double time;
};

/// Infinite-sites mutations on the branches of one genealogy. The root
/// entry represents the ancestral line continued beyond the MRCA; only
/// its first mutation is ever consulted, so only that one is generated.
class MutationSet {
  public:
    MutationSet() = default;
    explicit MutationSet(std::vector<Mutation> muts) : muts_(std::move(muts)) {}

    const std::vector<Mutation>& all() const { return muts_; }
    std::size_t size() const { return muts_.size(); }
    void add(BlockId block, double time) { muts_.push_back(Mutation{block, time}); }

  private:
    std::vector<Mutation> muts_;
};

/// Poisson(theta/2 * length) mutations per branch at uniform positions,
/// plus the first mutation of the rate-theta/2 process on the post-MRCA
/// line.
inline MutationSet place_mutations(const EventLog& log, double theta, std::uint64_t seed) {
    if (!(theta > 0.0)) throw precondition_error("mutation rate theta must be > 0");
    Pcg64 rng(seed, 0x6d75746174696f6eULL);
    const double half_theta = 0.5 * theta;
    MutationSet muts;
    for (BlockId id = 0; id < BlockId(log.num_blocks()); ++id) {
        if (log.is_root(id)) {
            muts.add(id, log.mrca_time() + rng.exponential(half_theta));
            continue;
        }
        double birth = log.birth_time(id);
        double len = log.branch_length(id);
        std::uint64_t count = rng.poisson(half_theta * len);
        for (std::uint64_t c = 0; c < count; ++c)
            muts.add(id, birth + len * rng.uniform01());
    }
    return muts;
}

/// Per-leaf clade statistics of one replicate.
struct CladeStats {
    double external_length; // E_n(i)
    int minimal_clade;      // M_n(i)
    int observable_clade;   // O_n(i)
};

struct CladeStatsVector {
    int n = 0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    std::string measure;
    std::vector<CladeStats> leaf; // index = leaf id (0-based)
};

/// Walks each leaf's ancestral path: the external branch ends at the
/// first merger (private mutations below it are skipped), and the
/// minimal observable clade is the lowest ancestor block whose own
/// branch carries a mutation. Without any such mutation the post-MRCA
/// line is consulted, which yields the whole sample.
inline CladeStatsVector observable_clades(const EventLog& log, const MutationSet& muts) {
    const std::size_t blocks = log.num_blocks();
    std::vector<char> mutated(blocks, 0);
    for (const Mutation& m : muts.all()) {
        if (m.block < 0 || std::size_t(m.block) >= blocks)
            throw structure_error("mutation references unknown block");
        double birth = log.birth_time(m.block);
        double end = log.is_root(m.block) ? inf : birth + log.branch_length(m.block);
        if (!(m.time >= birth) || !(m.time < end))
            throw structure_error("mutation time outside its block's lifetime");
        if (std::size_t(m.block) >= std::size_t(log.n()))
            mutated[std::size_t(m.block)] = 1; // external-branch mutations are private
    }
    CladeStatsVector out;
    out.n = log.n();
    out.leaf.resize(std::size_t(log.n()));
    for (int i = 0; i < log.n(); ++i) {
        BlockId first = log.parent(BlockId(i));
        if (first == EventLog::kNoBlock) { // n == 1: no merger, whole sample
            out.leaf[std::size_t(i)] = CladeStats{inf, 1, 1};
            continue;
        }
        CladeStats st;
        st.external_length = log.birth_time(first);
        st.minimal_clade = log.block_size(first);
        BlockId cur = first;
        while (!log.is_root(cur) && !mutated[std::size_t(cur)]) cur = log.parent(cur);
        st.observable_clade = mutated[std::size_t(cur)] ? log.block_size(cur) : log.n();
        out.leaf[std::size_t(i)] = st;
    }
    return out;
}

/// One full-pipeline replicate: genealogy, mutations, extraction.
inline CladeStatsVector sample_clade_stats(int n, const RateTable& rates, double theta,
                                           std::uint64_t seed, double growth_rate = 0.0) {
    EventLog log = simulate_genealogy(n, rates, seed, growth_rate);
    MutationSet muts = place_mutations(log, theta, splitmix64(seed ^ 0x6d75746564ULL));
    CladeStatsVector stats = observable_clades(log, muts);
    stats.theta = theta;
    stats.seed = seed;
    stats.measure = rates.spec().describe();
    return stats;
}

namespace detail {

/// Shared jump-hold loop for the single-leaf samplers. Tracks only the
/// block containing leaf 0 and reports its size at the last jump at or
/// before the stopping time: an exponential clock started either at
/// time zero (X) or at the first merger of the leaf (O).
inline int sample_marked_block(int n, const RateTable& rates, double theta,
                               std::uint64_t seed, double growth_rate, bool clock_from_start) {
    if (n == 1) return 1;
    if (n < 2) throw precondition_error("sampler needs n >= 1");
    if (n > rates.n_max())
        throw precondition_error("rate table too small for requested sample size");
    Pcg64 rng(seed, 0x636c61646573616dULL);
    const double half_theta = 0.5 * theta;

    std::vector<BlockId> alive(static_cast<std::size_t>(n));
    std::iota(alive.begin(), alive.end(), 0);
    std::vector<int> size(std::size_t(n), 1);
    BlockId one_block = 0;
    BlockId next_id = BlockId(n);
    int one_size_at_last_jump = 1;

    double tau = 0.0;
    double deadline = clock_from_start ? rng.exponential(half_theta) : inf;
    while (alive.size() > 1) {
        int b = int(alive.size());
        tau += rng.exponential(rates.total(b));
        double t = growth_real_time(tau, growth_rate);
        if (t > deadline) break;
        int k = draw_merger_size(rates, b, rng.uniform01() * rates.total(b));
        for (int j = 0; j < k; ++j) {
            std::size_t idx = std::size_t(j) + rng.bounded(std::uint64_t(b - j));
            std::swap(alive[std::size_t(j)], alive[idx]);
        }
        int merged_size = 0;
        bool involves_one = false;
        for (int j = 0; j < k; ++j) {
            merged_size += size[std::size_t(alive[std::size_t(j)])];
            involves_one |= (alive[std::size_t(j)] == one_block);
        }
        BlockId created = next_id++;
        size.push_back(merged_size);
        for (int j = k - 1; j >= 1; --j) {
            alive[std::size_t(j)] = alive.back();
            alive.pop_back();
        }
        alive[0] = created;
        if (involves_one) {
            one_block = created;
            one_size_at_last_jump = merged_size;
            if (deadline == inf) // leaf's first merger: start the clock
                deadline = t + rng.exponential(half_theta);
        }
    }
    return one_size_at_last_jump;
}

} // namespace detail

/// Size of the minimal observable clade of one leaf, sampled without
/// materialising mutations: the first non-private mutation lies an
/// independent Exp(theta/2) above the leaf's first merger.
inline int sample_O1(int n, const RateTable& rates, double theta, std::uint64_t seed,
                     double growth_rate = 0.0) {
    if (n < 2) throw precondition_error("sample_O1 needs n >= 2");
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    return detail::sample_marked_block(n, rates, theta, seed, growth_rate, false);
}

/// Size of leaf 1's block when an Exp(theta/2) clock started at time 0
/// rings. By convention the n = 1 sample always yields 1.
inline int sample_X(int n, const RateTable& rates, double theta, std::uint64_t seed) {
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    return detail::sample_marked_block(n, rates, theta, seed, 0.0, true);
}

} // namespace oclade
