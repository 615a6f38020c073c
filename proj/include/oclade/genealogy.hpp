#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "oclade/errors.hpp"
#include "oclade/rates.hpp"
#include "oclade/rng.hpp"

namespace oclade {

using BlockId = std::int32_t;

/// One coalescence: the listed blocks (all alive at `time`) merge into
/// the freshly created block.
struct MergerEvent {
    double time;
    std::vector<BlockId> merged; // sorted, size >= 2
    BlockId created;
};

/// A complete simulated genealogy of n leaves. Leaves carry ids 0..n-1;
/// internal blocks are numbered in creation order from n. The log always
/// ends in a single block holding every leaf.
class EventLog {
  public:
    explicit EventLog(int n) : n_(n) {
        if (n < 1) throw precondition_error("genealogy needs n >= 1");
        birth_.assign(std::size_t(n), 0.0);
        size_.assign(std::size_t(n), 1);
        parent_.assign(std::size_t(n), kNoBlock);
    }

    static constexpr BlockId kNoBlock = -1;

    /// Appends one merger; ids must be alive and times strictly increasing.
    BlockId add_event(double time, std::vector<BlockId> merged) {
        if (merged.size() < 2) throw structure_error("merger needs at least 2 blocks");
        if (!events_.empty() && !(time > events_.back().time))
            throw structure_error("event times must strictly increase");
        if (events_.empty() && !(time > 0.0))
            throw structure_error("event times must be positive");
        std::sort(merged.begin(), merged.end());
        if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
            throw structure_error("merger lists a block twice");
        BlockId id = BlockId(birth_.size());
        int size = 0;
        for (BlockId m : merged) {
            if (m < 0 || m >= id) throw structure_error("merger references unknown block");
            if (parent_[std::size_t(m)] != kNoBlock)
                throw structure_error("merger references an already merged block");
            size += size_[std::size_t(m)];
        }
        for (BlockId m : merged) parent_[std::size_t(m)] = id;
        birth_.push_back(time);
        size_.push_back(size);
        parent_.push_back(kNoBlock);
        events_.push_back(MergerEvent{time, std::move(merged), id});
        return id;
    }

    int n() const { return n_; }
    std::size_t num_events() const { return events_.size(); }
    const MergerEvent& event(std::size_t e) const { return events_[e]; }
    const std::vector<MergerEvent>& events() const { return events_; }
    std::size_t num_blocks() const { return birth_.size(); }

    double birth_time(BlockId id) const { return birth_[std::size_t(id)]; }
    int block_size(BlockId id) const { return size_[std::size_t(id)]; }
    BlockId parent(BlockId id) const { return parent_[std::size_t(id)]; }
    bool is_root(BlockId id) const { return parent_[std::size_t(id)] == kNoBlock; }

    BlockId root() const { return BlockId(birth_.size()) - 1; }
    double mrca_time() const { return events_.empty() ? 0.0 : events_.back().time; }

    /// Lifetime of the branch above a block; the root line is unbounded.
    double branch_length(BlockId id) const {
        BlockId p = parent_[std::size_t(id)];
        return p == kNoBlock ? inf : birth_[std::size_t(p)] - birth_[std::size_t(id)];
    }

    /// Leaf set of a block, by expanding merger children.
    std::vector<int> leaves_of(BlockId id) const {
        std::vector<int> out;
        std::vector<BlockId> stack{id};
        while (!stack.empty()) {
            BlockId cur = stack.back();
            stack.pop_back();
            if (cur < n_) {
                out.push_back(int(cur));
            } else {
                const auto& ev = events_[std::size_t(cur) - std::size_t(n_)];
                stack.insert(stack.end(), ev.merged.begin(), ev.merged.end());
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Full structural check; throws structure_error on any violation.
    void validate() const {
        if (n_ >= 2 && events_.empty()) throw structure_error("no events for n >= 2");
        if (events_.size() > std::size_t(n_ - 1))
            throw structure_error("more than n-1 events");
        bool all_binary = true;
        double last = 0.0;
        for (const auto& ev : events_) {
            if (!(ev.time > last)) throw structure_error("non-increasing event time");
            last = ev.time;
            if (ev.merged.size() != 2) all_binary = false;
        }
        if (events_.size() == std::size_t(n_ - 1) && !all_binary &&  n_ > 1)
            throw structure_error("n-1 events with a non-binary merger");
        if (block_size(root()) != n_)
            throw structure_error("log does not terminate in a block of all leaves");
        auto leaves = leaves_of(root());
        if (int(leaves.size()) != n_)
            throw structure_error("root leaf set has the wrong size");
        for (BlockId id = 0; id + 1 < BlockId(birth_.size()); ++id)
            if (parent_[std::size_t(id)] == kNoBlock)
                throw structure_error("non-root block was never merged");
    }

  private:
    int n_;
    std::vector<MergerEvent> events_;
    std::vector<double> birth_;
    std::vector<int> size_;
    std::vector<BlockId> parent_;
};

namespace detail {

/// Draws the merger size k from b blocks by scanning the weight row.
inline int draw_merger_size(const RateTable& rates, int b, double u_times_total) {
    double cum = 0.0;
    for (int k = 2; k < b; ++k) {
        cum += rates.weight(b, k);
        if (u_times_total <= cum) return k;
    }
    return b;
}

/// Coalescent time -> real time under exponential population growth.
inline double growth_real_time(double tau, double rho) {
    return rho > 0.0 ? std::log1p(rho * tau) / rho : tau;
}

} // namespace detail

/// Jump-hold simulation of the Lambda-n-coalescent down to the MRCA.
/// With growth_rate rho > 0 the recorded event times are the real times
/// log(1 + rho * tau) / rho of the coalescent-time jumps tau; the jump
/// chain itself (and hence the RNG stream) does not depend on rho.
inline EventLog simulate_genealogy(int n, const RateTable& rates, std::uint64_t seed,
                                   double growth_rate = 0.0) {
    if (n < 2) throw precondition_error("simulate_genealogy needs n >= 2");
    if (n > rates.n_max())
        throw precondition_error("rate table too small for requested sample size");
    if (growth_rate < 0.0) throw precondition_error("growth rate must be >= 0");

    Pcg64 rng(seed, 0x67656e65616c6f67ULL);
    EventLog log(n);
    std::vector<BlockId> alive(static_cast<std::size_t>(n));
    std::iota(alive.begin(), alive.end(), 0);

    double tau = 0.0;
    while (alive.size() > 1) {
        int b = int(alive.size());
        double lambda_b = rates.total(b);
        tau += rng.exponential(lambda_b);
        int k = detail::draw_merger_size(rates, b, rng.uniform01() * lambda_b);
        // partial Fisher-Yates: uniform k-subset into the first k slots
        for (int j = 0; j < k; ++j) {
            std::size_t idx = std::size_t(j) + rng.bounded(std::uint64_t(b - j));
            std::swap(alive[std::size_t(j)], alive[idx]);
        }
        std::vector<BlockId> merged(alive.begin(), alive.begin() + k);
        BlockId created = log.add_event(detail::growth_real_time(tau, growth_rate),
                                        std::move(merged));
        for (int j = k - 1; j >= 1; --j) {
            alive[std::size_t(j)] = alive.back();
            alive.pop_back();
        }
        alive[0] = created;
    }
    return log;
}

} // namespace oclade
