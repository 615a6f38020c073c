#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oclade/errors.hpp"
#include "oclade/math.hpp"
#include "oclade/measure.hpp"
#include "oclade/quadrature.hpp"

namespace oclade {

namespace detail {

inline void check_bk(int b, int k) {
    if (b < 2 || k < 2 || k > b)
        throw precondition_error("merger rate requires 2 <= k <= b, got b=" +
                                 std::to_string(b) + " k=" + std::to_string(k));
}

inline void check_range(int b, int k, int n_max) {
    if (b < 2 || b > n_max || k < 2 || k > b)
        throw precondition_error("rate lookup outside table range: b=" +
                                 std::to_string(b) + " k=" + std::to_string(k));
}

inline double custom_rate_integral(const LambdaSpec& spec, int b, int k) {
    const auto& dens = spec.density();
    auto integrand = [&, b, k](double x) {
        if (x <= 0.0) return k == 2 ? dens(x) : 0.0;
        if (x >= 1.0) return b == k ? dens(x) : 0.0;
        double lg = (k - 2) * std::log(x) + (b - k) * std::log1p(-x);
        return std::exp(lg) * dens(x);
    };
    QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    opt.max_evals = 1'000'000;
    try {
        return integrate_unit_interval(integrand, opt);
    } catch (const quadrature_error&) {
        throw quadrature_error("rate integration failed for b=" + std::to_string(b) +
                               " k=" + std::to_string(k));
    }
}

} // namespace detail

/// Rate at which a given k-tuple out of b blocks merges.
inline double lambda_bk(const LambdaSpec& spec, int b, int k) {
    detail::check_bk(b, k);
    switch (spec.kind()) {
        case MeasureKind::kingman:
            return k == 2 ? 1.0 : 0.0;
        case MeasureKind::dirac: {
            double p = spec.dirac_p();
            // 0^0 = 1, so dirac(1) keeps exactly the all-merger rate
            if (p == 1.0) return k == b ? 1.0 : 0.0;
            return std::exp((k - 2) * std::log(p) + (b - k) * std::log1p(-p));
        }
        case MeasureKind::uniform:
            return std::exp(log_gamma(k - 1.0) + log_gamma(b - k + 1.0) - log_gamma(double(b)));
        case MeasureKind::beta: {
            double a1 = spec.beta_shape1(), a2 = spec.beta_shape2();
            return spec.scale() *
                   std::exp(log_beta(a1 + k - 2, a2 + b - k) - log_beta(a1, a2));
        }
        case MeasureKind::custom:
            return detail::custom_rate_integral(spec, b, k);
    }
    return 0.0;
}

/// Total rate of the next coalescence from b blocks.
inline double total_rate(const LambdaSpec& spec, int b) {
    if (b < 2) throw precondition_error("total rate requires b >= 2");
    KahanSum sum;
    for (int k = 2; k <= b; ++k)
        sum.add(std::exp(log_choose(b, k)) * lambda_bk(spec, b, k));
    return sum.value();
}

/// Eagerly built, immutable table of merger rates lambda_{b,k}, the
/// binomially weighted rates C(b,k) lambda_{b,k} used by the simulator
/// and the moment recursions, and the total rates lambda_b, for all
/// 2 <= k <= b <= n_max. Safe to share across threads once built.
class RateTable {
  public:
    RateTable(LambdaSpec spec, int n_max) : spec_(std::move(spec)), n_max_(n_max) {
        if (n_max_ < 2) throw precondition_error("rate table requires n_max >= 2");
        offsets_.resize(n_max_ + 1, 0);
        std::size_t count = 0;
        for (int b = 2; b <= n_max_; ++b) {
            offsets_[b] = count;
            count += std::size_t(b - 1);
        }
        rates_.resize(count);
        weights_.resize(count);
        totals_.assign(n_max_ + 1, 0.0);
        fill();
    }

    const LambdaSpec& spec() const { return spec_; }
    int n_max() const { return n_max_; }

    double rate(int b, int k) const {
        detail::check_range(b, k, n_max_);
        return rates_[offsets_[b] + std::size_t(k - 2)];
    }

    /// C(b,k) * lambda_{b,k}: the rate of *some* k-merger from b blocks.
    double weight(int b, int k) const {
        detail::check_range(b, k, n_max_);
        return weights_[offsets_[b] + std::size_t(k - 2)];
    }

    double total(int b) const {
        if (b < 2 || b > n_max_)
            throw precondition_error("total rate outside table range");
        return totals_[b];
    }

  private:
    void fill();

    LambdaSpec spec_;
    int n_max_;
    std::vector<std::size_t> offsets_;
    std::vector<double> rates_;
    std::vector<double> weights_;
    std::vector<double> totals_;
};

inline void RateTable::fill() {
    // integer-argument log-gamma lookup, shared by every closed form
    std::vector<double> lg(std::size_t(n_max_) + 2, 0.0);
    for (std::size_t i = 1; i < lg.size(); ++i) lg[i] = log_gamma(double(i));
    auto lchoose = [&](int n, int k) { return lg[n + 1] - lg[k + 1] - lg[n - k + 1]; };

    const MeasureKind kind = spec_.kind();
    std::vector<double> lgA, lgB, lgAB;
    double lbeta0 = 0.0, log_scale = 0.0;
    if (kind == MeasureKind::beta) {
        double a1 = spec_.beta_shape1(), a2 = spec_.beta_shape2();
        lgA.resize(n_max_ + 1);
        lgB.resize(n_max_ + 1);
        lgAB.resize(n_max_ + 1);
        for (int i = 0; i <= n_max_; ++i) {
            lgA[i] = log_gamma(a1 + i);
            lgB[i] = log_gamma(a2 + i);
            lgAB[i] = log_gamma(a1 + a2 + i);
        }
        lbeta0 = lgA[0] + lgB[0] - lgAB[0];
        log_scale = std::log(spec_.scale());
    }
    const double log_p = kind == MeasureKind::dirac && spec_.dirac_p() < 1.0
                             ? std::log(spec_.dirac_p())
                             : 0.0;
    const double log_q = kind == MeasureKind::dirac && spec_.dirac_p() < 1.0
                             ? std::log1p(-spec_.dirac_p())
                             : 0.0;

    for (int b = 2; b <= n_max_; ++b) {
        KahanSum total;
        for (int k = 2; k <= b; ++k) {
            double log_rate;
            switch (kind) {
                case MeasureKind::kingman:
                    log_rate = k == 2 ? 0.0 : -inf;
                    break;
                case MeasureKind::dirac:
                    if (spec_.dirac_p() == 1.0)
                        log_rate = k == b ? 0.0 : -inf;
                    else
                        log_rate = (k - 2) * log_p + (b - k) * log_q;
                    break;
                case MeasureKind::uniform:
                    log_rate = lg[k - 1] + lg[b - k + 1] - lg[b];
                    break;
                case MeasureKind::beta:
                    log_rate = log_scale + lgA[k - 2] + lgB[b - k] - lgAB[b - 2] - lbeta0;
                    break;
                case MeasureKind::custom:
                default:
                    log_rate = std::log(detail::custom_rate_integral(spec_, b, k));
                    break;
            }
            std::size_t idx = offsets_[b] + std::size_t(k - 2);
            rates_[idx] = std::exp(log_rate);
            weights_[idx] = std::isinf(log_rate) ? 0.0 : std::exp(lchoose(b, k) + log_rate);
            total.add(weights_[idx]);
        }
        totals_[b] = total.value();
    }
}

} // namespace oclade
