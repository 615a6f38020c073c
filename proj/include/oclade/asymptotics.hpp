#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "oclade/errors.hpp"
#include "oclade/math.hpp"
#include "oclade/measure.hpp"
#include "oclade/quadrature.hpp"
#include "oclade/rates.hpp"

namespace oclade {

enum class LimitMethod {
    explicit_form,     // closed forms for k <= 2
    phase_type,        // exponential-mixture absorption law
    dust_series,       // geometric jump-count series (dust, k = 1)
    beta_limit,        // Beta comparison law for the uniform measure
    growth_quadrature, // exponential-growth time change
};

inline const char* to_string(LimitMethod m) {
    switch (m) {
        case LimitMethod::explicit_form: return "explicit";
        case LimitMethod::phase_type: return "phase_type";
        case LimitMethod::dust_series: return "dust_series";
        case LimitMethod::beta_limit: return "beta_limit";
        case LimitMethod::growth_quadrature: return "growth_quadrature";
    }
    return "?";
}

/// One exponential of the absorption-time mixture: the chain leaves
/// total rate `rate` at block count r, entering the CDF with weight
/// `weight` (the weights sum to 1).
struct MixtureCoefficient {
    int r;
    double rate;   // lambda_r
    double weight; // a_{k+1,r}
};

struct LimitMomentResult {
    int k = 1;
    double value = 0.0;
    LimitMethod method = LimitMethod::phase_type;
    std::vector<MixtureCoefficient> coefficients;
};

/// Coefficients a_{k+1,r} of the absorption-time CDF
/// 1 - sum_r a_{k+1,r} exp(-lambda_r t) of the block-counting chain
/// started from k+1 blocks. The generator restricted to the transient
/// states {2..k+1} is triangular with diagonal -lambda_b, so the
/// coefficients follow by back-substitution provided the rates are
/// pairwise distinct.
inline std::vector<MixtureCoefficient> absorption_mixture(int k, const RateTable& rates) {
    if (k < 1) throw precondition_error("absorption mixture needs k >= 1");
    if (rates.n_max() < k + 1)
        throw precondition_error("rate table too small for absorption mixture");
    const int top = k + 1;
    std::vector<double> lambda(std::size_t(top) + 1, 0.0);
    for (int b = 2; b <= top; ++b) lambda[std::size_t(b)] = rates.total(b);
    for (int r = 2; r <= top; ++r)
        for (int s = r + 1; s <= top; ++s)
            if (std::abs(lambda[r] - lambda[s]) <
                1e-9 * std::max(std::abs(lambda[r]), std::abs(lambda[s])))
                throw degenerate_spectrum_error(
                    "total rates collide at r=" + std::to_string(r) + ", s=" +
                    std::to_string(s) + "; mixture representation unavailable");

    // c[b][r]: coefficient of exp(-lambda_r t) in the occupation of b
    std::vector<std::vector<double>> c(std::size_t(top) + 1,
                                       std::vector<double>(std::size_t(top) + 1, 0.0));
    c[std::size_t(top)][std::size_t(top)] = 1.0;
    for (int b = top - 1; b >= 2; --b) {
        for (int r = b + 1; r <= top; ++r) {
            KahanSum inflow;
            for (int bp = b + 1; bp <= top; ++bp) {
                int m = bp - b + 1; // merger size bringing bp -> b
                inflow.add(rates.weight(bp, m) * c[std::size_t(bp)][std::size_t(r)]);
            }
            c[std::size_t(b)][std::size_t(r)] = inflow.value() / (lambda[b] - lambda[r]);
        }
        KahanSum others;
        for (int r = b + 1; r <= top; ++r) others.add(c[std::size_t(b)][std::size_t(r)]);
        c[std::size_t(b)][std::size_t(b)] = -others.value(); // occupation is 0 at t = 0
    }

    std::vector<MixtureCoefficient> out;
    for (int r = 2; r <= top; ++r) {
        KahanSum a;
        for (int b = 2; b <= r; ++b) a.add(c[std::size_t(b)][std::size_t(r)]);
        out.push_back(MixtureCoefficient{r, lambda[std::size_t(r)], a.value()});
    }
    return out;
}

/// Laplace transform E(exp(-s T)) of the absorption time of the
/// block-counting chain started from k+1 blocks, by first-step
/// analysis. Independent of the mixture-coefficient route.
inline double absorption_laplace(int k, double s, const RateTable& rates) {
    if (k < 1) throw precondition_error("absorption transform needs k >= 1");
    if (rates.n_max() < k + 1)
        throw precondition_error("rate table too small for absorption transform");
    std::vector<double> phi(std::size_t(k) + 2, 0.0);
    phi[1] = 1.0;
    for (int b = 2; b <= k + 1; ++b) {
        KahanSum acc;
        for (int m = 2; m <= b; ++m)
            acc.add(rates.weight(b, m) * phi[std::size_t(b - m + 1)]);
        phi[std::size_t(b)] = acc.value() / (rates.total(b) + s);
    }
    return phi[std::size_t(k) + 1];
}

/// E(S^k) for dust-free measures: the limit frequency of leaf 1's block
/// at an independent Exp(theta/2) time, evaluated through the
/// absorption mixture. For k <= 2 the closed forms in lambda_2 and
/// lambda_3 are cross-checked internally.
inline LimitMomentResult limit_moment_nodust(int k, double theta, const RateTable& rates) {
    if (k < 1) throw precondition_error("limit moment needs k >= 1");
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    if (classify(rates.spec()).has_dust)
        throw regime_error("wrong regime: measure has dust; use the dust-case mean");
    const double h = 0.5 * theta;
    auto mix = absorption_mixture(k, rates);
    KahanSum acc;
    for (const auto& m : mix) acc.add(m.weight * h / (m.rate + h));
    double value = 1.0 - acc.value();

    if (k == 1) {
        double mass = rates.total(2); // lambda_2 equals the total mass
        double explicit_value = mass / (mass + h);
        if (std::abs(explicit_value - value) > 1e-12)
            throw error("mixture mean disagrees with its closed form");
    } else if (k == 2) {
        double mass = rates.total(2);
        double explicit_value =
            1.0 - 1.5 * h / (mass + h) + 0.5 * h / (rates.total(3) + h);
        if (std::abs(explicit_value - value) > 1e-12)
            throw error("mixture second moment disagrees with its closed form");
    }
    LimitMomentResult res;
    res.k = k;
    res.value = value;
    res.method = k <= 2 ? LimitMethod::explicit_form : LimitMethod::phase_type;
    res.coefficients = std::move(mix);
    return res;
}

/// Beta comparison law for the uniform measure. Reported alongside the
/// mixture moments; the two disagree from the second moment on, and the
/// Monte Carlo comparison reports adjudicate between them.
struct BetaLimit {
    double alpha;
    double beta;
    double moment(int k) const {
        double v = 1.0;
        for (int m = 0; m < k; ++m) v *= (alpha + m) / (alpha + beta + m);
        return v;
    }
};

inline BetaLimit bsc_limit_beta(double theta) {
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    const double h = 0.5 * theta;
    return BetaLimit{1.0 / (1.0 + h), h / (1.0 + h)};
}

/// E(S) for dust measures that stay infinite: the jump chain of the
/// marked block's frequency has i.i.d. Exp(mu_minus1) waiting times and
/// jump values with mean 1 - (1 - mass/mu_minus1)^k, and the clock
/// lands between jumps K and K+1 with K geometric. The series is the
/// ground truth; the summed closed form is cross-checked against it.
inline LimitMomentResult limit_mean_dust(double theta, const LambdaSpec& spec) {
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    MeasureClass cls = classify(spec);
    if (!cls.has_dust)
        throw regime_error("wrong regime: measure has no dust");
    if (!cls.stays_infinite)
        throw regime_error("wrong regime: measure has an atom at 1");
    const double h = 0.5 * theta;
    const double mu = cls.mu_minus1;
    const double mass = spec.total_mass();
    const double jump_b = 1.0 - mass / mu;       // E(f[k]) = 1 - jump_b^k
    const double geo_q = mu / (mu + h);          // P(K = k) = geo_q^(k-1) (1-geo_q)
    KahanSum series;
    double pk = 1.0 - geo_q; // P(K = 1)
    double bk = jump_b;
    for (int k = 1; k < 100000; ++k) {
        double term = (1.0 - bk) * pk;
        series.add(term);
        if (term < 1e-17 && k > 8) break;
        pk *= geo_q;
        bk *= jump_b;
    }
    const double a_prime = jump_b * geo_q;
    const double closed = 1.0 - (h / mu) * a_prime / (1.0 - a_prime);
    if (std::abs(closed - series.value()) > 1e-12)
        throw error("dust series disagrees with its closed form");
    LimitMomentResult res;
    res.k = 1;
    res.value = series.value();
    res.method = LimitMethod::dust_series;
    return res;
}

/// E(S^k) for Kingman's coalescent under exponential growth with rate
/// rho > 0: the mixture integrated against the time-changed clock
/// density, by adaptive quadrature.
inline LimitMomentResult limit_moments_growth(int k, double theta, double rho,
                                              const RateTable& rates) {
    if (rates.spec().kind() != MeasureKind::kingman)
        throw regime_error("unsupported measure for growth moments");
    if (!(rho > 0.0)) throw precondition_error("growth moments need rho > 0");
    if (!(theta > 0.0)) throw precondition_error("theta must be > 0");
    const double h = 0.5 * theta;
    auto mix = absorption_mixture(k, rates);
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-10;
    KahanSum acc;
    for (const auto& m : mix) {
        double integral = integrate_halfline(
            [&](double t) {
                return std::exp(-(h / rho + 1.0) * std::log1p(rho * t) - m.rate * t);
            },
            opt);
        acc.add(m.weight * integral);
    }
    LimitMomentResult res;
    res.k = k;
    res.value = 1.0 - h * acc.value();
    res.method = LimitMethod::growth_quadrature;
    res.coefficients = std::move(mix);
    return res;
}

} // namespace oclade
