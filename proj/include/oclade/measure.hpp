#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "oclade/errors.hpp"
#include "oclade/math.hpp"
#include "oclade/quadrature.hpp"

namespace oclade {

enum class MeasureKind { kingman, dirac, beta, uniform, custom };

inline const char* to_string(MeasureKind k) {
    switch (k) {
        case MeasureKind::kingman: return "kingman";
        case MeasureKind::dirac: return "dirac";
        case MeasureKind::beta: return "beta";
        case MeasureKind::uniform: return "uniform";
        case MeasureKind::custom: return "custom";
    }
    return "?";
}

/// A finite measure on [0,1] driving the merger rates. The beta variant
/// stores the density of the Beta(shape1, shape2) distribution, so its
/// total mass is `scale` (1 by default), matching the convention that
/// the pairwise rate of the canonical examples equals 1.
class LambdaSpec {
  public:
    using Density = std::function<double(double)>;

    static LambdaSpec kingman() { return LambdaSpec(MeasureKind::kingman); }

    static LambdaSpec uniform() { return LambdaSpec(MeasureKind::uniform); }

    static LambdaSpec dirac(double p) {
        if (!(p > 0.0 && p <= 1.0))
            throw precondition_error("dirac point must lie in (0,1]");
        LambdaSpec s(MeasureKind::dirac);
        s.p_ = p;
        return s;
    }

    static LambdaSpec beta(double shape1, double shape2, double scale = 1.0) {
        if (!(shape1 > 0.0) || !(shape2 > 0.0))
            throw precondition_error("beta shapes must be strictly positive");
        if (!(scale > 0.0))
            throw precondition_error("beta scale must be strictly positive");
        LambdaSpec s(MeasureKind::beta);
        s.shape1_ = shape1;
        s.shape2_ = shape2;
        s.scale_ = scale;
        return s;
    }

    /// density is with respect to Lebesgue measure on (0,1); total_mass
    /// must equal its integral and be finite.
    static LambdaSpec custom(Density density, double total_mass) {
        if (!(total_mass > 0.0) || !std::isfinite(total_mass))
            throw precondition_error("custom total mass must be positive and finite");
        LambdaSpec s(MeasureKind::custom);
        s.density_ = std::move(density);
        s.mass_ = total_mass;
        return s;
    }

    MeasureKind kind() const { return kind_; }
    double dirac_p() const { return p_; }
    double beta_shape1() const { return shape1_; }
    double beta_shape2() const { return shape2_; }
    double scale() const { return scale_; }
    const Density& density() const { return density_; }

    double total_mass() const {
        switch (kind_) {
            case MeasureKind::kingman:
            case MeasureKind::dirac:
            case MeasureKind::uniform: return 1.0;
            case MeasureKind::beta: return scale_;
            case MeasureKind::custom: return mass_;
        }
        return 1.0;
    }

    /// Atom at 1, relevant for the "stays infinite" classification.
    double mass_at_one() const {
        return (kind_ == MeasureKind::dirac && p_ == 1.0) ? 1.0 : 0.0;
    }

    std::string describe() const {
        switch (kind_) {
            case MeasureKind::kingman: return "kingman";
            case MeasureKind::uniform: return "uniform";
            case MeasureKind::dirac: return "dirac(p=" + std::to_string(p_) + ")";
            case MeasureKind::beta:
                return "beta(" + std::to_string(shape1_) + "," + std::to_string(shape2_) + ")";
            case MeasureKind::custom: return "custom";
        }
        return "?";
    }

  private:
    explicit LambdaSpec(MeasureKind k) : kind_(k) {}

    MeasureKind kind_;
    double p_ = 0.0;
    double shape1_ = 0.0, shape2_ = 0.0, scale_ = 1.0;
    double mass_ = 1.0;
    Density density_;
};

struct MeasureClass {
    double mu_minus1 = inf; // integral of 1/x against the measure
    bool has_dust = false;
    bool stays_infinite = true;
    double mass_at_one = 0.0;
};

namespace detail {

/// Decides whether the 1/x integral of a custom density converges by
/// comparing its contributions over dyadic windows shrinking to 0.
/// Windows that keep growing (or stop shrinking) mark divergence; a
/// geometric decay lets the tail be summed off. Anything in between the
/// two patterns within the window budget is reported inconclusive.
inline MeasureClass classify_custom(const LambdaSpec& spec) {
    const auto& dens = spec.density();
    QuadratureOptions opt;
    opt.rel_tol = 1e-9;
    opt.max_evals = 50'000;
    auto window = [&](double lo, double hi) {
        return integrate_adaptive([&](double x) { return dens(x) / x; }, lo, hi, opt);
    };
    const MeasureClass divergent{inf, false, spec.mass_at_one() == 0.0, spec.mass_at_one()};
    // top piece with a substitution that absorbs a possible (1-x)^p, p > -1
    double total = integrate_adaptive(
        [&](double v) {
            double x = 1.0 - v * v;
            return 2.0 * v * dens(x) / x;
        },
        0.0, std::sqrt(0.5), opt);
    double prev = window(0.25, 0.5);
    total += prev;
    double lo = 0.125;
    int non_decreasing = 0;
    for (int iter = 0; iter < 150; ++iter) {
        double cur = window(lo, 2.0 * lo);
        total += cur;
        double ratio = prev > 0.0 ? cur / prev : 0.0;
        non_decreasing = (ratio >= 0.999) ? non_decreasing + 1 : 0;
        if (non_decreasing >= 15) return divergent;
        if (ratio < 0.999) {
            double r = std::min(ratio, 0.998);
            double tail = cur * r / (1.0 - r);
            if (tail < 1e-7 * total) {
                total += tail;
                return MeasureClass{total, true, spec.mass_at_one() == 0.0,
                                    spec.mass_at_one()};
            }
        }
        prev = cur;
        lo *= 0.5;
    }
    throw classification_error(
        "dust classification inconclusive for custom density; supply the class manually");
}

} // namespace detail

/// mu_minus1, dust class and the stays-infinite indicator of a measure.
inline MeasureClass classify(const LambdaSpec& spec) {
    MeasureClass c;
    c.mass_at_one = spec.mass_at_one();
    c.stays_infinite = (c.mass_at_one == 0.0);
    switch (spec.kind()) {
        case MeasureKind::kingman:
        case MeasureKind::uniform:
            c.mu_minus1 = inf;
            c.has_dust = false;
            return c;
        case MeasureKind::dirac:
            c.mu_minus1 = 1.0 / spec.dirac_p();
            c.has_dust = true;
            return c;
        case MeasureKind::beta: {
            double a1 = spec.beta_shape1(), a2 = spec.beta_shape2();
            if (a1 > 1.0) {
                // B(a1-1, a2) / B(a1, a2), reduced
                c.mu_minus1 = spec.scale() * (a1 + a2 - 1.0) / (a1 - 1.0);
                c.has_dust = true;
            } else {
                c.mu_minus1 = inf;
                c.has_dust = false;
            }
            return c;
        }
        case MeasureKind::custom: return detail::classify_custom(spec);
    }
    return c;
}

} // namespace oclade
