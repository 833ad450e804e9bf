#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwdre/realization.hpp"

namespace rwdre
{
    struct DecouplingParams
    {
        double v_circ = 1.0;
        double kappa_circ = 0.1;
        double C_circ = 1.0;
        double c2 = 1.0;
        double c3 = 1.0;
        double gamma_circ = 1.5;

        void validate() const;
        // C e^{-kappa (log dH)^gamma}; +inf for dH <= 1
        double bound(double dH) const;
    };

    // (-inf, a] x [b, b+s]
    struct LeftStrip
    {
        double a;
        double b;
        double s;
    };

    // [c, inf) x [d, d+s]
    struct RightStrip
    {
        double c;
        double d;
        double s;
    };

    struct DistanceCheck
    {
        bool ok;
        double dH;
        double dV;
        double s;
    };

    DistanceCheck check_distance_condition(const LeftStrip& B1, const RightStrip& B2, const DecouplingParams& p);

    // Gaps between bounded boxes [x0,x1) x [t0,t1).
    double horizontal_gap(double a0, double a1, double b0, double b1);

    enum class FunctionalKind
    {
        one,              // f = 1
        occupationAtLeast, // sum_{x in [x_lo,x_hi)} eta_{t_lo}(x) >= threshold
        jumpCountAtLeast,  // env jumps out of [x_lo,x_hi) during (t_lo,t_hi] >= threshold
        noiseCountAtLeast, // points of the walk noise in [x_lo,x_hi) x (t_lo,t_hi] >= threshold
    };

    struct BoxFunctional
    {
        FunctionalKind kind = FunctionalKind::one;
        std::int64_t x_lo = 0;
        std::int64_t x_hi = 1;
        double t_lo = 0.0;
        double t_hi = 0.0;
        std::int64_t threshold = 1;

        std::string describe() const;
        bool inside(const LeftStrip& B) const;
        bool inside(const RightStrip& B) const;
        double eval(const Environment& env, NoiseField& noise) const;
    };

    struct DecouplingResult
    {
        double dH = 0.0;
        double dV = 0.0;
        double s = 0.0;
        bool condition_ok = false;
        double gap = 0.0;
        double stderr_ = 0.0;
        double bound = 0.0;
        std::uint64_t n = 0;
        std::vector<double> f1;
        std::vector<double> f2;
    };

    // Monte Carlo estimate of E[f1 f2] - E[f1] E[f2] over n replicas of the
    // environment (and walk noise with intensity Lambda, for noise functionals).
    DecouplingResult decoupling_gap(const EnvSpec& env, const LeftStrip& B1, const RightStrip& B2,
                                    const BoxFunctional& f1, const BoxFunctional& f2, const DecouplingParams& p,
                                    std::uint64_t n, std::uint64_t master, double Lambda = 1.0,
                                    std::uint32_t replica_offset = 0);
} // namespace rwdre
