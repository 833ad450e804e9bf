#include "rwdre/decoupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"
#include "rwdre/parallel.hpp"
#include "rwdre/stats.hpp"

namespace rwdre
{
    void DecouplingParams::validate() const
    {
        if (!(v_circ > 0.0 && kappa_circ > 0.0 && C_circ > 0.0 && c2 > 0.0 && c3 > 0.0))
            throw ValidationError("decoupling: v_circ, kappa_circ, C_circ, c2, c3 must be positive");
        if (!(gamma_circ > 1.0))
            throw ValidationError("decoupling: gamma_circ must be > 1");
    }

    double DecouplingParams::bound(double dH) const
    {
        if (!(dH > 1.0))
            return std::numeric_limits<double>::infinity();
        return C_circ * std::exp(-kappa_circ * std::pow(std::log(dH), gamma_circ));
    }

    double horizontal_gap(double a0, double a1, double b0, double b1)
    {
        return std::max({0.0, b0 - a1, a0 - b1});
    }

    DistanceCheck check_distance_condition(const LeftStrip& B1, const RightStrip& B2, const DecouplingParams& p)
    {
        if (!(B1.s >= 0.0) || !(B2.s >= 0.0) || B1.s != B2.s)
            throw ParameterError("distance condition: strips must have equal non-negative height");
        if (!(B1.b >= 0.0 && B2.d >= 0.0))
            throw ParameterError("distance condition: strips must start at non-negative times");
        DistanceCheck r;
        r.s = B1.s;
        r.dH = std::max(0.0, B2.c - B1.a);
        r.dV = horizontal_gap(B1.b, B1.b + B1.s, B2.d, B2.d + B2.s);
        r.ok = r.dH >= p.v_circ * r.dV + p.c2 * r.s + p.c3;
        return r;
    }

    std::string BoxFunctional::describe() const
    {
        switch (kind)
        {
        case FunctionalKind::one:
            return "one";
        case FunctionalKind::occupationAtLeast:
            return "occupation";
        case FunctionalKind::jumpCountAtLeast:
            return "jump_count";
        case FunctionalKind::noiseCountAtLeast:
            return "noise_count";
        }
        return "?";
    }

    bool BoxFunctional::inside(const LeftStrip& B) const
    {
        if (kind == FunctionalKind::one)
            return true;
        return static_cast<double>(x_hi - 1) <= B.a && t_lo >= B.b && t_hi <= B.b + B.s && x_lo < x_hi;
    }

    bool BoxFunctional::inside(const RightStrip& B) const
    {
        if (kind == FunctionalKind::one)
            return true;
        return static_cast<double>(x_lo) >= B.c && t_lo >= B.d && t_hi <= B.d + B.s && x_lo < x_hi;
    }

    double BoxFunctional::eval(const Environment& env, NoiseField& noise) const
    {
        std::int64_t count = 0;
        switch (kind)
        {
        case FunctionalKind::one:
            return 1.0;
        case FunctionalKind::occupationAtLeast:
            if (const auto* traj = dynamic_cast<const EnvTrajectory*>(&env))
                for (std::int64_t x = x_lo; x < x_hi; ++x)
                    count += traj->occupation_at(x, t_lo);
            else
                for (std::int64_t x = x_lo; x < x_hi; ++x)
                    count += env.occupation_before(x, t_lo);
            break;
        case FunctionalKind::jumpCountAtLeast:
            if (const auto* traj = dynamic_cast<const EnvTrajectory*>(&env))
                count = traj->jumps_in(x_lo, x_hi, t_lo, t_hi);
            break;
        case FunctionalKind::noiseCountAtLeast:
            for (std::int64_t x = x_lo; x < x_hi; ++x)
                count += noise.count_in(x, t_lo, t_hi);
            break;
        }
        return count >= threshold ? 1.0 : 0.0;
    }

    DecouplingResult decoupling_gap(const EnvSpec& env, const LeftStrip& B1, const RightStrip& B2,
                                    const BoxFunctional& f1, const BoxFunctional& f2, const DecouplingParams& p,
                                    std::uint64_t n, std::uint64_t master, double Lambda,
                                    std::uint32_t replica_offset)
    {
        p.validate();
        if (n < 2)
            throw ParameterError("decoupling_gap: need n >= 2");
        if (!f1.inside(B1))
            throw UsageError("decoupling_gap: f1 (" + f1.describe() + ") reaches outside B1");
        if (!f2.inside(B2))
            throw UsageError("decoupling_gap: f2 (" + f2.describe() + ") reaches outside B2");
        const DistanceCheck dc = check_distance_condition(B1, B2, p);

        std::int64_t x_lo = 0;
        std::int64_t x_hi = 1;
        double T = 0.0;
        bool any = false;
        for (const auto* f : {&f1, &f2})
        {
            if (f->kind == FunctionalKind::one)
                continue;
            x_lo = any ? std::min(x_lo, f->x_lo) : f->x_lo;
            x_hi = any ? std::max(x_hi, f->x_hi) : f->x_hi;
            T = std::max(T, f->t_hi);
            any = true;
        }
        T = std::max(T, 1e-9);

        struct Pair
        {
            double a;
            double b;
        };
        const auto vals = parallel_map(n, [&](std::uint64_t i) {
            const auto rep = static_cast<std::uint32_t>(replica_offset + i);
            const auto e = make_environment(env, master, rep, x_lo, x_hi, T);
            NoiseField noise(master, rep, Lambda);
            return Pair{f1.eval(*e, noise), f2.eval(*e, noise)};
        });

        DecouplingResult r;
        r.dH = dc.dH;
        r.dV = dc.dV;
        r.s = dc.s;
        r.condition_ok = dc.ok;
        r.n = n;
        r.f1.reserve(n);
        r.f2.reserve(n);
        for (const auto& v : vals)
        {
            r.f1.push_back(v.a);
            r.f2.push_back(v.b);
        }
        const GapEstimate g = covariance_jackknife(r.f1, r.f2);
        r.gap = g.gap;
        r.stderr_ = g.stderr_;
        r.bound = p.bound(dc.dH);
        return r;
    }
} // namespace rwdre
