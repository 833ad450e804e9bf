#include "rwdre/traps.hpp"

#include <cmath>

#include "rwdre/box_events.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    TrapParams TrapParams::derived(double K, int r, double v_minus, double v_plus)
    {
        TrapParams p{K, r, (v_plus - v_minus) / 6.0, v_minus, v_plus};
        p.validate();
        return p;
    }

    void TrapParams::validate() const
    {
        if (!(K >= 1.0))
            throw ParameterError("traps: K must be >= 1");
        if (r < 1)
            throw ParameterError("traps: r must be a positive integer");
        if (!(theta > 0.0))
            throw ParameterError("traps: theta must be positive");
        if (!(v_minus <= v_plus))
            throw ParameterError("traps: need v_minus <= v_plus");
    }

    std::vector<StartPoint> trap_starts(double wx, double wt, double K, double theta)
    {
        std::vector<StartPoint> out;
        const auto lo = static_cast<std::int64_t>(std::ceil(wx + theta * K - kTieEps));
        const auto hi = static_cast<std::int64_t>(std::floor(wx + 2.0 * theta * K + kTieEps));
        for (std::int64_t y = lo; y <= hi; ++y)
            out.push_back({y, wt});
        return out;
    }

    TrapCheck is_trapped(double wx, double wt, double K, double theta, double v_minus, Realization& R)
    {
        TrapCheck c;
        const auto starts = trap_starts(wx, wt, K, theta);
        if (starts.empty())
        {
            c.empty_interval = true;
            return c;
        }
        const auto paths = R.family(starts, K);
        for (const auto& path : paths)
            if (at_most(path.final_position() - path.start.x0, (v_minus + theta) * K))
            {
                c.trapped = true;
                c.witness = path.start;
                break;
            }
        return c;
    }

    ThreatCheck is_threatened(double wx, double wt, const TrapParams& p, Realization& R)
    {
        p.validate();
        ThreatCheck c;
        for (int j = 0; j < p.r; ++j)
        {
            const TrapCheck t = is_trapped(wx + j * p.K * p.v_plus, wt + j * p.K, p.K, p.theta, p.v_minus, R);
            c.empty_interval = c.empty_interval || t.empty_interval;
            if (t.trapped)
            {
                c.threatened = true;
                c.j = j;
                c.witness = t.witness;
                break;
            }
        }
        return c;
    }

    std::string to_string(Dichotomy d)
    {
        switch (d)
        {
        case Dichotomy::speedup:
            return "speedup";
        case Dichotomy::delay:
            return "delay";
        case Dichotomy::notThreatened:
            return "not_threatened";
        }
        return "?";
    }

    DichotomyResult verify_threat_dichotomy(StartPoint y, const TrapParams& p, Realization& R)
    {
        p.validate();
        if (p.theta > (p.v_plus - p.v_minus) / 4.0 + kTieEps)
            throw ParameterError("threat dichotomy: theta must not exceed (v_plus - v_minus)/4");
        DichotomyResult res;
        res.threat = is_threatened(static_cast<double>(y.x0), y.t0, p, R);
        if (!res.threat.threatened)
            return res;
        const double T = p.r * p.K;
        const WalkPath w = R.walk(y, T);
        const double step = (p.v_plus + p.theta / (2.0 * p.r)) * p.K;
        for (int j = 0; j < p.r; ++j)
            if (at_least(w.position_at((j + 1) * p.K) - w.position_at(j * p.K), step))
            {
                res.speedup = true;
                res.speedup_j = j;
                break;
            }
        res.displacement = w.final_position() - y.x0;
        res.delay = at_most(res.displacement, (p.v_plus - p.theta / (2.0 * p.r)) * T);
        if (res.speedup)
            res.kind = Dichotomy::speedup;
        else if (res.delay)
            res.kind = Dichotomy::delay;
        else
            throw InvariantViolation("threat dichotomy: threatened start at x=" + std::to_string(y.x0) +
                                     " shows neither speedup nor delay");
        return res;
    }

    std::vector<WalkRequest> threat_requests(StartPoint y, const TrapParams& p)
    {
        std::vector<WalkRequest> out{{y, p.r * p.K}};
        for (int j = 0; j < p.r; ++j)
        {
            const auto starts =
                trap_starts(static_cast<double>(y.x0) + j * p.K * p.v_plus, y.t0 + j * p.K, p.K, p.theta);
            if (!starts.empty())
            {
                out.push_back({starts.front(), p.K});
                out.push_back({starts.back(), p.K});
            }
        }
        return out;
    }
} // namespace rwdre
