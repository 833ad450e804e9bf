#include "rwdre/realization.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "rwdre/error.hpp"

namespace rwdre
{
    std::string to_string(EnvKind k)
    {
        switch (k)
        {
        case EnvKind::constant:
            return "constant";
        case EnvKind::zeroRange:
            return "zero_range";
        case EnvKind::asep:
            return "asep";
        }
        return "?";
    }

    void EnvSpec::prepare()
    {
        if (buffer && *buffer < 0)
            throw ValidationError("environment: buffer must be non-negative");
        switch (kind)
        {
        case EnvKind::constant:
            if (constant_state < 0)
                throw ValidationError("environment: constant state must be non-negative");
            break;
        case EnvKind::zeroRange:
            zr.resolve();
            break;
        case EnvKind::asep:
            asep.validate();
            break;
        }
    }

    std::int64_t EnvSpec::buffer_for(double horizon) const
    {
        if (buffer)
            return *buffer;
        switch (kind)
        {
        case EnvKind::zeroRange:
            return zr_default_buffer(zr, horizon);
        case EnvKind::asep:
            return asep_default_buffer(horizon);
        default:
            return 0;
        }
    }

    std::shared_ptr<const Environment> make_environment(const EnvSpec& spec, std::uint64_t master,
                                                        std::uint32_t replica, std::int64_t x_lo,
                                                        std::int64_t x_hi, double horizon)
    {
        if (spec.kind == EnvKind::constant)
            return std::make_shared<ConstantEnvironment>(spec.constant_state);
        if (x_lo >= x_hi)
            throw ParameterError("environment: empty site window");
        const double T = std::max(horizon, 1e-9);
        const std::int64_t B = spec.buffer_for(T);
        const SpaceTimeWindow window{x_lo, x_hi, 0.0, T};
        if (spec.kind == EnvKind::zeroRange)
        {
            const auto init = zr_sample_initial(spec.zr, x_lo - B, x_hi + B, master, replica);
            ZrEvolveOptions o;
            o.buffer = B;
            o.record_firings = spec.record_paths;
            return std::make_shared<EnvTrajectory>(zr_evolve(init, T, window, spec.zr, master, replica, o));
        }
        const auto init = asep_sample_initial(spec.asep, x_lo - B, x_hi + B, master, replica);
        AsepEvolveOptions o;
        o.buffer = B;
        o.record_paths = spec.record_paths;
        return std::make_shared<EnvTrajectory>(asep_evolve(init, T, window, spec.asep, master, replica, o));
    }

    Realization::Realization(std::uint64_t master, std::uint32_t replica, const EnvSpec& spec,
                             const RateModel& rates, const std::vector<WalkRequest>& requests)
        : noise_(master, replica, rates.Lambda), rates_(rates)
    {
        rates_.validate();
        // group by start time: lowest start, highest start, longest horizon
        struct Group
        {
            StartPoint lo;
            StartPoint hi;
            double horizon;
        };
        std::map<double, Group> groups;
        double t_end = 0.0;
        for (const auto& r : requests)
        {
            if (!(r.horizon >= 0.0) || !(r.start.t0 >= 0.0))
                throw ParameterError("realization: negative horizon or start time");
            auto [it, fresh] = groups.try_emplace(r.start.t0, Group{r.start, r.start, r.horizon});
            if (!fresh)
            {
                if (r.start.x0 < it->second.lo.x0)
                    it->second.lo = r.start;
                if (r.start.x0 > it->second.hi.x0)
                    it->second.hi = r.start;
                it->second.horizon = std::max(it->second.horizon, r.horizon);
            }
            t_end = std::max(t_end, r.start.t0 + r.horizon);
        }
        if (groups.empty())
            throw ParameterError("realization: no walks requested");
        cover_lo_ = std::numeric_limits<std::int64_t>::max();
        cover_hi_ = std::numeric_limits<std::int64_t>::min();
        for (const auto& [t0, g] : groups)
        {
            const Envelope e = walk_envelope(g.lo, g.hi, g.horizon, noise_, rates_);
            cover_lo_ = std::min(cover_lo_, e.lo);
            cover_hi_ = std::max(cover_hi_, e.hi);
        }
        env_ = make_environment(spec, master, replica, cover_lo_, cover_hi_ + 1, t_end);
    }

    Realization::Realization(NoiseField noise, std::shared_ptr<const Environment> env, const RateModel& rates)
        : noise_(std::move(noise)), env_(std::move(env)), rates_(rates)
    {
        rates_.validate();
        cover_lo_ = std::numeric_limits<std::int64_t>::min();
        cover_hi_ = std::numeric_limits<std::int64_t>::max();
    }

    WalkPath Realization::walk(StartPoint y, double horizon)
    {
        return run_walk(y, horizon, *env_, noise_, rates_);
    }

    std::vector<WalkPath> Realization::family(const std::vector<StartPoint>& ys, double horizon)
    {
        return run_family(ys, horizon, *env_, noise_, rates_);
    }
} // namespace rwdre
