#include "rwdre/walker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    namespace
    {
        constexpr double kRateSlack = 1e-12;

        [[noreturn]] void rate_violation(int occ, double a, double b, double Lambda)
        {
            throw ValidationError("rate bound violated at occupation " + std::to_string(occ) + ": alpha+beta = " +
                                  format_double(a + b) + " > Lambda = " + format_double(Lambda));
        }

        struct AbsJump
        {
            double time; // absolute
            int sign;
        };

        // Advance one walk by a single noise point. Returns the sign of the
        // jump taken (0 if none).
        inline int step_sign(const Mark& m, std::int64_t pos, const Environment& env, const RateModel& rates)
        {
            const int occ = env.occupation_before(pos, m.time);
            const double a = rates.a(occ);
            const double b = rates.b(occ);
            if (a + b > rates.Lambda * (1.0 + kRateSlack))
                rate_violation(occ, a, b, rates.Lambda);
            if (m.u <= a)
                return 1;
            if (m.u <= a + b)
                return -1;
            return 0;
        }

        WalkPath to_path(StartPoint y, double horizon, const std::vector<AbsJump>& abs)
        {
            WalkPath p{y, {}, horizon};
            p.jumps.reserve(abs.size());
            for (const auto& j : abs)
                p.jumps.push_back({j.time - y.t0, j.sign});
            return p;
        }

        std::vector<AbsJump> simulate(StartPoint y, double horizon, const Environment& env, NoiseField& noise,
                                      const RateModel& rates)
        {
            std::vector<AbsJump> out;
            const double end = y.t0 + horizon;
            std::int64_t pos = y.x0;
            double t = y.t0;
            for (;;)
            {
                const auto m = noise.next_mark(pos, t);
                if (!m || m->time > end)
                    break;
                t = m->time;
                if (const int s = step_sign(*m, pos, env, rates))
                {
                    pos += s;
                    out.push_back({t, s});
                }
            }
            return out;
        }

        // Simulate the walk from y while tracking `parent` (same start time,
        // parent.x0 <= y.x0). Once both sit on the same site the rest of the
        // parent's path is copied.
        std::vector<AbsJump> simulate_coalescing(StartPoint y, double horizon, const Environment& env,
                                                 NoiseField& noise, const RateModel& rates,
                                                 const std::vector<AbsJump>& parent, std::int64_t parent_x0)
        {
            std::vector<AbsJump> out;
            const double end = y.t0 + horizon;
            std::int64_t pos = y.x0;
            std::int64_t pp = parent_x0;
            std::size_t k = 0;
            double t = y.t0;
            auto merge_from = [&](std::size_t first) {
                out.insert(out.end(), parent.begin() + static_cast<std::ptrdiff_t>(first), parent.end());
                return out;
            };
            if (pp == pos)
                return merge_from(0);
            for (;;)
            {
                const auto m = noise.next_mark(pos, t);
                const double tm = (m && m->time <= end) ? m->time : end;
                while (k < parent.size() && parent[k].time < tm)
                {
                    pp += parent[k++].sign;
                    if (pp == pos)
                        return merge_from(k);
                }
                if (!m || m->time > end)
                    break;
                t = m->time;
                if (const int s = step_sign(*m, pos, env, rates))
                {
                    pos += s;
                    out.push_back({t, s});
                }
                while (k < parent.size() && parent[k].time == t)
                    pp += parent[k++].sign;
                if (pp == pos)
                    return merge_from(k);
            }
            return out;
        }
    } // namespace

    RateModel RateModel::constant(double a, double b, double Lambda)
    {
        RateModel r;
        r.alpha = {a};
        r.beta = {b};
        r.Lambda = Lambda;
        return r;
    }

    double RateModel::alpha_min() const
    {
        return *std::min_element(alpha.begin(), alpha.end());
    }

    double RateModel::alpha_max() const
    {
        return *std::max_element(alpha.begin(), alpha.end());
    }

    void RateModel::validate() const
    {
        if (alpha.empty() || beta.empty())
            throw ValidationError("rates: alpha and beta tables must be non-empty");
        if (!(Lambda >= 1.0) || !std::isfinite(Lambda))
            throw ValidationError("rates: Lambda must be >= 1");
        for (std::size_t k = 0; k < table_size(); ++k)
        {
            const int occ = static_cast<int>(k);
            if (!(a(occ) >= 0.0) || !(b(occ) >= 0.0))
                throw ValidationError("rates: negative rate at occupation " + std::to_string(k));
            if (a(occ) + b(occ) > Lambda * (1.0 + kRateSlack))
                rate_violation(occ, a(occ), b(occ), Lambda);
        }
    }

    std::int64_t WalkPath::position_at(double s) const
    {
        auto it = std::upper_bound(jumps.begin(), jumps.end(), s, [](double v, const Jump& j) { return v < j.time; });
        std::int64_t x = start.x0;
        for (auto j = jumps.begin(); j != it; ++j)
            x += j->sign;
        return x;
    }

    std::int64_t WalkPath::final_position() const
    {
        std::int64_t x = start.x0;
        for (const auto& j : jumps)
            x += j.sign;
        return x;
    }

    std::int64_t WalkPath::min_position(double s) const
    {
        std::int64_t x = start.x0;
        std::int64_t lo = x;
        for (const auto& j : jumps)
        {
            if (j.time > s)
                break;
            x += j.sign;
            lo = std::min(lo, x);
        }
        return lo;
    }

    std::int64_t WalkPath::max_position(double s) const
    {
        std::int64_t x = start.x0;
        std::int64_t hi = x;
        for (const auto& j : jumps)
        {
            if (j.time > s)
                break;
            x += j.sign;
            hi = std::max(hi, x);
        }
        return hi;
    }

    std::int64_t WalkPath::max_excursion(double s) const
    {
        return std::max(max_position(s) - start.x0, start.x0 - min_position(s));
    }

    ThinnedPoints thin_rates(NoiseField& noise, const Environment& env, const RateModel& rates,
                             const SpaceTimeWindow& window)
    {
        ThinnedPoints out;
        for (const auto& p : marked_points_in(noise, window))
        {
            const int s = step_sign({p.time, p.mark}, p.site, env, rates);
            if (s > 0)
                out.alpha.push_back(p);
            else if (s < 0)
                out.beta.push_back(p);
        }
        return out;
    }

    WalkPath run_walk(StartPoint y, double horizon, const Environment& env, NoiseField& noise,
                      const RateModel& rates)
    {
        if (!(horizon >= 0.0) || !(y.t0 >= 0.0))
            throw ParameterError("run_walk: negative horizon or start time");
        return to_path(y, horizon, simulate(y, horizon, env, noise, rates));
    }

    std::vector<WalkPath> run_family(const std::vector<StartPoint>& ys, double horizon, const Environment& env,
                                     NoiseField& noise, const RateModel& rates)
    {
        if (!(horizon >= 0.0))
            throw ParameterError("run_family: negative horizon");
        std::vector<std::size_t> order(ys.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (ys[a].t0 != ys[b].t0)
                return ys[a].t0 < ys[b].t0;
            if (ys[a].x0 != ys[b].x0)
                return ys[a].x0 < ys[b].x0;
            return a < b;
        });
        std::vector<WalkPath> out(ys.size());
        std::vector<AbsJump> prev;
        const StartPoint* prev_start = nullptr;
        for (std::size_t idx : order)
        {
            const StartPoint& y = ys[idx];
            if (!(y.t0 >= 0.0))
                throw ParameterError("run_family: negative start time");
            std::vector<AbsJump> cur;
            if (prev_start && prev_start->t0 == y.t0)
                cur = simulate_coalescing(y, horizon, env, noise, rates, prev, prev_start->x0);
            else
                cur = simulate(y, horizon, env, noise, rates);
            out[idx] = to_path(y, horizon, cur);
            prev = std::move(cur);
            prev_start = &y;
        }
        return out;
    }

    std::int64_t dominating_count(StartPoint y, double t, NoiseField& noise)
    {
        const double L = noise.Lambda();
        const ConstantEnvironment env;
        const auto up = run_walk(y, t, env, noise, RateModel::constant(L, 0.0, L));
        const auto down = run_walk(y, t, env, noise, RateModel::constant(0.0, L, L));
        return up.final_position() - down.final_position();
    }

    Envelope walk_envelope(StartPoint lowest, StartPoint highest, double horizon, NoiseField& noise,
                           const RateModel& rates)
    {
        const ConstantEnvironment env;
        const double a_lo = rates.alpha_min();
        const auto lo = run_walk(lowest, horizon, env, noise, RateModel::constant(a_lo, rates.Lambda - a_lo, rates.Lambda));
        const auto hi = run_walk(highest, horizon, env, noise, RateModel::constant(rates.alpha_max(), 0.0, rates.Lambda));
        return {lo.min_position(horizon), hi.max_position(horizon)};
    }

    std::string path_csv(const WalkPath& path)
    {
        CsvWriter w({"t", "x"});
        std::int64_t x = path.start.x0;
        w.cell(0.0).cell(x).end_row();
        for (const auto& j : path.jumps)
        {
            x += j.sign;
            w.cell(j.time).cell(x).end_row();
        }
        w.cell(path.horizon).cell(x).end_row();
        return w.str();
    }
} // namespace rwdre
