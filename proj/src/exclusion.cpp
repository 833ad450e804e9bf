#include "rwdre/exclusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    void AsepParams::validate() const
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("asep: p must lie in [0,1]");
        if (!(rho >= 0.0 && rho <= 1.0))
            throw ValidationError("asep: rho must lie in [0,1]");
        for (const auto& r : class_regions)
        {
            if (r.cls < 1)
                throw ParameterError("asep: class labels must be positive integers");
            if (!(r.lo < r.hi))
                throw ParameterError("asep: class region with lo >= hi");
        }
    }

    OccupancyConfig asep_sample_initial(const AsepParams& params, std::int64_t x_min, std::int64_t x_max,
                                        std::uint64_t master, std::uint32_t replica)
    {
        params.validate();
        if (x_min > x_max)
            throw ParameterError("asep_sample_initial: empty site range");
        OccupancyConfig out;
        out.x_min = x_min;
        out.values.resize(static_cast<std::size_t>(x_max - x_min));
        for (std::int64_t x = x_min; x < x_max; ++x)
        {
            auto rng = derive_stream(master, {x, StreamKind::initialLaw, replica});
            out.values[static_cast<std::size_t>(x - x_min)] = uniform01(rng) < params.rho ? 1 : 0;
        }
        return out;
    }

    std::int64_t asep_default_buffer(double horizon)
    {
        return static_cast<std::int64_t>(std::ceil(horizon + 6.0 * std::sqrt(horizon))) + 1;
    }

    namespace
    {
        // Circular bucket queue over time. Pops in the order of E::operator>
        // (smallest first), same as a binary heap would.
        template <class E>
        class CalendarQueue
        {
        public:
            CalendarQueue(std::size_t pending, double density)
            {
                std::size_t m = 64;
                while (m < 16 * pending)
                    m <<= 1;
                heads_.assign(m, -1);
                mask_ = m - 1;
                width_ = 1.0 / std::max(density, 1e-9);
                pool_.reserve(pending + 1);
            }

            bool empty() const { return size_ == 0; }

            void push(const E& e)
            {
                const auto k = static_cast<std::int64_t>(std::floor(e.time / width_));
                std::int32_t n;
                if (free_ >= 0)
                {
                    n = free_;
                    free_ = pool_[static_cast<std::size_t>(n)].next;
                }
                else
                {
                    n = static_cast<std::int32_t>(pool_.size());
                    pool_.emplace_back();
                }
                auto& h = heads_[static_cast<std::size_t>(k) & mask_];
                pool_[static_cast<std::size_t>(n)] = {k, e, h};
                h = n;
                ++size_;
            }

            E pop()
            {
                for (;;)
                {
                    auto& h = heads_[static_cast<std::size_t>(cur_) & mask_];
                    std::int32_t best = -1, best_prev = -1;
                    for (std::int32_t prev = -1, i = h; i >= 0; prev = i, i = pool_[static_cast<std::size_t>(i)].next)
                    {
                        const auto& s = pool_[static_cast<std::size_t>(i)];
                        if (s.k == cur_ && (best < 0 || pool_[static_cast<std::size_t>(best)].e > s.e))
                        {
                            best = i;
                            best_prev = prev;
                        }
                    }
                    if (best >= 0)
                    {
                        auto& s = pool_[static_cast<std::size_t>(best)];
                        if (best_prev < 0)
                            h = s.next;
                        else
                            pool_[static_cast<std::size_t>(best_prev)].next = s.next;
                        s.next = free_;
                        free_ = best;
                        --size_;
                        return s.e;
                    }
                    ++cur_;
                }
            }

        private:
            struct Slot
            {
                std::int64_t k;
                E e;
                std::int32_t next;
            };
            std::vector<Slot> pool_;
            std::vector<std::int32_t> heads_;
            std::int32_t free_ = -1;
            std::size_t mask_ = 0;
            double width_ = 1.0;
            std::int64_t cur_ = 0;
            std::size_t size_ = 0;
        };

        int class_of(const std::vector<ClassRegion>& regions, std::int64_t x)
        {
            if (regions.empty())
                return 1;
            const auto xd = static_cast<double>(x);
            for (const auto& r : regions)
                if (xd >= r.lo && xd < r.hi)
                    return r.cls;
            throw ParameterError("asep: class regions do not cover occupied site " + std::to_string(x));
        }
    } // namespace

    EnvTrajectory asep_evolve(const OccupancyConfig& initial, double horizon, const SpaceTimeWindow& window,
                              const AsepParams& params, std::uint64_t master, std::uint32_t replica,
                              const AsepEvolveOptions& opts)
    {
        params.validate();
        if (initial.values.empty())
            throw ParameterError("asep_evolve: empty domain");
        if (!(horizon > 0.0))
            throw ParameterError("asep_evolve: horizon must be positive");
        const std::int64_t buffer = std::min(window.x_min - initial.x_min, initial.x_max() - window.x_max);
        if (buffer < 0)
            throw ParameterError("asep_evolve: initial configuration does not cover the window");
        const std::int64_t required = std::max(opts.min_buffer, opts.buffer.value_or(0));
        if (buffer < required)
            throw ParameterError("asep_evolve: buffer " + std::to_string(buffer) + " narrower than required " +
                                 std::to_string(required));

        const std::int64_t x0 = initial.x_min;
        const auto n = static_cast<std::int64_t>(initial.values.size());
        const bool classed = !params.class_regions.empty();

        struct Particle
        {
            std::int64_t label;
            int cls;
            std::int64_t pos; // domain index
            Xoshiro256 right;
            Xoshiro256 left;
        };
        std::vector<Particle> parts;
        std::vector<std::int32_t> occupant(static_cast<std::size_t>(n), -1);
        for (std::int64_t i = 0; i < n; ++i)
        {
            const int v = initial.values[static_cast<std::size_t>(i)];
            if (v != 0 && v != 1)
                throw ParameterError("asep_evolve: occupations must be 0 or 1");
            if (v == 0)
                continue;
            const std::int64_t x = x0 + i;
            occupant[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(parts.size());
            parts.push_back({x, class_of(params.class_regions, x), i,
                             derive_stream(master, {x, StreamKind::envClockRight, replica}),
                             derive_stream(master, {x, StreamKind::envClockLeft, replica})});
        }

        std::vector<ParticlePath> paths;
        if (opts.record_paths)
        {
            paths.reserve(parts.size());
            for (const auto& q : parts)
                paths.push_back({q.label, classed ? q.cls : 0, {0.0}, {q.label}});
        }

        struct Ring
        {
            double time;
            std::int64_t label;
            std::int32_t idx;
            std::int8_t dir;
            bool operator>(const Ring& o) const
            {
                if (time != o.time)
                    return time > o.time;
                if (label != o.label)
                    return label > o.label;
                return dir > o.dir;
            }
        };
        CalendarQueue<Ring> pq(2 * parts.size(), static_cast<double>(std::max<std::size_t>(parts.size(), 1)));
        const double rate_r = params.p;
        const double rate_l = 1.0 - params.p;
        auto schedule = [&](std::int32_t idx, std::int8_t dir, double now) {
            auto& q = parts[static_cast<std::size_t>(idx)];
            const double rate = dir > 0 ? rate_r : rate_l;
            if (rate <= 0.0)
                return;
            const double t = now + exponential(dir > 0 ? q.right : q.left, rate);
            if (t <= horizon)
                pq.push({t, q.label, idx, dir});
        };
        for (std::int32_t k = 0; k < static_cast<std::int32_t>(parts.size()); ++k)
        {
            schedule(k, 1, 0.0);
            schedule(k, -1, 0.0);
        }

        std::vector<JumpRecord> jumps;
        while (!pq.empty())
        {
            const Ring r = pq.pop();
            schedule(r.idx, r.dir, r.time);
            auto& q = parts[static_cast<std::size_t>(r.idx)];
            const std::int64_t target = q.pos + r.dir;
            if (target < 0 || target >= n)
                continue;
            const std::int32_t other = occupant[static_cast<std::size_t>(target)];
            if (other < 0)
            {
                occupant[static_cast<std::size_t>(q.pos)] = -1;
                occupant[static_cast<std::size_t>(target)] = r.idx;
                jumps.push_back({r.time, x0 + q.pos, x0 + target, classed ? q.cls : 0, false, 0});
                q.pos = target;
                if (opts.record_paths)
                {
                    auto& pp = paths[static_cast<std::size_t>(r.idx)];
                    pp.times.push_back(r.time);
                    pp.positions.push_back(x0 + target);
                }
                continue;
            }
            auto& o = parts[static_cast<std::size_t>(other)];
            if (o.cls <= q.cls)
                continue;
            occupant[static_cast<std::size_t>(q.pos)] = other;
            occupant[static_cast<std::size_t>(target)] = r.idx;
            jumps.push_back({r.time, x0 + q.pos, x0 + target, q.cls, true, o.cls});
            o.pos = q.pos;
            q.pos = target;
            if (opts.record_paths)
            {
                auto& pq_path = paths[static_cast<std::size_t>(r.idx)];
                pq_path.times.push_back(r.time);
                pq_path.positions.push_back(x0 + target);
                auto& po_path = paths[static_cast<std::size_t>(other)];
                po_path.times.push_back(r.time);
                po_path.positions.push_back(x0 + o.pos);
            }
        }

        SpaceTimeWindow interior = window;
        interior.t_min = 0.0;
        interior.t_max = horizon;
        EnvTrajectory traj(initial, interior, std::move(jumps));
        traj.particles = std::move(paths);
        traj.has_classes = classed && opts.record_paths;
        return traj;
    }

    std::vector<ClassRegion> asep_assign_classes(double dH, double epsilon)
    {
        if (!(dH > 0.0))
            throw ValidationError("asep_assign_classes: dH must be positive");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw ValidationError("asep_assign_classes: epsilon must lie in (0,1)");
        const double delta = 2.0 * epsilon * dH;
        if (!(delta > 0.0))
            throw ValidationError("asep_assign_classes: degenerate Delta = 0");
        const double inf = std::numeric_limits<double>::infinity();
        return {{-inf, delta, 2}, {delta, 3.0 * delta, 3}, {3.0 * delta, inf, 1}};
    }

    namespace
    {
        // min and max of a particle path over [0, T]
        std::pair<std::int64_t, std::int64_t> range_until(const ParticlePath& p, double T)
        {
            std::int64_t lo = p.positions.front();
            std::int64_t hi = lo;
            for (std::size_t i = 1; i < p.times.size() && p.times[i] <= T; ++i)
            {
                lo = std::min(lo, p.positions[i]);
                hi = std::max(hi, p.positions[i]);
            }
            return {lo, hi};
        }
    } // namespace

    ClassEvents asep_class_events(const EnvTrajectory& traj, double dH, double dV, double s, double Delta)
    {
        if (!traj.has_classes && traj.initial().total() > 0)
            throw UsageError("asep_class_events: trajectory carries no class labels");
        if (!(s >= 0.0 && dV >= 0.0))
            throw ParameterError("asep_class_events: negative time extent");
        if (dV + 2.0 * s > traj.window().t_max)
            throw CoverageError("asep_class_events: trajectory shorter than dV + 2s");
        ClassEvents ev{true, true, true, true};
        for (const auto& p : traj.particles)
        {
            const auto [lo_s, hi_s] = range_until(p, s);
            const auto [lo_l, hi_l] = range_until(p, dV + 2.0 * s);
            switch (p.cls)
            {
            case 1:
                ev.G1 = ev.G1 && static_cast<double>(lo_s) > 2.0 * Delta;
                break;
            case 2:
                ev.G2 = ev.G2 && static_cast<double>(hi_s) < 2.0 * Delta;
                ev.G23 = ev.G23 && static_cast<double>(hi_l) < dH;
                break;
            case 3:
                ev.G3 = ev.G3 && static_cast<double>(lo_s) > 0.0;
                ev.G23 = ev.G23 && static_cast<double>(hi_l) < dH;
                break;
            default:
                break;
            }
        }
        return ev;
    }
} // namespace rwdre
