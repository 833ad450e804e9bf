#include "rwdre/noise_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "rwdre/error.hpp"

namespace rwdre
{
    std::uint64_t stream_key(std::uint64_t master, const StreamId& id)
    {
        if (id.site < kMinSite || id.site > kMaxSite)
            throw ParameterError("stream site out of 32-bit range: " + std::to_string(id.site));
        if (id.replica > kMaxReplica)
            throw ParameterError("replica index exceeds 2^29-1: " + std::to_string(id.replica));
        const auto site_bits = static_cast<std::uint64_t>(static_cast<std::uint32_t>(id.site));
        const auto kind_bits = static_cast<std::uint64_t>(id.kind) & 0x7u;
        const std::uint64_t packed = site_bits | (kind_bits << 32) | (static_cast<std::uint64_t>(id.replica) << 35);
        return splitmix64(packed ^ splitmix64(master));
    }

    Xoshiro256 derive_stream(std::uint64_t master, const StreamId& id)
    {
        return Xoshiro256(stream_key(master, id));
    }

    std::vector<double> poisson_times(Xoshiro256 stream, double rate, double t0, double t1)
    {
        if (!(rate >= 0.0))
            throw ParameterError("poisson_times: negative rate");
        if (t0 > t1)
            throw ParameterError("poisson_times: t0 > t1");
        std::vector<double> out;
        if (rate == 0.0)
            return out;
        double t = t0;
        for (;;)
        {
            const double next = t + exponential(stream, rate);
            if (next > t1)
                break;
            if (next <= t)
                continue;
            out.push_back(next);
            t = next;
        }
        return out;
    }

    void validate_window(const SpaceTimeWindow& w)
    {
        if (w.x_min >= w.x_max)
            throw ParameterError("window: x_min must be < x_max");
        if (!(w.t_min >= 0.0 && w.t_min < w.t_max))
            throw ParameterError("window: need 0 <= t_min < t_max");
    }

    NoiseField::NoiseField(std::uint64_t master, std::uint32_t replica, double Lambda)
        : master_(master), replica_(replica), Lambda_(Lambda)
    {
        if (!(Lambda >= 1.0))
            throw ParameterError("noise field: Lambda must be >= 1");
        if (replica > kMaxReplica)
            throw ParameterError("replica index exceeds 2^29-1");
    }

    NoiseField::NoiseField(double Lambda, Generator gen) : Lambda_(Lambda), gen_(std::move(gen))
    {
        if (!(Lambda >= 1.0))
            throw ParameterError("noise field: Lambda must be >= 1");
    }

    NoiseField NoiseField::from_generator(double Lambda, Generator gen)
    {
        return NoiseField(Lambda, std::move(gen));
    }

    NoiseField NoiseField::from_points(double Lambda, const std::vector<MarkedPoint>& points)
    {
        std::map<std::int64_t, std::vector<Mark>> by_site;
        for (const auto& p : points)
        {
            if (!(p.time > 0.0) || p.mark < 0.0 || p.mark > Lambda)
                throw ParameterError("from_points: point outside (0,inf) x [0,Lambda]");
            by_site[p.site].push_back({p.time, p.mark});
        }
        for (auto& [site, marks] : by_site)
        {
            std::sort(marks.begin(), marks.end(), [](const Mark& a, const Mark& b) { return a.time < b.time; });
            for (std::size_t i = 1; i < marks.size(); ++i)
                if (marks[i].time == marks[i - 1].time)
                    throw ParameterError("from_points: duplicate time at site " + std::to_string(site));
        }
        return NoiseField(Lambda, [by_site = std::move(by_site)](std::int64_t site) {
            auto it = by_site.find(site);
            return it == by_site.end() ? std::vector<Mark>{} : it->second;
        });
    }

    NoiseField NoiseField::empty(double Lambda)
    {
        return NoiseField(Lambda, [](std::int64_t) { return std::vector<Mark>{}; });
    }

    NoiseField::SiteMarks& NoiseField::site_marks(std::int64_t site)
    {
        if (sites_.empty())
        {
            base_ = site;
            sites_.resize(1);
        }
        else if (site < base_)
        {
            const auto grow = static_cast<std::size_t>(base_ - site);
            const std::size_t extra = std::max(grow, sites_.size() / 2);
            std::vector<SiteMarks> fresh(extra + sites_.size());
            std::move(sites_.begin(), sites_.end(), fresh.begin() + static_cast<std::ptrdiff_t>(extra));
            sites_.swap(fresh);
            base_ -= static_cast<std::int64_t>(extra);
        }
        else if (site - base_ >= static_cast<std::int64_t>(sites_.size()))
        {
            const auto need = static_cast<std::size_t>(site - base_) + 1;
            sites_.resize(std::max(need, sites_.size() + sites_.size() / 2));
        }
        SiteMarks& s = sites_[static_cast<std::size_t>(site - base_)];
        if (!s.init)
        {
            s.init = true;
            if (gen_)
            {
                s.finite = true;
                s.marks = gen_(site);
            }
            else
            {
                s.rng = derive_stream(master_, {site, StreamKind::walkMark, replica_});
            }
        }
        return s;
    }

    void NoiseField::extend_past(SiteMarks& s, double t)
    {
        if (s.finite)
            return;
        while (s.clock <= t)
        {
            const double next = s.clock + exponential(s.rng, Lambda_);
            const double u = uniform01(s.rng) * Lambda_;
            if (next <= s.clock)
                throw NumericalError("noise field: coincident arrival times");
            s.clock = next;
            s.marks.push_back({next, u});
        }
    }

    std::optional<Mark> NoiseField::next_mark(std::int64_t site, double t)
    {
        SiteMarks& s = site_marks(site);
        extend_past(s, t);
        auto it = std::upper_bound(s.marks.begin(), s.marks.end(), t,
                                   [](double v, const Mark& m) { return v < m.time; });
        if (it == s.marks.end())
            return std::nullopt;
        return *it;
    }

    std::vector<Mark> NoiseField::marks_in(std::int64_t site, double t_min, double t_max)
    {
        SiteMarks& s = site_marks(site);
        extend_past(s, t_max);
        auto lo = std::lower_bound(s.marks.begin(), s.marks.end(), t_min,
                                   [](const Mark& m, double v) { return m.time < v; });
        auto hi = std::lower_bound(lo, s.marks.end(), t_max,
                                   [](const Mark& m, double v) { return m.time < v; });
        return {lo, hi};
    }

    std::int64_t NoiseField::count_in(std::int64_t site, double t_min, double t_max)
    {
        SiteMarks& s = site_marks(site);
        extend_past(s, t_max);
        auto cmp = [](double v, const Mark& m) { return v < m.time; };
        auto lo = std::upper_bound(s.marks.begin(), s.marks.end(), t_min, cmp);
        auto hi = std::upper_bound(s.marks.begin(), s.marks.end(), t_max, cmp);
        return hi > lo ? hi - lo : 0;
    }

    std::vector<MarkedPoint> marked_points_in(NoiseField& noise, const SpaceTimeWindow& window)
    {
        std::vector<MarkedPoint> out;
        if (window.x_min >= window.x_max || window.t_min >= window.t_max)
            return out;
        for (std::int64_t x = window.x_min; x < window.x_max; ++x)
            for (const auto& m : noise.marks_in(x, window.t_min, window.t_max))
                out.push_back({x, m.time, m.u});
        return out;
    }

    std::vector<MarkedPoint> marked_points_in(std::uint64_t master, std::uint32_t replica,
                                              const SpaceTimeWindow& window, double Lambda)
    {
        NoiseField noise(master, replica, Lambda);
        return marked_points_in(noise, window);
    }
} // namespace rwdre
