#include "rwdre/environment.hpp"

#include <algorithm>
#include <numeric>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    int OccupancyConfig::at(std::int64_t x) const
    {
        if (x < x_min || x >= x_max())
            throw CoverageError("occupancy: site " + std::to_string(x) + " outside configuration");
        return values[static_cast<std::size_t>(x - x_min)];
    }

    std::int64_t OccupancyConfig::total() const
    {
        return std::accumulate(values.begin(), values.end(), std::int64_t{0});
    }

    std::int64_t ParticlePath::position_at(double t) const
    {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin())
            return positions.front();
        return positions[static_cast<std::size_t>(it - times.begin()) - 1];
    }

    EnvTrajectory::EnvTrajectory(OccupancyConfig initial, SpaceTimeWindow interior, std::vector<JumpRecord> jumps)
        : initial_(std::move(initial)), interior_(interior), jumps_(std::move(jumps))
    {
        if (initial_.values.empty())
            throw ParameterError("trajectory: empty domain");
        if (interior_.x_min < initial_.x_min || interior_.x_max > initial_.x_max())
            throw ParameterError("trajectory: interior window exceeds simulated domain");
        for (std::size_t i = 1; i < jumps_.size(); ++i)
            if (jumps_[i].time < jumps_[i - 1].time)
                throw InvariantViolation("trajectory: jump records out of time order");

        const std::size_t n = initial_.values.size();
        std::vector<std::size_t> counts(n + 1, 0);
        for (const auto& j : jumps_)
        {
            if (j.swap)
                continue;
            ++counts[static_cast<std::size_t>(j.from - initial_.x_min) + 1];
            ++counts[static_cast<std::size_t>(j.to - initial_.x_min) + 1];
        }
        std::partial_sum(counts.begin(), counts.end(), counts.begin());
        offsets_ = counts;
        change_times_.resize(offsets_.back());
        change_values_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        std::vector<int> occ = initial_.values;
        for (const auto& j : jumps_)
        {
            if (j.swap)
                continue;
            const auto a = static_cast<std::size_t>(j.from - initial_.x_min);
            const auto b = static_cast<std::size_t>(j.to - initial_.x_min);
            if (--occ[a] < 0)
                throw InvariantViolation("trajectory: negative occupation at site " + std::to_string(j.from));
            ++occ[b];
            change_times_[fill[a]] = j.time;
            change_values_[fill[a]++] = occ[a];
            change_times_[fill[b]] = j.time;
            change_values_[fill[b]++] = occ[b];
        }
    }

    std::int64_t EnvTrajectory::buffer_width() const
    {
        return std::min(interior_.x_min - initial_.x_min, initial_.x_max() - interior_.x_max);
    }

    void EnvTrajectory::check_query(std::int64_t x, double t) const
    {
        if (x < interior_.x_min || x >= interior_.x_max || t < interior_.t_min || t > interior_.t_max)
            throw CoverageError("trajectory query (" + std::to_string(x) + ", " + format_double(t) +
                                ") outside window [" + std::to_string(interior_.x_min) + "," +
                                std::to_string(interior_.x_max) + ")x[" + format_double(interior_.t_min) + "," +
                                format_double(interior_.t_max) + "]");
    }

    int EnvTrajectory::occupation_before(std::int64_t x, double t) const
    {
        check_query(x, t);
        const auto i = static_cast<std::size_t>(x - initial_.x_min);
        const auto b = change_times_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        const auto e = change_times_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        auto it = std::lower_bound(b, e, t);
        if (it == b)
            return initial_.values[i];
        return change_values_[static_cast<std::size_t>(it - change_times_.begin()) - 1];
    }

    int EnvTrajectory::occupation_at(std::int64_t x, double t) const
    {
        check_query(x, t);
        const auto i = static_cast<std::size_t>(x - initial_.x_min);
        const auto b = change_times_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        const auto e = change_times_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        auto it = std::upper_bound(b, e, t);
        if (it == b)
            return initial_.values[i];
        return change_values_[static_cast<std::size_t>(it - change_times_.begin()) - 1];
    }

    OccupancyConfig EnvTrajectory::occupancy_at(double t) const
    {
        OccupancyConfig out = initial_;
        for (const auto& j : jumps_)
        {
            if (j.time > t)
                break;
            if (j.swap)
                continue;
            --out.values[static_cast<std::size_t>(j.from - out.x_min)];
            ++out.values[static_cast<std::size_t>(j.to - out.x_min)];
        }
        return out;
    }

    std::vector<SiteChange> EnvTrajectory::site_changes() const
    {
        std::vector<SiteChange> out;
        out.reserve(2 * jumps_.size());
        std::vector<int> occ = initial_.values;
        for (const auto& j : jumps_)
        {
            const auto a = static_cast<std::size_t>(j.from - initial_.x_min);
            const auto b = static_cast<std::size_t>(j.to - initial_.x_min);
            if (j.swap)
            {
                out.push_back({j.time, j.from, occ[a], occ[a], j.other_cls});
                out.push_back({j.time, j.to, occ[b], occ[b], j.cls});
                continue;
            }
            out.push_back({j.time, j.from, occ[a], occ[a] - 1, j.cls});
            out.push_back({j.time, j.to, occ[b], occ[b] + 1, j.cls});
            --occ[a];
            ++occ[b];
        }
        return out;
    }

    std::int64_t EnvTrajectory::count_in(std::int64_t x_lo, std::int64_t x_hi, double t) const
    {
        const OccupancyConfig c = occupancy_at(t);
        std::int64_t n = 0;
        for (std::int64_t x = std::max(x_lo, c.x_min); x < std::min(x_hi, c.x_max()); ++x)
            n += c.values[static_cast<std::size_t>(x - c.x_min)];
        return n;
    }

    std::int64_t EnvTrajectory::net_inflow(std::int64_t x_lo, std::int64_t x_hi, double t0, double t1) const
    {
        std::int64_t net = 0;
        for (const auto& j : jumps_)
        {
            if (j.time <= t0 || j.swap)
                continue;
            if (j.time > t1)
                break;
            const bool in_from = j.from >= x_lo && j.from < x_hi;
            const bool in_to = j.to >= x_lo && j.to < x_hi;
            net += static_cast<int>(in_to) - static_cast<int>(in_from);
        }
        return net;
    }

    std::int64_t EnvTrajectory::jumps_in(std::int64_t x_lo, std::int64_t x_hi, double t0, double t1) const
    {
        std::int64_t n = 0;
        for (const auto& j : jumps_)
        {
            if (j.time <= t0 || j.swap)
                continue;
            if (j.time > t1)
                break;
            if (j.from >= x_lo && j.from < x_hi)
                ++n;
        }
        return n;
    }

    std::string trajectory_csv(const EnvTrajectory& traj, bool with_class)
    {
        CsvWriter w({"time", "site", "old_occ", "new_occ", "class"});
        for (const auto& c : traj.site_changes())
        {
            w.cell(c.time).cell(c.site).cell(c.old_occ).cell(c.new_occ);
            if (with_class && c.cls > 0)
                w.cell(c.cls);
            else
                w.empty();
            w.end_row();
        }
        return w.str();
    }
} // namespace rwdre
