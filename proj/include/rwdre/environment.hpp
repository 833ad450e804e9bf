#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/noise_field.hpp"

namespace rwdre
{
    // Read-only view of eta_t(x) as seen by a walker.
    class Environment
    {
    public:
        virtual ~Environment() = default;

        // eta_{t-}(x): occupation just before time t.
        virtual int occupation_before(std::int64_t x, double t) const = 0;
    };

    class ConstantEnvironment final : public Environment
    {
    public:
        explicit ConstantEnvironment(int state = 0) : state_(state) {}
        int occupation_before(std::int64_t, double) const override { return state_; }

    private:
        int state_;
    };

    struct OccupancyConfig
    {
        std::int64_t x_min = 0; // site of values[0]
        std::vector<int> values;

        std::int64_t x_max() const { return x_min + static_cast<std::int64_t>(values.size()); }
        int at(std::int64_t x) const;
        std::int64_t total() const;
    };

    struct JumpRecord
    {
        double time;
        std::int64_t from;
        std::int64_t to;
        int cls;     // class of the moving particle, 0 when unused
        bool swap;   // exchanged places with a higher-class particle
        int other_cls;
    };

    struct SiteChange
    {
        double time;
        std::int64_t site;
        int old_occ;
        int new_occ;
        int cls;
    };

    struct Firing
    {
        double time;
        std::int64_t site;
        int occ;
        double rate;
    };

    struct ParticlePath
    {
        std::int64_t label; // starting site
        int cls;
        std::vector<double> times; // times[0] = 0
        std::vector<std::int64_t> positions;

        std::int64_t position_at(double t) const;
    };

    // Piecewise-constant occupation record over a simulated domain. Queries
    // are only answered inside the interior window; the buffer sites around
    // it exist to shield the interior from the truncation.
    class EnvTrajectory final : public Environment
    {
    public:
        EnvTrajectory(OccupancyConfig initial, SpaceTimeWindow interior, std::vector<JumpRecord> jumps);

        int occupation_before(std::int64_t x, double t) const override;
        int occupation_at(std::int64_t x, double t) const; // after changes at t
        OccupancyConfig occupancy_at(double t) const;     // whole domain

        const SpaceTimeWindow& window() const { return interior_; }
        std::int64_t domain_min() const { return initial_.x_min; }
        std::int64_t domain_max() const { return initial_.x_max(); }
        std::int64_t buffer_width() const;
        const OccupancyConfig& initial() const { return initial_; }
        const std::vector<JumpRecord>& jumps() const { return jumps_; }
        std::vector<SiteChange> site_changes() const;

        // Particles in [x_lo, x_hi) at time t and net flux into that range
        // over (t0, t1]. count(t1) - count(t0) == net_inflow always.
        std::int64_t count_in(std::int64_t x_lo, std::int64_t x_hi, double t) const;
        std::int64_t net_inflow(std::int64_t x_lo, std::int64_t x_hi, double t0, double t1) const;
        std::int64_t jumps_in(std::int64_t x_lo, std::int64_t x_hi, double t0, double t1) const;

        std::vector<Firing> firings;
        std::vector<ParticlePath> particles; // filled when paths were requested
        bool has_classes = false;

    private:
        void check_query(std::int64_t x, double t) const;

        OccupancyConfig initial_;
        SpaceTimeWindow interior_;
        std::vector<JumpRecord> jumps_;
        // per-site change history, CSR layout
        std::vector<std::size_t> offsets_;
        std::vector<double> change_times_;
        std::vector<int> change_values_;
    };

    // Fixed-width CSV export: time,site,old_occ,new_occ,class
    std::string trajectory_csv(const EnvTrajectory& traj, bool with_class);
} // namespace rwdre
