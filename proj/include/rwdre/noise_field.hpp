#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rwdre/rng.hpp"

namespace rwdre
{
    enum class StreamKind : std::uint8_t
    {
        walkMark = 0,
        envClockRight = 1,
        envClockLeft = 2,
        envClockSite = 3,
        initialLaw = 4,
    };

    struct StreamId
    {
        std::int64_t site = 0;
        StreamKind kind = StreamKind::walkMark;
        std::uint32_t replica = 0;
    };

    inline constexpr std::int64_t kMinSite = INT32_MIN;
    inline constexpr std::int64_t kMaxSite = INT32_MAX;
    inline constexpr std::uint32_t kMaxReplica = (1u << 29) - 1;

    // Key layout: bits 0..31 site (two's complement), 32..34 kind, 35..63
    // replica. The packed word is xored with splitmix64(master) and mixed
    // once more, so for a fixed master the map id -> key is injective.
    std::uint64_t stream_key(std::uint64_t master, const StreamId& id);

    Xoshiro256 derive_stream(std::uint64_t master, const StreamId& id);

    // Arrival times of a homogeneous Poisson process on (t0, t1].
    std::vector<double> poisson_times(Xoshiro256 stream, double rate, double t0, double t1);

    struct SpaceTimeWindow
    {
        std::int64_t x_min = 0; // inclusive
        std::int64_t x_max = 0; // exclusive
        double t_min = 0.0;     // inclusive
        double t_max = 0.0;     // exclusive
    };

    void validate_window(const SpaceTimeWindow& w);

    struct Mark
    {
        double time;
        double u;
    };

    struct MarkedPoint
    {
        std::int64_t site;
        double time;
        double mark;

        friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
    };

    // The marked Poisson field on Z x R+ x [0, Lambda]. Each site's points are
    // drawn from its own walkMark substream, starting at t = 0: exponential
    // gap, then the mark, repeated. Sites are materialized lazily on first
    // query, so the field behaves as an unbounded object.
    //
    // Not thread-safe (the lazy cache mutates); use one field per replica.
    class NoiseField
    {
    public:
        using Generator = std::function<std::vector<Mark>(std::int64_t site)>;

        NoiseField(std::uint64_t master, std::uint32_t replica, double Lambda);

        // Fixture constructor: gen(site) returns every point of that site,
        // sorted by time. No further points exist.
        static NoiseField from_generator(double Lambda, Generator gen);
        static NoiseField from_points(double Lambda, const std::vector<MarkedPoint>& points);
        static NoiseField empty(double Lambda);

        double Lambda() const { return Lambda_; }

        // First point at `site` with time strictly greater than t.
        std::optional<Mark> next_mark(std::int64_t site, double t);

        // All points at `site` with t_min <= time < t_max.
        std::vector<Mark> marks_in(std::int64_t site, double t_min, double t_max);

        // Number of points at `site` with t_min < time <= t_max.
        std::int64_t count_in(std::int64_t site, double t_min, double t_max);

    private:
        struct SiteMarks
        {
            bool init = false;
            bool finite = false;
            Xoshiro256 rng{0};
            double clock = 0.0;
            std::vector<Mark> marks;
        };

        NoiseField(double Lambda, Generator gen);
        SiteMarks& site_marks(std::int64_t site);
        void extend_past(SiteMarks& s, double t);

        std::uint64_t master_ = 0;
        std::uint32_t replica_ = 0;
        double Lambda_ = 1.0;
        Generator gen_;
        std::int64_t base_ = 0;
        std::vector<SiteMarks> sites_;
    };

    std::vector<MarkedPoint> marked_points_in(std::uint64_t master, std::uint32_t replica,
                                              const SpaceTimeWindow& window, double Lambda);
    std::vector<MarkedPoint> marked_points_in(NoiseField& noise, const SpaceTimeWindow& window);
} // namespace rwdre
