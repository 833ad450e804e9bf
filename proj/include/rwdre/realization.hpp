#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/environment.hpp"
#include "rwdre/exclusion.hpp"
#include "rwdre/noise_field.hpp"
#include "rwdre/walker.hpp"
#include "rwdre/zero_range.hpp"

namespace rwdre
{
    enum class EnvKind
    {
        constant,
        zeroRange,
        asep,
    };

    std::string to_string(EnvKind k);

    struct EnvSpec
    {
        EnvKind kind = EnvKind::constant;
        int constant_state = 0;
        ZrParams zr;
        AsepParams asep;
        std::optional<std::int64_t> buffer; // sites on each side of the interior
        bool record_paths = false;

        // Validates parameters and resolves the ZRP fugacity.
        void prepare();
        std::int64_t buffer_for(double horizon) const;
    };

    // Environment over [x_lo, x_hi) x [0, horizon] (plus buffer), replica-keyed.
    std::shared_ptr<const Environment> make_environment(const EnvSpec& spec, std::uint64_t master,
                                                        std::uint32_t replica, std::int64_t x_lo,
                                                        std::int64_t x_hi, double horizon);

    struct WalkRequest
    {
        StartPoint start;
        double horizon;
    };

    // One replica: noise field, environment and rate model, with the
    // environment window sized to contain every requested walk for sure
    // (see walk_envelope).
    class Realization
    {
    public:
        Realization(std::uint64_t master, std::uint32_t replica, const EnvSpec& spec, const RateModel& rates,
                    const std::vector<WalkRequest>& requests);
        Realization(NoiseField noise, std::shared_ptr<const Environment> env, const RateModel& rates);

        WalkPath walk(StartPoint y, double horizon);
        std::vector<WalkPath> family(const std::vector<StartPoint>& ys, double horizon);

        NoiseField& noise() { return noise_; }
        const Environment& env() const { return *env_; }
        const EnvTrajectory* trajectory() const { return dynamic_cast<const EnvTrajectory*>(env_.get()); }
        const RateModel& rates() const { return rates_; }
        std::int64_t cover_lo() const { return cover_lo_; }
        std::int64_t cover_hi() const { return cover_hi_; }

    private:
        NoiseField noise_;
        std::shared_ptr<const Environment> env_;
        RateModel rates_;
        std::int64_t cover_lo_ = 0;
        std::int64_t cover_hi_ = 0;
    };
} // namespace rwdre
