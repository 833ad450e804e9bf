#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rwdre/environment.hpp"

namespace rwdre
{
    // Particles starting in [lo, hi) get class `cls`; 1 is first class.
    struct ClassRegion
    {
        double lo;
        double hi;
        int cls;
    };

    struct AsepParams
    {
        double p = 0.5;   // right-jump probability
        double rho = 0.5; // Bernoulli density
        std::vector<ClassRegion> class_regions;

        void validate() const;
    };

    OccupancyConfig asep_sample_initial(const AsepParams& params, std::int64_t x_min, std::int64_t x_max,
                                        std::uint64_t master, std::uint32_t replica);

    std::int64_t asep_default_buffer(double horizon);

    struct AsepEvolveOptions
    {
        std::optional<std::int64_t> buffer;
        std::int64_t min_buffer = 0;
        bool record_paths = false;
    };

    // Each particle carries two Poisson clocks keyed by its starting site
    // (rates p and 1-p). A ring moves it unless the target holds a particle
    // of class <= its own; a strictly higher-class occupant is swapped.
    EnvTrajectory asep_evolve(const OccupancyConfig& initial, double horizon, const SpaceTimeWindow& window,
                              const AsepParams& params, std::uint64_t master, std::uint32_t replica,
                              const AsepEvolveOptions& opts = {});

    // Delta = 2*epsilon*dH; (-inf, Delta) second class, [Delta, 3Delta) third,
    // [3Delta, inf) first.
    std::vector<ClassRegion> asep_assign_classes(double dH, double epsilon);

    struct ClassEvents
    {
        bool G1;
        bool G2;
        bool G3;
        bool G23;
        bool all() const { return G1 && G2 && G3 && G23; }
    };

    ClassEvents asep_class_events(const EnvTrajectory& traj, double dH, double dV, double s, double Delta);
} // namespace rwdre
