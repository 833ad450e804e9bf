#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/environment.hpp"
#include "rwdre/noise_field.hpp"

namespace rwdre
{
    // alpha/beta tabulated by occupation; the last entry applies to every
    // larger occupation.
    struct RateModel
    {
        std::vector<double> alpha{0.0};
        std::vector<double> beta{0.0};
        double Lambda = 1.0;
        std::optional<double> declared_drift_inf;

        static RateModel constant(double a, double b, double Lambda);

        double lambda() const { return 2.0 * Lambda; }
        double a(int occ) const { return alpha[std::min<std::size_t>(static_cast<std::size_t>(occ), alpha.size() - 1)]; }
        double b(int occ) const { return beta[std::min<std::size_t>(static_cast<std::size_t>(occ), beta.size() - 1)]; }
        std::size_t table_size() const { return std::max(alpha.size(), beta.size()); }

        double alpha_min() const;
        double alpha_max() const;

        // Throws ValidationError naming the first occupation with alpha+beta > Lambda.
        void validate() const;
    };

    struct StartPoint
    {
        std::int64_t x0 = 0;
        double t0 = 0.0;

        friend bool operator==(const StartPoint&, const StartPoint&) = default;
    };

    struct Jump
    {
        double time; // relative to the start time
        int sign;

        friend bool operator==(const Jump&, const Jump&) = default;
    };

    struct WalkPath
    {
        StartPoint start;
        std::vector<Jump> jumps;
        double horizon = 0.0;

        std::int64_t position_at(double s) const; // after all jumps <= s
        std::int64_t final_position() const;
        std::int64_t displacement(double s) const { return position_at(s) - start.x0; }
        // max_{u <= s} |X_u - x0|
        std::int64_t max_excursion(double s) const;
        std::int64_t min_position(double s) const;
        std::int64_t max_position(double s) const;
    };

    struct ThinnedPoints
    {
        std::vector<MarkedPoint> alpha;
        std::vector<MarkedPoint> beta;
    };

    // Split the points of the noise in `window` by mark against
    // alpha(eta_{t-}(x)) and alpha+beta.
    ThinnedPoints thin_rates(NoiseField& noise, const Environment& env, const RateModel& rates,
                             const SpaceTimeWindow& window);

    WalkPath run_walk(StartPoint y, double horizon, const Environment& env, NoiseField& noise,
                      const RateModel& rates);

    // Walks sharing one noise and environment realization. Walks with equal
    // start times are built in increasing start order; once a walk meets its
    // left neighbour it follows the neighbour's path (coalescence).
    std::vector<WalkPath> run_family(const std::vector<StartPoint>& ys, double horizon, const Environment& env,
                                     NoiseField& noise, const RateModel& rates);

    // N^y_t = Z^+_t - Z^-_t from the (Lambda,0) and (0,Lambda) walks.
    std::int64_t dominating_count(StartPoint y, double t, NoiseField& noise);

    // Paths of the constant-rate walks (alpha_min, Lambda - alpha_min) and
    // (alpha_max, 0). Any walk with the same start under `rates` stays
    // between them, whatever the environment.
    struct Envelope
    {
        std::int64_t lo;
        std::int64_t hi;
    };
    Envelope walk_envelope(StartPoint lowest, StartPoint highest, double horizon, NoiseField& noise,
                           const RateModel& rates);

    std::string path_csv(const WalkPath& path);
} // namespace rwdre
