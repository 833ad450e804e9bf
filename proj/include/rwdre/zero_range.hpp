#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rwdre/environment.hpp"
#include "rwdre/noise_field.hpp"

namespace rwdre
{
    // Rate function g tabulated on 0..k_max, extended past k_max with slope
    // gamma_plus (an approximation of the true g, logged by validate()).
    class RateFunction
    {
    public:
        RateFunction() = default;
        RateFunction(std::vector<double> table, double gamma_plus);

        static RateFunction linear(double slope, int k_max = 64);

        double operator()(std::int64_t k) const;
        std::int64_t k_max() const { return static_cast<std::int64_t>(table_.size()) - 1; }
        const std::vector<double>& table() const { return table_; }

    private:
        std::vector<double> table_{0.0};
        double slope_ = 1.0;
    };

    struct ZrParams
    {
        RateFunction g;
        double gamma_minus = 1.0;
        double gamma_plus = 1.0;
        double rho = 1.0;
        double phi = 1.0; // set by resolve()

        // Checks g(0)=0 and Gamma- <= g(k)-g(k-1) <= Gamma+ on the table,
        // reporting the first offending k.
        void validate_rates() const;
        void validate() const; // rates plus rho > 0
        void resolve(double tol = 1e-12);
    };

    double zr_partition(double phi, const ZrParams& params, double tol = 1e-15);
    double zr_density(double phi, const ZrParams& params, double tol = 1e-15);
    double zr_fugacity(double rho, const ZrParams& params, double tol = 1e-12);

    // pmf of mu_hat_phi, truncated where the remaining tail is < 1e-12
    std::vector<double> zr_pmf(double phi, const ZrParams& params);

    OccupancyConfig zr_sample_initial(const ZrParams& params, std::int64_t x_min, std::int64_t x_max,
                                      std::uint64_t master, std::uint32_t replica);

    std::int64_t zr_default_buffer(const ZrParams& params, double horizon);

    struct ZrEvolveOptions
    {
        std::optional<std::int64_t> buffer;
        std::int64_t min_buffer = 0;
        bool record_firings = false;
    };

    // initial must cover [window.x_min - B, window.x_max + B).
    EnvTrajectory zr_evolve(const OccupancyConfig& initial, double horizon, const SpaceTimeWindow& window,
                            const ZrParams& params, std::uint64_t master, std::uint32_t replica,
                            const ZrEvolveOptions& opts = {});
} // namespace rwdre
