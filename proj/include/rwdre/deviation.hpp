#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwdre/curves.hpp"

namespace rwdre
{
    // e^{2 lambda - u}
    double poisson_chernoff(double lambda, double u);

    // P(N >= u) for N ~ Poisson(lambda), summed from ceil(u).
    double exact_poisson_tail(double lambda, double u);

    struct DriftCheck
    {
        double margin = 0.0;     // min over probes of alpha - beta
        int argmin = 0;
        bool non_nestling = false; // margin > v_circ
    };

    // Occupations 0..table_size (the last one lies in the extension regime).
    std::vector<int> default_probes(const RateModel& rates);

    // Throws ValidationError if declared_drift_inf exceeds the probed minimum.
    DriftCheck drift_margin(const RateModel& rates, const std::vector<int>& probes, double v_circ = 0.0);

    enum class FitStatus
    {
        ok,
        inconclusive,
    };

    struct DeviationFit
    {
        std::vector<double> t_grid;
        std::vector<Estimate> p_hats; // P(M_t <= -eps t), M_t = X_t - t u
        double epsilon = 0.0;
        double u_drift = 0.0;
        double slope_estimate = 0.0; // of log(-log p) against log t
        std::size_t fit_points = 0;
        bool monotone = false;        // non-increasing up to 3 SE
        bool strictly_decreasing = false;
        FitStatus status = FitStatus::inconclusive;
    };

    DeviationFit submartingale_deviation_fit(const Experiment& ex, double u_drift, double epsilon,
                                             const std::vector<double>& t_grid, std::uint64_t n);

    struct IncrementBin
    {
        double lo;
        double hi;
        std::size_t n;
        double mean;
        double se;
        bool ok; // mean >= -3 se
    };

    // Mean of M_{t+s} - M_t within quantile bins of M_t.
    std::vector<IncrementBin> submartingale_increment_check(const Experiment& ex, double u_drift, double t, double s,
                                                            int bins, std::uint64_t n);

    std::string deviation_csv(const DeviationFit& f);
} // namespace rwdre
