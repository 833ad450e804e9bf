#pragma once

#include <cstdint>
#include <vector>

namespace rwdre
{
    struct Estimate
    {
        double p_hat = 0.0;
        double ci_low = 0.0;
        double ci_high = 1.0;
        std::uint64_t n = 0;
        std::uint64_t seed = 0;
    };

    // Wilson score interval, 95% (z = 1.959964).
    Estimate wilson(std::uint64_t successes, std::uint64_t n, std::uint64_t seed = 0);

    struct Moments
    {
        double mean = 0.0;
        double sd = 0.0; // sample standard deviation (n-1)
        double se = 0.0; // sd / sqrt(n)
        std::size_t n = 0;
    };

    Moments moments(const std::vector<double>& xs);

    struct GofResult
    {
        double statistic = 0.0;
        int dof = 0;
        double p_value = 1.0;
    };

    // Pearson chi-square of observed counts against expected probabilities.
    // Adjacent cells are pooled (from the tail inward) until every expected
    // count is at least min_expected.
    GofResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs,
                             double min_expected = 5.0);

    // Chi-square test of homogeneity between two samples of integers.
    GofResult chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                    double min_expected = 5.0);

    double chi_square_sf(double statistic, int dof);

    struct GapEstimate
    {
        double gap = 0.0;
        double stderr_ = 0.0;
    };

    // E[f1 f2] - E[f1] E[f2] with leave-one-out jackknife standard error.
    GapEstimate covariance_jackknife(const std::vector<double>& f1, const std::vector<double>& f2);

    // Least-squares slope of y on x.
    double ols_slope(const std::vector<double>& x, const std::vector<double>& y);
} // namespace rwdre
