#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/decoupling.hpp"
#include "rwdre/realization.hpp"
#include "rwdre/stats.hpp"

namespace rwdre
{
    struct Experiment
    {
        EnvSpec env;
        RateModel rates;
        std::uint64_t seed = 0;
        // number of partitions the samples are split into; results do not
        // depend on it
        unsigned partitions = 1;
        std::uint32_t replica_offset = 0;
    };

    // Success count over trials; merging is a plain sum.
    struct Tally
    {
        std::uint64_t successes = 0;
        std::uint64_t trials = 0;

        Tally& operator+=(const Tally& o)
        {
            successes += o.successes;
            trials += o.trials;
            return *this;
        }
        friend bool operator==(const Tally&, const Tally&) = default;
    };

    // Folds flags[i] over the given number of contiguous partitions.
    Tally fold_tally(const std::vector<std::uint8_t>& flags, unsigned partitions);

    struct PhRow
    {
        double H;
        double v;
        Estimate p;       // P(A_{H,0}(v))
        Estimate p_tilde; // P(Atilde_{H,0}(v))
    };

    // One box scan at w = (0,0) per replica, evaluated at every v.
    std::vector<PhRow> estimate_ph(const Experiment& ex, double H, const std::vector<double>& v_grid,
                                   std::uint64_t n);

    struct BracketRow
    {
        double H;
        std::optional<double> v_minus_hat;
        std::optional<double> v_plus_hat;
        bool conclusive = false;
    };

    struct SpeedBracket
    {
        std::vector<BracketRow> rows; // one per H
        std::vector<PhRow> curves;
        std::optional<double> v_minus_hat; // at the largest H
        std::optional<double> v_plus_hat;
        bool conclusive = false;
        double threshold = 0.5;
    };

    // v_plus_hat: smallest grid v with ci_high(p_H(v)) < 0.5; v_minus_hat:
    // largest grid v with ci_high(p~_H(v)) < 0.5.
    SpeedBracket estimate_speed_bracket(const Experiment& ex, const std::vector<double>& H_list,
                                        const std::vector<double>& v_grid, std::uint64_t n);

    std::vector<double> make_grid(double lo, double hi, double step);

    struct BallisticityParams
    {
        double v_star = 1.0;
        double kappa_star = 0.1;
        double C_star = 1.0;
        double gamma_star = 1.5;

        void validate() const;
        // C e^{-kappa (log+ t)^gamma}
        double bound(double t) const;
    };

    struct DecayParams
    {
        double kappa;
        double gamma;
    };

    DecayParams derived_decay_params(const DecouplingParams& circ, const BallisticityParams& star);

    struct BallisticityRow
    {
        double t;
        Estimate p;
        double bound;
    };

    std::vector<BallisticityRow> ballisticity_curve(const Experiment& ex, const BallisticityParams& b,
                                                    const std::vector<double>& t_grid, std::uint64_t n);

    struct LlnRow
    {
        double t;
        double mean_speed;
        double sd;
        double se;
        double dev_prob; // P(|X_t/t - v_hat| >= eps)
    };

    struct LlnCurve
    {
        std::vector<LlnRow> rows;
        double v_hat = 0.0;
        double epsilon = 0.0;
    };

    LlnCurve lln_curve(const Experiment& ex, const std::vector<double>& t_grid, double epsilon, std::uint64_t n);

    // X_t for t in the grid on one walk from the origin per replica; rows are
    // replicas in order.
    std::vector<std::vector<std::int64_t>> sample_positions(const Experiment& ex, const std::vector<double>& t_grid,
                                                            std::uint64_t n);

    void check_time_grid(const std::vector<double>& t_grid, bool allow_zero);

    std::string ph_csv(const std::vector<PhRow>& rows);
    std::string ballisticity_csv(const std::vector<BallisticityRow>& rows);
    std::string lln_csv(const LlnCurve& c);
    std::string decoupling_csv(const std::vector<DecouplingResult>& rows);
} // namespace rwdre
