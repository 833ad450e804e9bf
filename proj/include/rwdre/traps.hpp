#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/realization.hpp"

namespace rwdre
{
    struct TrapParams
    {
        double K = 1.0;
        int r = 1;
        double theta = 0.1;
        double v_minus = 0.0;
        double v_plus = 1.0;

        // theta = (v_plus - v_minus) / 6
        static TrapParams derived(double K, int r, double v_minus, double v_plus);
        void validate() const;
    };

    // Integer offsets in the closed interval w + [theta K, 2 theta K].
    std::vector<StartPoint> trap_starts(double wx, double wt, double K, double theta);

    struct TrapCheck
    {
        bool trapped = false;
        bool empty_interval = false; // no lattice point to scan; reported as not trapped
        std::optional<StartPoint> witness;
    };

    // Some y in (w + [theta K, 2 theta K] x {0}) with X^y_K - x(y) <= (v_minus + theta) K.
    TrapCheck is_trapped(double wx, double wt, double K, double theta, double v_minus, Realization& R);

    struct ThreatCheck
    {
        bool threatened = false;
        std::optional<int> j; // first trapped anchor
        std::optional<StartPoint> witness;
        bool empty_interval = false;
    };

    // Anchors w + j K (v_plus, 1), j = 0..r-1.
    ThreatCheck is_threatened(double wx, double wt, const TrapParams& p, Realization& R);

    enum class Dichotomy
    {
        speedup,
        delay,
        notThreatened,
    };

    std::string to_string(Dichotomy d);

    struct DichotomyResult
    {
        Dichotomy kind = Dichotomy::notThreatened;
        ThreatCheck threat;
        bool speedup = false;
        bool delay = false;
        std::optional<int> speedup_j;
        std::int64_t displacement = 0; // X_{rK} - x0
    };

    // Requires theta <= (v_plus - v_minus)/4, under which a threatened start
    // always shows a speedup or a delay. Throws InvariantViolation otherwise.
    DichotomyResult verify_threat_dichotomy(StartPoint y, const TrapParams& p, Realization& R);

    std::vector<WalkRequest> threat_requests(StartPoint y, const TrapParams& p);
} // namespace rwdre
