#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwdre/decoupling.hpp"
#include "rwdre/realization.hpp"
#include "rwdre/scales.hpp"

namespace rwdre
{
    // Displacements are integers and thresholds v*H are reals; comparisons
    // allow this much slack so exact ties count as attained.
    inline constexpr double kTieEps = 1e-9;

    inline bool at_least(std::int64_t disp, double target) { return static_cast<double>(disp) >= target - kTieEps; }
    inline bool at_most(std::int64_t disp, double target) { return static_cast<double>(disp) <= target + kTieEps; }

    // Integer starts in [x, x + width) at time t.
    std::vector<StartPoint> interval_starts(double x, double t, double width);

    struct BoxScan
    {
        double H = 0.0;
        std::vector<StartPoint> starts;
        std::vector<std::int64_t> displacement; // X_H - x0 per start
        std::int64_t max_disp = 0;
        std::int64_t min_disp = 0;

        bool A(double v) const { return !starts.empty() && at_least(max_disp, v * H); }
        bool Atilde(double v) const { return !starts.empty() && at_most(min_disp, v * H); }
    };

    // Walks from I_H(w) = w + [0, lambda H) x {0} for time H.
    BoxScan scan_box(double H, double wx, double wt, Realization& R);
    std::vector<WalkRequest> box_requests(double H, double wx, double wt, double lambda);

    bool event_A(double H, double wx, double wt, double v, Realization& R);
    bool event_Atilde(double H, double wx, double wt, double v, Realization& R);

    struct BoxIndex
    {
        double h = 1.0;
        int k = 0;
        double wx = 0.0;
        double wt = 0.0;
    };

    struct ChildIndex
    {
        std::int64_t i;
        std::int64_t j;
        BoxIndex box;
    };

    // Children of m (level k >= 1), ordered by (i, j).
    std::vector<ChildIndex> children(const BoxIndex& m, const ScaleSequence& scales, double lambda);

    // x- and t-extent of B_m.
    struct BoxExtent
    {
        double x0, x1, t0, t1;
    };
    BoxExtent box_extent(const BoxIndex& m, const ScaleSequence& scales, double lambda);

    struct DEvent
    {
        bool Dhat = true;
        bool Dbar = true;
        bool D = true;
        std::size_t corners = 0;
        bool corner_bound_ok = true; // |C_m| <= 9 (h L_k)^3
        std::optional<StartPoint> dhat_witness;
        std::optional<StartPoint> dbar_witness;
    };

    // m at level k+1 >= 1; corner walks run for h L_k.
    DEvent event_D(const BoxIndex& m, const ScaleSequence& scales, Realization& R, double v_star);

    struct CascadeParams
    {
        double v_min = 0.5;
        double v_max = 1.0;
        double v_star = 0.5;
        DecouplingParams dec;
    };

    enum class Cascade
    {
        caseA,
        caseB,
        caseC,
    };

    std::string to_string(Cascade c);

    struct CascadeResult
    {
        Cascade kind = Cascade::caseA;
        double v_bar = 0.0;
        bool A_bar = false;
        DEvent D;
        std::size_t child_count = 0;
        std::optional<std::pair<std::int64_t, std::int64_t>> fast_child; // case b
        std::optional<StartPoint> fast_start;
        std::optional<std::pair<std::int64_t, std::int64_t>> m1; // case c
        std::optional<std::pair<std::int64_t, std::int64_t>> m2;
        std::optional<StartPoint> y1;
        std::optional<StartPoint> y2;
        double dH = 0.0;
        double dV = 0.0;
    };

    bool operator==(const CascadeResult& a, const CascadeResult& b);

    std::vector<WalkRequest> cascade_requests(const BoxIndex& m, const ScaleSequence& scales, double lambda);

    // Throws InvariantViolation if none of the three cases applies.
    CascadeResult classify_cascading(const BoxIndex& m, const ScaleSequence& scales, Realization& R,
                                     const CascadeParams& p);

    // Recomputes the classification with one independent walk per start (no
    // coalescence shortcuts) and checks it matches, witness included.
    bool verify_cascading(const CascadeResult& r, const BoxIndex& m, const ScaleSequence& scales, Realization& R,
                          const CascadeParams& p);
} // namespace rwdre
