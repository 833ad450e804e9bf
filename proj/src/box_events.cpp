#include "rwdre/box_events.hpp"

#include <algorithm>
#include <cmath>

#include "rwdre/error.hpp"

namespace rwdre
{
    std::vector<StartPoint> interval_starts(double x, double t, double width)
    {
        std::vector<StartPoint> out;
        if (!(width > 0.0))
            return out;
        const auto lo = static_cast<std::int64_t>(std::ceil(x));
        const auto hi = static_cast<std::int64_t>(std::ceil(x + width)); // exclusive
        out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo)));
        for (std::int64_t y = lo; y < hi; ++y)
            out.push_back({y, t});
        return out;
    }

    std::vector<WalkRequest> box_requests(double H, double wx, double wt, double lambda)
    {
        std::vector<WalkRequest> out;
        for (const auto& y : interval_starts(wx, wt, lambda * H))
            out.push_back({y, H});
        return out;
    }

    BoxScan scan_box(double H, double wx, double wt, Realization& R)
    {
        BoxScan s;
        s.H = H;
        s.starts = interval_starts(wx, wt, R.rates().lambda() * H);
        const auto paths = R.family(s.starts, H);
        s.displacement.reserve(paths.size());
        for (const auto& p : paths)
            s.displacement.push_back(p.final_position() - p.start.x0);
        if (!s.displacement.empty())
        {
            s.max_disp = *std::max_element(s.displacement.begin(), s.displacement.end());
            s.min_disp = *std::min_element(s.displacement.begin(), s.displacement.end());
        }
        return s;
    }

    bool event_A(double H, double wx, double wt, double v, Realization& R)
    {
        return scan_box(H, wx, wt, R).A(v);
    }

    bool event_Atilde(double H, double wx, double wt, double v, Realization& R)
    {
        return scan_box(H, wx, wt, R).Atilde(v);
    }

    std::vector<ChildIndex> children(const BoxIndex& m, const ScaleSequence& scales, double lambda)
    {
        if (m.k < 1)
            throw ParameterError("children: box at level 0 has no children");
        if (!(m.h >= 1.0))
            throw ParameterError("children: h must be >= 1");
        const int k = m.k - 1;
        const std::int64_t ell = scales.ell(k);
        const double Hs = m.h * static_cast<double>(scales.L(k));
        std::vector<ChildIndex> out;
        out.reserve(static_cast<std::size_t>(9 * ell * ell));
        for (std::int64_t i = -4 * ell; i <= 5 * ell - 1; ++i)
            for (std::int64_t j = 0; j <= ell - 1; ++j)
                out.push_back({i, j, {m.h, k, m.wx + static_cast<double>(i) * lambda * Hs, m.wt + static_cast<double>(j) * Hs}});
        return out;
    }

    BoxExtent box_extent(const BoxIndex& m, const ScaleSequence& scales, double lambda)
    {
        const double H = m.h * static_cast<double>(scales.L(m.k));
        return {m.wx - 4.0 * lambda * H, m.wx + 5.0 * lambda * H, m.wt, m.wt + H};
    }

    std::string to_string(Cascade c)
    {
        switch (c)
        {
        case Cascade::caseA:
            return "a";
        case Cascade::caseB:
            return "b";
        case Cascade::caseC:
            return "c";
        }
        return "?";
    }

    namespace
    {
        struct Geometry
        {
            int k;          // children level
            std::int64_t ell;
            double Hs;      // h L_k
            double Hb;      // h L_{k+1}
            double lambda;
        };

        Geometry geometry(const BoxIndex& m, const ScaleSequence& scales, double lambda)
        {
            if (m.k < 1)
                throw ParameterError("box at level 0: corner set and children need level >= 1");
            if (!(m.h >= 1.0))
                throw ParameterError("h must be >= 1");
            const int k = m.k - 1;
            return {k, scales.ell(k), m.h * static_cast<double>(scales.L(k)), m.h * static_cast<double>(scales.L(m.k)),
                    lambda};
        }

        std::vector<WalkPath> run_paths(Realization& R, const std::vector<StartPoint>& ys, double H, bool naive)
        {
            if (!naive)
                return R.family(ys, H);
            std::vector<WalkPath> out;
            out.reserve(ys.size());
            for (const auto& y : ys)
                out.push_back(R.walk(y, H));
            return out;
        }

        struct CornerLevel
        {
            std::vector<StartPoint> starts;
            std::vector<std::int64_t> disp;
            std::vector<std::int64_t> excursion;
        };

        std::vector<CornerLevel> corner_walks(const BoxIndex& m, const Geometry& g, Realization& R, bool naive)
        {
            std::vector<CornerLevel> levels(static_cast<std::size_t>(g.ell));
            for (std::int64_t j = 0; j < g.ell; ++j)
            {
                auto& lv = levels[static_cast<std::size_t>(j)];
                lv.starts = interval_starts(m.wx - 4.0 * g.lambda * g.Hb, m.wt + static_cast<double>(j) * g.Hs,
                                            9.0 * g.lambda * g.Hb);
                const auto paths = run_paths(R, lv.starts, g.Hs, naive);
                for (const auto& p : paths)
                {
                    lv.disp.push_back(p.final_position() - p.start.x0);
                    lv.excursion.push_back(p.max_excursion(g.Hs));
                }
            }
            return levels;
        }

        DEvent d_from_corners(const std::vector<CornerLevel>& levels, const Geometry& g, double v_star)
        {
            DEvent d;
            for (const auto& lv : levels)
            {
                d.corners += lv.starts.size();
                for (std::size_t i = 0; i < lv.starts.size(); ++i)
                {
                    if (d.Dhat && static_cast<double>(lv.excursion[i]) > 4.0 * g.lambda * g.Hs + kTieEps)
                    {
                        d.Dhat = false;
                        d.dhat_witness = lv.starts[i];
                    }
                    if (d.Dbar && !(static_cast<double>(lv.disp[i]) > v_star * g.Hs + kTieEps))
                    {
                        d.Dbar = false;
                        d.dbar_witness = lv.starts[i];
                    }
                }
            }
            d.D = d.Dhat && d.Dbar;
            d.corner_bound_ok = static_cast<double>(d.corners) <= 9.0 * g.Hs * g.Hs * g.Hs;
            return d;
        }

        struct ChildEvent
        {
            std::int64_t i;
            std::int64_t j;
            double ax;
            double at;
            std::int64_t max_disp = 0;
            std::optional<StartPoint> argmax;
            bool nonempty = false;
        };

        CascadeResult classify_impl(const BoxIndex& m, const ScaleSequence& scales, Realization& R,
                                    const CascadeParams& p, bool naive)
        {
            if (!(0.0 < p.v_min && p.v_min < p.v_max))
                throw ParameterError("cascading: need 0 < v_min < v_max");
            const Geometry g = geometry(m, scales, R.rates().lambda());
            CascadeResult r;
            r.v_bar = p.v_min + (p.v_max - p.v_min) / std::sqrt(static_cast<double>(g.ell));

            // A_m(v_bar)
            const auto top = interval_starts(m.wx, m.wt, g.lambda * g.Hb);
            const auto top_paths = run_paths(R, top, g.Hb, naive);
            for (const auto& path : top_paths)
                if (at_least(path.final_position() - path.start.x0, r.v_bar * g.Hb))
                {
                    r.A_bar = true;
                    break;
                }

            const auto levels = corner_walks(m, g, R, naive);
            r.D = d_from_corners(levels, g, p.v_star);

            // child events from the corner walks; children tile the corner rows
            std::vector<ChildEvent> kids;
            for (const auto& c : children(m, scales, g.lambda))
            {
                ChildEvent e{c.i, c.j, c.box.wx, c.box.wt, 0, std::nullopt, false};
                const auto& lv = levels[static_cast<std::size_t>(c.j)];
                const auto lo = static_cast<std::int64_t>(std::ceil(c.box.wx));
                const auto hi = static_cast<std::int64_t>(std::ceil(c.box.wx + g.lambda * g.Hs));
                for (std::size_t s = 0; s < lv.starts.size(); ++s)
                {
                    const std::int64_t x = lv.starts[s].x0;
                    if (x < lo || x >= hi)
                        continue;
                    if (!e.nonempty || lv.disp[s] > e.max_disp)
                    {
                        e.max_disp = lv.disp[s];
                        e.argmax = lv.starts[s];
                        e.nonempty = true;
                    }
                }
                kids.push_back(e);
            }
            r.child_count = kids.size();

            if (!(r.A_bar && r.D.D))
            {
                r.kind = Cascade::caseA;
                return r;
            }
            for (const auto& e : kids)
                if (e.nonempty && at_least(e.max_disp, p.v_max * g.Hs))
                {
                    r.kind = Cascade::caseB;
                    r.fast_child = {e.i, e.j};
                    r.fast_start = e.argmax;
                    return r;
                }

            std::vector<const ChildEvent*> slow_ok;
            for (const auto& e : kids)
                if (e.nonempty && at_least(e.max_disp, p.v_min * g.Hs))
                    slow_ok.push_back(&e);
            auto first_start = [&](const ChildEvent& e) {
                const auto& lv = levels[static_cast<std::size_t>(e.j)];
                const auto lo = static_cast<std::int64_t>(std::ceil(e.ax));
                const auto hi = static_cast<std::int64_t>(std::ceil(e.ax + g.lambda * g.Hs));
                for (std::size_t s = 0; s < lv.starts.size(); ++s)
                    if (lv.starts[s].x0 >= lo && lv.starts[s].x0 < hi && at_least(lv.disp[s], p.v_min * g.Hs))
                        return lv.starts[s];
                throw InvariantViolation("cascading: child event without a witness start");
            };
            for (std::size_t a = 0; a < slow_ok.size(); ++a)
                for (std::size_t b = a + 1; b < slow_ok.size(); ++b)
                {
                    const ChildEvent& e1 = *slow_ok[a];
                    const ChildEvent& e2 = *slow_ok[b];
                    const double dH = horizontal_gap(e1.ax - 4.0 * g.lambda * g.Hs, e1.ax + 5.0 * g.lambda * g.Hs,
                                                     e2.ax - 4.0 * g.lambda * g.Hs, e2.ax + 5.0 * g.lambda * g.Hs);
                    const double dV = horizontal_gap(e1.at, e1.at + g.Hs, e2.at, e2.at + g.Hs);
                    const double need = std::max(p.dec.v_circ * dV + p.dec.c2 * g.Hs + p.dec.c3, g.lambda * g.Hs);
                    if (dH >= need)
                    {
                        r.kind = Cascade::caseC;
                        r.m1 = {e1.i, e1.j};
                        r.m2 = {e2.i, e2.j};
                        r.y1 = first_start(e1);
                        r.y2 = first_start(e2);
                        r.dH = dH;
                        r.dV = dV;
                        return r;
                    }
                }
            throw InvariantViolation("cascading trichotomy: A_m(v_bar) and D_m occur, no child reaches v_max, "
                                     "and no separated pair of children reaches v_min");
        }
    } // namespace

    bool operator==(const CascadeResult& a, const CascadeResult& b)
    {
        return a.kind == b.kind && a.v_bar == b.v_bar && a.A_bar == b.A_bar && a.D.D == b.D.D &&
               a.D.Dhat == b.D.Dhat && a.D.Dbar == b.D.Dbar && a.D.corners == b.D.corners &&
               a.D.dhat_witness == b.D.dhat_witness && a.D.dbar_witness == b.D.dbar_witness &&
               a.child_count == b.child_count && a.fast_child == b.fast_child && a.fast_start == b.fast_start &&
               a.m1 == b.m1 && a.m2 == b.m2 && a.y1 == b.y1 && a.y2 == b.y2 && a.dH == b.dH && a.dV == b.dV;
    }

    DEvent event_D(const BoxIndex& m, const ScaleSequence& scales, Realization& R, double v_star)
    {
        const Geometry g = geometry(m, scales, R.rates().lambda());
        return d_from_corners(corner_walks(m, g, R, false), g, v_star);
    }

    std::vector<WalkRequest> cascade_requests(const BoxIndex& m, const ScaleSequence& scales, double lambda)
    {
        const Geometry g = geometry(m, scales, lambda);
        std::vector<WalkRequest> out;
        for (const auto& y : interval_starts(m.wx, m.wt, lambda * g.Hb))
            out.push_back({y, g.Hb});
        for (std::int64_t j = 0; j < g.ell; ++j)
        {
            const auto row = interval_starts(m.wx - 4.0 * lambda * g.Hb, m.wt + static_cast<double>(j) * g.Hs,
                                             9.0 * lambda * g.Hb);
            if (!row.empty())
            {
                out.push_back({row.front(), g.Hs});
                out.push_back({row.back(), g.Hs});
            }
        }
        return out;
    }

    CascadeResult classify_cascading(const BoxIndex& m, const ScaleSequence& scales, Realization& R,
                                     const CascadeParams& p)
    {
        return classify_impl(m, scales, R, p, false);
    }

    bool verify_cascading(const CascadeResult& r, const BoxIndex& m, const ScaleSequence& scales, Realization& R,
                          const CascadeParams& p)
    {
        const CascadeResult naive = classify_impl(m, scales, R, p, true);
        if (!(naive == r))
            return false;
        const double Hs = m.h * static_cast<double>(scales.L(m.k - 1));
        // replay the witness walks on their own
        switch (r.kind)
        {
        case Cascade::caseA:
            if (r.A_bar && r.D.D)
                return false;
            if (!r.A_bar)
                return true;
            if (r.D.dhat_witness)
                return R.walk(*r.D.dhat_witness, Hs).max_excursion(Hs) > 4.0 * R.rates().lambda() * Hs;
            if (r.D.dbar_witness)
            {
                const auto w = R.walk(*r.D.dbar_witness, Hs);
                return !(static_cast<double>(w.final_position() - w.start.x0) > p.v_star * Hs + kTieEps);
            }
            return false;
        case Cascade::caseB:
        {
            const auto w = R.walk(*r.fast_start, Hs);
            return at_least(w.final_position() - w.start.x0, p.v_max * Hs);
        }
        case Cascade::caseC:
        {
            const auto w1 = R.walk(*r.y1, Hs);
            const auto w2 = R.walk(*r.y2, Hs);
            const double lambda = R.rates().lambda();
            const double need = std::max(p.dec.v_circ * r.dV + p.dec.c2 * Hs + p.dec.c3, lambda * Hs);
            return at_least(w1.final_position() - w1.start.x0, p.v_min * Hs) &&
                   at_least(w2.final_position() - w2.start.x0, p.v_min * Hs) && r.dH >= need;
        }
        }
        return false;
    }
} // namespace rwdre
