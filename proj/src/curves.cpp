#include "rwdre/curves.hpp"

#include <algorithm>
#include <cmath>

#include "rwdre/box_events.hpp"
#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"
#include "rwdre/parallel.hpp"

namespace rwdre
{
    Tally fold_tally(const std::vector<std::uint8_t>& flags, unsigned partitions)
    {
        const std::uint64_t n = flags.size();
        partitions = std::max(1u, partitions);
        std::vector<Tally> parts(partitions);
        for (unsigned b = 0; b < partitions; ++b)
            for (std::uint64_t i = n * b / partitions; i < n * (b + 1) / partitions; ++i)
            {
                parts[b].successes += flags[i] ? 1 : 0;
                parts[b].trials += 1;
            }
        Tally total;
        for (const auto& t : parts)
            total += t;
        return total;
    }

    namespace
    {
        struct Extremes
        {
            std::int64_t max_disp;
            std::int64_t min_disp;
            std::size_t starts;
        };

        std::vector<Extremes> scan_replicas(const Experiment& ex, double H, std::uint64_t n,
                                            std::uint32_t offset)
        {
            return parallel_map(
                n,
                [&](std::uint64_t i) {
                    const auto rep = static_cast<std::uint32_t>(offset + i);
                    Realization R(ex.seed, rep, ex.env, ex.rates, box_requests(H, 0.0, 0.0, ex.rates.lambda()));
                    const BoxScan s = scan_box(H, 0.0, 0.0, R);
                    return Extremes{s.max_disp, s.min_disp, s.starts.size()};
                },
                ex.partitions);
        }

        std::vector<PhRow> ph_rows(const Experiment& ex, double H, const std::vector<double>& v_grid,
                                   const std::vector<Extremes>& sc)
        {
            std::vector<PhRow> rows;
            for (double v : v_grid)
            {
                std::vector<std::uint8_t> a(sc.size());
                std::vector<std::uint8_t> at(sc.size());
                for (std::size_t i = 0; i < sc.size(); ++i)
                {
                    a[i] = sc[i].starts > 0 && at_least(sc[i].max_disp, v * H);
                    at[i] = sc[i].starts > 0 && at_most(sc[i].min_disp, v * H);
                }
                const Tally ta = fold_tally(a, ex.partitions);
                const Tally tt = fold_tally(at, ex.partitions);
                rows.push_back({H, v, wilson(ta.successes, ta.trials, ex.seed), wilson(tt.successes, tt.trials, ex.seed)});
            }
            return rows;
        }
    } // namespace

    std::vector<PhRow> estimate_ph(const Experiment& ex, double H, const std::vector<double>& v_grid,
                                   std::uint64_t n)
    {
        if (n < 30)
            throw ParameterError("estimate_ph: need n >= 30");
        if (!(H > 0.0))
            throw ParameterError("estimate_ph: H must be positive");
        return ph_rows(ex, H, v_grid, scan_replicas(ex, H, n, ex.replica_offset));
    }

    std::vector<double> make_grid(double lo, double hi, double step)
    {
        if (!(step > 0.0) || !(lo <= hi))
            throw ParameterError("grid: need lo <= hi and step > 0");
        std::vector<double> g;
        const auto m = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::int64_t i = 0; i <= m; ++i)
            g.push_back(lo + static_cast<double>(i) * step);
        return g;
    }

    SpeedBracket estimate_speed_bracket(const Experiment& ex, const std::vector<double>& H_list,
                                        const std::vector<double>& v_grid, std::uint64_t n)
    {
        if (H_list.empty() || v_grid.empty())
            throw ParameterError("speed bracket: empty H list or v grid");
        if (!std::is_sorted(v_grid.begin(), v_grid.end()) ||
            std::adjacent_find(H_list.begin(), H_list.end(), std::greater_equal<>()) != H_list.end())
            throw ParameterError("speed bracket: v grid must be sorted and H list increasing");
        if (n < 30)
            throw ParameterError("speed bracket: need n >= 30");
        SpeedBracket out;
        for (std::size_t k = 0; k < H_list.size(); ++k)
        {
            const double H = H_list[k];
            const auto offset = static_cast<std::uint32_t>(ex.replica_offset + k * n);
            const auto rows = ph_rows(ex, H, v_grid, scan_replicas(ex, H, n, offset));
            BracketRow b{H, std::nullopt, std::nullopt, false};
            for (const auto& r : rows)
                if (!b.v_plus_hat && r.p.ci_high < out.threshold)
                    b.v_plus_hat = r.v;
            for (auto it = rows.rbegin(); it != rows.rend(); ++it)
                if (it->p_tilde.ci_high < out.threshold)
                {
                    b.v_minus_hat = it->v;
                    break;
                }
            b.conclusive = b.v_plus_hat.has_value() && b.v_minus_hat.has_value();
            out.rows.push_back(b);
            out.curves.insert(out.curves.end(), rows.begin(), rows.end());
        }
        out.v_minus_hat = out.rows.back().v_minus_hat;
        out.v_plus_hat = out.rows.back().v_plus_hat;
        out.conclusive = out.rows.back().conclusive;
        return out;
    }

    void BallisticityParams::validate() const
    {
        if (!(v_star > 0.0 && kappa_star > 0.0 && C_star > 0.0))
            throw ValidationError("ballisticity: v_star, kappa_star, C_star must be positive");
        if (!(gamma_star > 1.0))
            throw ValidationError("ballisticity: gamma_star must be > 1");
    }

    double BallisticityParams::bound(double t) const
    {
        const double lp = t > 1.0 ? std::log(t) : 0.0;
        return C_star * std::exp(-kappa_star * std::pow(lp, gamma_star));
    }

    DecayParams derived_decay_params(const DecouplingParams& circ, const BallisticityParams& star)
    {
        return {std::min(circ.kappa_circ, star.kappa_star) / 9.0, std::min(circ.gamma_circ, star.gamma_star)};
    }

    void check_time_grid(const std::vector<double>& t_grid, bool allow_zero)
    {
        if (t_grid.empty())
            throw ParameterError("time grid is empty");
        for (std::size_t i = 0; i < t_grid.size(); ++i)
        {
            if (!(t_grid[i] >= 0.0) || (!allow_zero && t_grid[i] == 0.0))
                throw ValidationError("time grid: t = " + format_double(t_grid[i]) + " not allowed");
            if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
                throw ParameterError("time grid must be strictly increasing");
        }
    }

    std::vector<std::vector<std::int64_t>> sample_positions(const Experiment& ex, const std::vector<double>& t_grid,
                                                            std::uint64_t n)
    {
        check_time_grid(t_grid, true);
        const double T = t_grid.back();
        return parallel_map(
            n,
            [&](std::uint64_t i) {
                std::vector<std::int64_t> xs(t_grid.size(), 0);
                if (T <= 0.0)
                    return xs;
                const auto rep = static_cast<std::uint32_t>(ex.replica_offset + i);
                Realization R(ex.seed, rep, ex.env, ex.rates, {{{0, 0.0}, T}});
                const WalkPath w = R.walk({0, 0.0}, T);
                for (std::size_t k = 0; k < t_grid.size(); ++k)
                    xs[k] = w.position_at(t_grid[k]);
                return xs;
            },
            ex.partitions);
    }

    std::vector<BallisticityRow> ballisticity_curve(const Experiment& ex, const BallisticityParams& b,
                                                    const std::vector<double>& t_grid, std::uint64_t n)
    {
        // v_star = 0 is allowed here (symmetric reference curves)
        BallisticityParams shape = b;
        shape.v_star = 1.0;
        shape.validate();
        if (!(b.v_star >= 0.0))
            throw ValidationError("ballisticity: v_star must be non-negative");
        const auto xs = sample_positions(ex, t_grid, n);
        std::vector<BallisticityRow> rows;
        for (std::size_t k = 0; k < t_grid.size(); ++k)
        {
            std::vector<std::uint8_t> f(n);
            for (std::uint64_t i = 0; i < n; ++i)
                f[i] = at_most(xs[i][k], b.v_star * t_grid[k]);
            const Tally t = fold_tally(f, ex.partitions);
            rows.push_back({t_grid[k], wilson(t.successes, t.trials, ex.seed), b.bound(t_grid[k])});
        }
        return rows;
    }

    LlnCurve lln_curve(const Experiment& ex, const std::vector<double>& t_grid, double epsilon, std::uint64_t n)
    {
        check_time_grid(t_grid, false);
        if (!(epsilon > 0.0))
            throw ParameterError("lln: epsilon must be positive");
        if (n < 2)
            throw ParameterError("lln: need n >= 2");
        const auto xs = sample_positions(ex, t_grid, n);
        LlnCurve c;
        c.epsilon = epsilon;
        std::vector<std::vector<double>> speeds(t_grid.size(), std::vector<double>(n));
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            for (std::uint64_t i = 0; i < n; ++i)
                speeds[k][i] = static_cast<double>(xs[i][k]) / t_grid[k];
        c.v_hat = moments(speeds.back()).mean;
        for (std::size_t k = 0; k < t_grid.size(); ++k)
        {
            const Moments m = moments(speeds[k]);
            std::uint64_t dev = 0;
            for (double s : speeds[k])
                dev += std::abs(s - c.v_hat) >= epsilon ? 1 : 0;
            c.rows.push_back({t_grid[k], m.mean, m.sd, m.se, static_cast<double>(dev) / static_cast<double>(n)});
        }
        return c;
    }

    std::string ph_csv(const std::vector<PhRow>& rows)
    {
        CsvWriter w({"H", "v", "p_hat", "ci_low", "ci_high", "n", "seed"});
        for (const auto& r : rows)
            w.cell(r.H).cell(r.v).cell(r.p.p_hat).cell(r.p.ci_low).cell(r.p.ci_high).cell(r.p.n).cell(r.p.seed).end_row();
        return w.str();
    }

    std::string ballisticity_csv(const std::vector<BallisticityRow>& rows)
    {
        CsvWriter w({"t", "p_hat", "bound"});
        for (const auto& r : rows)
            w.cell(r.t).cell(r.p.p_hat).cell(r.bound).end_row();
        return w.str();
    }

    std::string lln_csv(const LlnCurve& c)
    {
        CsvWriter w({"t", "mean_speed", "sd", "dev_prob"});
        for (const auto& r : c.rows)
            w.cell(r.t).cell(r.mean_speed).cell(r.sd).cell(r.dev_prob).end_row();
        return w.str();
    }

    std::string decoupling_csv(const std::vector<DecouplingResult>& rows)
    {
        CsvWriter w({"d_h", "d_v", "s", "gap_hat", "stderr", "bound"});
        for (const auto& r : rows)
            w.cell(r.dH).cell(r.dV).cell(r.s).cell(r.gap).cell(r.stderr_).cell(r.bound).end_row();
        return w.str();
    }
} // namespace rwdre
