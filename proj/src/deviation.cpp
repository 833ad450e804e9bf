#include "rwdre/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rwdre/box_events.hpp"
#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    double poisson_chernoff(double lambda, double u)
    {
        if (!(lambda > 0.0 && u > 0.0))
            throw ParameterError("poisson_chernoff: lambda and u must be positive");
        return std::max(0.0, std::exp(2.0 * lambda - u));
    }

    double exact_poisson_tail(double lambda, double u)
    {
        if (!(lambda > 0.0 && u > 0.0))
            throw ParameterError("exact_poisson_tail: lambda and u must be positive");
        const double k0 = std::ceil(u);
        // log of e^{-lambda} lambda^k / k!
        auto log_term = [&](double k) { return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0); };
        double sum = 0.0;
        for (double k = k0;; k += 1.0)
        {
            const double term = std::exp(log_term(k));
            sum += term;
            if (k > lambda && term < 1e-16 * sum)
                break;
            if (k > k0 + 1e6)
                throw NumericalError("exact_poisson_tail: series did not converge");
        }
        return std::min(1.0, sum);
    }

    std::vector<int> default_probes(const RateModel& rates)
    {
        std::vector<int> p(rates.table_size() + 1);
        std::iota(p.begin(), p.end(), 0);
        return p;
    }

    DriftCheck drift_margin(const RateModel& rates, const std::vector<int>& probes, double v_circ)
    {
        if (probes.empty())
            throw ParameterError("drift_margin: empty probe set");
        DriftCheck d;
        d.margin = std::numeric_limits<double>::infinity();
        for (int k : probes)
        {
            if (k < 0)
                throw ParameterError("drift_margin: negative occupation probe");
            const double m = rates.a(k) - rates.b(k);
            if (m < d.margin)
            {
                d.margin = m;
                d.argmin = k;
            }
        }
        if (rates.declared_drift_inf && *rates.declared_drift_inf > d.margin + 1e-12)
            throw ValidationError("drift: declared inf(alpha-beta) = " + format_double(*rates.declared_drift_inf) +
                                  " exceeds probed minimum " + format_double(d.margin) + " at occupation " +
                                  std::to_string(d.argmin));
        d.non_nestling = d.margin > v_circ;
        return d;
    }

    DeviationFit submartingale_deviation_fit(const Experiment& ex, double u_drift, double epsilon,
                                             const std::vector<double>& t_grid, std::uint64_t n)
    {
        if (!(epsilon > 0.0))
            throw ParameterError("deviation: epsilon must be positive");
        check_time_grid(t_grid, false);
        if (t_grid.size() < 4 || t_grid.back() < 10.0 * t_grid.front())
            throw ValidationError("deviation: time grid needs >= 4 points spanning a decade");
        const DriftCheck d = drift_margin(ex.rates, default_probes(ex.rates));
        if (!(d.margin > u_drift))
            throw ValidationError("deviation: u_drift = " + format_double(u_drift) +
                                  " is not below inf(alpha-beta) = " + format_double(d.margin));
        const auto xs = sample_positions(ex, t_grid, n);
        DeviationFit f;
        f.t_grid = t_grid;
        f.epsilon = epsilon;
        f.u_drift = u_drift;
        for (std::size_t k = 0; k < t_grid.size(); ++k)
        {
            std::vector<std::uint8_t> hit(n);
            for (std::uint64_t i = 0; i < n; ++i)
                hit[i] = at_most(xs[i][k], (u_drift - epsilon) * t_grid[k]);
            const Tally t = fold_tally(hit, ex.partitions);
            f.p_hats.push_back(wilson(t.successes, t.trials, ex.seed));
        }
        f.monotone = true;
        f.strictly_decreasing = true;
        for (std::size_t k = 1; k < f.p_hats.size(); ++k)
        {
            const auto se = [n](double p) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); };
            const double a = f.p_hats[k - 1].p_hat;
            const double b = f.p_hats[k].p_hat;
            if (b > a + 3.0 * std::hypot(se(a), se(b)))
                f.monotone = false;
            if (!(b < a))
                f.strictly_decreasing = false;
        }
        std::vector<double> lx;
        std::vector<double> ly;
        for (std::size_t k = 0; k < t_grid.size(); ++k)
        {
            const double p = f.p_hats[k].p_hat;
            if (p > 0.0 && p < 1.0)
            {
                lx.push_back(std::log(t_grid[k]));
                ly.push_back(std::log(-std::log(p)));
            }
        }
        f.fit_points = lx.size();
        if (lx.size() >= 2)
        {
            f.slope_estimate = ols_slope(lx, ly);
            f.status = FitStatus::ok;
        }
        return f;
    }

    std::vector<IncrementBin> submartingale_increment_check(const Experiment& ex, double u_drift, double t, double s,
                                                            int bins, std::uint64_t n)
    {
        if (!(t > 0.0 && s > 0.0) || bins < 1 || n < static_cast<std::uint64_t>(2 * bins))
            throw ParameterError("increment check: need t, s > 0, bins >= 1 and n >= 2 bins");
        const auto xs = sample_positions(ex, {t, t + s}, n);
        std::vector<std::pair<double, double>> mi(n); // (M_t, M_{t+s} - M_t)
        for (std::uint64_t i = 0; i < n; ++i)
        {
            const double m0 = static_cast<double>(xs[i][0]) - t * u_drift;
            const double m1 = static_cast<double>(xs[i][1]) - (t + s) * u_drift;
            mi[i] = {m0, m1 - m0};
        }
        std::stable_sort(mi.begin(), mi.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<IncrementBin> out;
        for (int b = 0; b < bins; ++b)
        {
            const std::uint64_t lo = n * b / bins;
            const std::uint64_t hi = n * (b + 1) / bins;
            std::vector<double> inc;
            for (std::uint64_t i = lo; i < hi; ++i)
                inc.push_back(mi[i].second);
            const Moments m = moments(inc);
            out.push_back({mi[lo].first, mi[hi - 1].first, inc.size(), m.mean, m.se, m.mean >= -3.0 * m.se});
        }
        return out;
    }

    std::string deviation_csv(const DeviationFit& f)
    {
        CsvWriter w({"t", "p_hat", "ci_low", "ci_high", "n"});
        for (std::size_t k = 0; k < f.t_grid.size(); ++k)
            w.cell(f.t_grid[k]).cell(f.p_hats[k].p_hat).cell(f.p_hats[k].ci_low).cell(f.p_hats[k].ci_high)
                .cell(f.p_hats[k].n).end_row();
        return w.str();
    }
} // namespace rwdre
