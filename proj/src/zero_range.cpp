#include "rwdre/zero_range.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    RateFunction::RateFunction(std::vector<double> table, double gamma_plus)
        : table_(std::move(table)), slope_(gamma_plus)
    {
        if (table_.empty())
            throw ParameterError("g: empty table");
        if (!(gamma_plus > 0.0))
            throw ParameterError("g: extrapolation slope must be positive");
        for (double v : table_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ParameterError("g: values must be finite and non-negative");
    }

    RateFunction RateFunction::linear(double slope, int k_max)
    {
        std::vector<double> t(static_cast<std::size_t>(k_max) + 1);
        for (int k = 0; k <= k_max; ++k)
            t[static_cast<std::size_t>(k)] = slope * k;
        return RateFunction(std::move(t), slope);
    }

    double RateFunction::operator()(std::int64_t k) const
    {
        if (k < 0)
            throw ParameterError("g: negative occupation");
        if (k <= k_max())
            return table_[static_cast<std::size_t>(k)];
        return table_.back() + slope_ * static_cast<double>(k - k_max());
    }

    void ZrParams::validate_rates() const
    {
        if (!(gamma_minus > 0.0 && gamma_minus <= gamma_plus))
            throw ValidationError("zero-range: need 0 < gamma_minus <= gamma_plus");
        if (g(0) != 0.0)
            throw ValidationError("zero-range: g(0) must be 0");
        const double slack = 1e-12 * std::max(1.0, gamma_plus);
        for (std::int64_t k = 1; k <= g.k_max(); ++k)
        {
            const double d = g(k) - g(k - 1);
            if (d < gamma_minus - slack || d > gamma_plus + slack)
                throw ValidationError("zero-range: g violates the increment bounds at k=" + std::to_string(k) +
                                      " (g(k)-g(k-1) = " + format_double(d) + ")");
        }
    }

    void ZrParams::validate() const
    {
        validate_rates();
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw ValidationError("zero-range: rho must be positive");
    }

    void ZrParams::resolve(double tol)
    {
        validate();
        phi = zr_fugacity(rho, *this, tol);
    }

    namespace
    {
        // Terms w_k = phi^k / g(k)! as log-weights, truncated once the
        // geometric tail bound falls below rel_tol of the running sum.
        std::vector<double> log_weights(double phi, const ZrParams& p, double rel_tol)
        {
            if (!(phi >= 0.0) || !std::isfinite(phi))
                throw ParameterError("zero-range: fugacity must be finite and non-negative");
            if (!(rel_tol > 0.0))
                throw ParameterError("zero-range: tolerance must be positive");
            p.validate_rates();
            std::vector<double> lw{0.0};
            if (phi == 0.0)
                return lw;
            const double lphi = std::log(phi);
            double max_lw = 0.0;
            double sum = 1.0; // relative to max_lw
            double log_gfact = 0.0;
            for (std::int64_t k = 1;; ++k)
            {
                log_gfact += std::log(p.g(k));
                const double l = static_cast<double>(k) * lphi - log_gfact;
                lw.push_back(l);
                if (l > max_lw)
                {
                    sum = sum * std::exp(max_lw - l) + 1.0;
                    max_lw = l;
                }
                else
                {
                    sum += std::exp(l - max_lw);
                }
                const double r = phi / p.g(k + 1);
                if (r < 1.0)
                {
                    const double tail = std::exp(l - max_lw) * r / (1.0 - r);
                    if (tail < rel_tol * sum)
                        break;
                }
                if (k > 100000000)
                    throw NumericalError("zero-range: series did not converge");
            }
            return lw;
        }

        double log_sum(const std::vector<double>& lw, double& max_out)
        {
            max_out = *std::max_element(lw.begin(), lw.end());
            double s = 0.0;
            for (double l : lw)
                s += std::exp(l - max_out);
            return s;
        }
    } // namespace

    double zr_partition(double phi, const ZrParams& params, double tol)
    {
        const auto lw = log_weights(phi, params, tol);
        double m = 0.0;
        const double s = log_sum(lw, m);
        return s * std::exp(m);
    }

    double zr_density(double phi, const ZrParams& params, double tol)
    {
        const auto lw = log_weights(phi, params, tol);
        double m = 0.0;
        const double s = log_sum(lw, m);
        double num = 0.0;
        for (std::size_t k = 1; k < lw.size(); ++k)
            num += static_cast<double>(k) * std::exp(lw[k] - m);
        return num / s;
    }

    double zr_fugacity(double rho, const ZrParams& params, double tol)
    {
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw ParameterError("zr_fugacity: rho must be positive");
        if (!(tol > 0.0))
            throw ParameterError("zr_fugacity: tol must be positive");
        auto R = [&](double phi) { return zr_density(phi, params, 1e-16); };
        double lo = 0.0;
        double hi = 1.0;
        int expand = 0;
        while (R(hi) < rho)
        {
            lo = hi;
            hi *= 2.0;
            if (++expand > 200)
                throw NumericalError("zr_fugacity: could not bracket rho");
        }
        for (int it = 0; it < 400; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi))
                break;
            const double r = R(mid);
            if (std::fabs(r - rho) <= tol)
                return mid;
            if (r < rho)
                lo = mid;
            else
                hi = mid;
        }
        throw NumericalError("zr_fugacity: bisection did not reach tolerance");
    }

    std::vector<double> zr_pmf(double phi, const ZrParams& params)
    {
        const auto lw = log_weights(phi, params, 1e-13);
        double m = 0.0;
        const double s = log_sum(lw, m);
        std::vector<double> pmf(lw.size());
        for (std::size_t k = 0; k < lw.size(); ++k)
            pmf[k] = std::exp(lw[k] - m) / s;
        return pmf;
    }

    OccupancyConfig zr_sample_initial(const ZrParams& params, std::int64_t x_min, std::int64_t x_max,
                                      std::uint64_t master, std::uint32_t replica)
    {
        if (x_min > x_max)
            throw ParameterError("zr_sample_initial: empty site range");
        const auto pmf = zr_pmf(params.phi, params);
        std::vector<double> cdf(pmf.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k)
            cdf[k] = (acc += pmf[k]);
        OccupancyConfig out;
        out.x_min = x_min;
        out.values.resize(static_cast<std::size_t>(x_max - x_min));
        for (std::int64_t x = x_min; x < x_max; ++x)
        {
            auto rng = derive_stream(master, {x, StreamKind::initialLaw, replica});
            const double u = uniform01(rng);
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const auto k = std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1);
            out.values[static_cast<std::size_t>(x - x_min)] = static_cast<int>(k);
        }
        return out;
    }

    std::int64_t zr_default_buffer(const ZrParams& params, double horizon)
    {
        const double speed = std::max(1.0, params.gamma_plus * params.rho + params.g(1));
        return static_cast<std::int64_t>(std::ceil(4.0 * horizon * speed));
    }

    EnvTrajectory zr_evolve(const OccupancyConfig& initial, double horizon, const SpaceTimeWindow& window,
                            const ZrParams& params, std::uint64_t master, std::uint32_t replica,
                            const ZrEvolveOptions& opts)
    {
        if (initial.values.empty())
            throw ParameterError("zr_evolve: empty domain");
        if (!(horizon > 0.0))
            throw ParameterError("zr_evolve: horizon must be positive");
        const std::int64_t buffer = std::min(window.x_min - initial.x_min, initial.x_max() - window.x_max);
        if (buffer < 0)
            throw ParameterError("zr_evolve: initial configuration does not cover the window");
        const std::int64_t required = std::max(opts.min_buffer, opts.buffer.value_or(0));
        if (buffer < required)
            throw ParameterError("zr_evolve: buffer " + std::to_string(buffer) + " narrower than required " +
                                 std::to_string(required));

        const std::int64_t x0 = initial.x_min;
        const std::size_t n = initial.values.size();
        std::vector<int> occ = initial.values;
        std::vector<Xoshiro256> clocks;
        clocks.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            clocks.push_back(derive_stream(master, {x0 + static_cast<std::int64_t>(i), StreamKind::envClockSite, replica}));
        std::vector<std::uint32_t> version(n, 0);

        struct Entry
        {
            double time;
            std::int64_t site;
            std::uint32_t version;
            bool operator>(const Entry& o) const
            {
                return time != o.time ? time > o.time : site > o.site;
            }
        };
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        auto schedule = [&](std::size_t i, double now) {
            ++version[i];
            const double rate = params.g(occ[i]);
            if (rate <= 0.0)
                return;
            const double t = now + exponential(clocks[i], rate);
            if (t <= horizon)
                pq.push({t, static_cast<std::int64_t>(i), version[i]});
        };
        for (std::size_t i = 0; i < n; ++i)
            schedule(i, 0.0);

        std::vector<JumpRecord> jumps;
        std::vector<Firing> firings;
        while (!pq.empty())
        {
            const Entry e = pq.top();
            pq.pop();
            const auto i = static_cast<std::size_t>(e.site);
            if (e.version != version[i])
                continue;
            const int k = occ[i];
            if (opts.record_firings)
                firings.push_back({e.time, x0 + e.site, k, params.g(k)});
            const bool right = uniform01(clocks[i]) < 0.5;
            const std::int64_t j = e.site + (right ? 1 : -1);
            if (j < 0 || j >= static_cast<std::int64_t>(n))
            {
                // closed boundary: the particle stays put
                schedule(i, e.time);
                continue;
            }
            --occ[i];
            ++occ[static_cast<std::size_t>(j)];
            jumps.push_back({e.time, x0 + e.site, x0 + j, 0, false, 0});
            schedule(i, e.time);
            schedule(static_cast<std::size_t>(j), e.time);
        }

        SpaceTimeWindow interior = window;
        interior.t_min = 0.0;
        interior.t_max = horizon;
        EnvTrajectory traj(initial, interior, std::move(jumps));
        traj.firings = std::move(firings);
        return traj;
    }
} // namespace rwdre
