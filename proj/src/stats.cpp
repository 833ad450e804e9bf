#include "rwdre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

#include "rwdre/error.hpp"

namespace rwdre
{
    Estimate wilson(std::uint64_t successes, std::uint64_t n, std::uint64_t seed)
    {
        if (n == 0)
            throw ParameterError("wilson: zero samples");
        if (successes > n)
            throw ParameterError("wilson: successes exceed samples");
        constexpr double z = 1.959963984540054;
        const double nn = static_cast<double>(n);
        const double p = static_cast<double>(successes) / nn;
        const double z2 = z * z;
        const double denom = 1.0 + z2 / nn;
        const double centre = (p + z2 / (2.0 * nn)) / denom;
        const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
        Estimate e;
        e.p_hat = p;
        e.ci_low = std::clamp(centre - half, 0.0, p);
        e.ci_high = std::clamp(centre + half, p, 1.0);
        e.n = n;
        e.seed = seed;
        return e;
    }

    Moments moments(const std::vector<double>& xs)
    {
        Moments m;
        m.n = xs.size();
        if (xs.empty())
            return m;
        double s = 0.0;
        for (double x : xs)
            s += x;
        m.mean = s / static_cast<double>(xs.size());
        if (xs.size() > 1)
        {
            double ss = 0.0;
            for (double x : xs)
                ss += (x - m.mean) * (x - m.mean);
            m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
            m.se = m.sd / std::sqrt(static_cast<double>(xs.size()));
        }
        return m;
    }

    double chi_square_sf(double statistic, int dof)
    {
        if (dof <= 0)
            return 1.0;
        return boost::math::gamma_q(0.5 * dof, 0.5 * std::max(statistic, 0.0));
    }

    GofResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs,
                             double min_expected)
    {
        if (observed.size() != probs.size() || observed.empty())
            throw ParameterError("chi_square_gof: size mismatch");
        double n = 0.0;
        for (auto o : observed)
            n += static_cast<double>(o);
        if (n <= 0.0)
            throw ParameterError("chi_square_gof: no observations");
        std::vector<double> obs;
        std::vector<double> exp;
        double acc_o = 0.0;
        double acc_e = 0.0;
        for (std::size_t i = observed.size(); i-- > 0;)
        {
            acc_o += static_cast<double>(observed[i]);
            acc_e += probs[i] * n;
            if (acc_e >= min_expected)
            {
                obs.push_back(acc_o);
                exp.push_back(acc_e);
                acc_o = acc_e = 0.0;
            }
        }
        if (acc_e > 0.0 || acc_o > 0.0)
        {
            if (exp.empty())
            {
                obs.push_back(acc_o);
                exp.push_back(acc_e);
            }
            else
            {
                obs.back() += acc_o;
                exp.back() += acc_e;
            }
        }
        GofResult r;
        for (std::size_t i = 0; i < obs.size(); ++i)
        {
            if (exp[i] <= 0.0)
            {
                if (obs[i] > 0.0)
                {
                    r.statistic = INFINITY;
                    r.p_value = 0.0;
                    r.dof = static_cast<int>(obs.size()) - 1;
                    return r;
                }
                continue;
            }
            r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
        }
        r.dof = static_cast<int>(obs.size()) - 1;
        r.p_value = chi_square_sf(r.statistic, r.dof);
        return r;
    }

    GofResult chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                    double min_expected)
    {
        if (a.empty() || b.empty())
            throw ParameterError("chi_square_two_sample: empty sample");
        std::map<std::int64_t, std::pair<double, double>> cells;
        for (auto v : a)
            cells[v].first += 1.0;
        for (auto v : b)
            cells[v].second += 1.0;
        const double na = static_cast<double>(a.size());
        const double nb = static_cast<double>(b.size());
        const double n = na + nb;
        // pool consecutive values until the smaller expected count reaches min_expected
        std::vector<std::pair<double, double>> pooled;
        std::pair<double, double> acc{0.0, 0.0};
        for (const auto& [v, c] : cells)
        {
            acc.first += c.first;
            acc.second += c.second;
            const double tot = acc.first + acc.second;
            if (std::min(tot * na / n, tot * nb / n) >= min_expected)
            {
                pooled.push_back(acc);
                acc = {0.0, 0.0};
            }
        }
        if (acc.first + acc.second > 0.0)
        {
            if (pooled.empty())
                pooled.push_back(acc);
            else
            {
                pooled.back().first += acc.first;
                pooled.back().second += acc.second;
            }
        }
        GofResult r;
        for (const auto& [ca, cb] : pooled)
        {
            const double tot = ca + cb;
            const double ea = tot * na / n;
            const double eb = tot * nb / n;
            r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
        }
        r.dof = static_cast<int>(pooled.size()) - 1;
        r.p_value = chi_square_sf(r.statistic, r.dof);
        return r;
    }

    GapEstimate covariance_jackknife(const std::vector<double>& f1, const std::vector<double>& f2)
    {
        const std::size_t n = f1.size();
        if (n != f2.size() || n < 2)
            throw ParameterError("covariance_jackknife: need two equal samples of size >= 2");
        double s1 = 0.0;
        double s2 = 0.0;
        double s12 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            s1 += f1[i];
            s2 += f2[i];
            s12 += f1[i] * f2[i];
        }
        const double nn = static_cast<double>(n);
        GapEstimate g;
        g.gap = s12 / nn - (s1 / nn) * (s2 / nn);
        const double m = nn - 1.0;
        std::vector<double> loo(n);
        double mean_loo = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double a = (s1 - f1[i]) / m;
            const double b = (s2 - f2[i]) / m;
            loo[i] = (s12 - f1[i] * f2[i]) / m - a * b;
            mean_loo += loo[i];
        }
        mean_loo /= nn;
        double ss = 0.0;
        for (double v : loo)
            ss += (v - mean_loo) * (v - mean_loo);
        g.stderr_ = std::sqrt(ss * (nn - 1.0) / nn);
        return g;
    }

    double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
    {
        if (x.size() != y.size() || x.size() < 2)
            throw ParameterError("ols_slope: need at least two points");
        const double n = static_cast<double>(x.size());
        double mx = 0.0;
        double my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            mx += x[i];
            my += y[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        if (sxx == 0.0)
            throw NumericalError("ols_slope: degenerate abscissae");
        return sxy / sxx;
    }
} // namespace rwdre
