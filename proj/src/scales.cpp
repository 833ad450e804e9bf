#include "rwdre/scales.hpp"

#include <cmath>
#include <limits>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"

namespace rwdre
{
    std::int64_t ScaleSequence::L(int k) const
    {
        if (k < 0 || k > depth())
            throw ParameterError("scales: level " + std::to_string(k) + " not built");
        return levels[static_cast<std::size_t>(k)].L;
    }

    std::int64_t ScaleSequence::ell(int k) const
    {
        if (k < 0 || k > depth())
            throw ParameterError("scales: level " + std::to_string(k) + " not built");
        return levels[static_cast<std::size_t>(k)].ell;
    }

    double nu_constraint_value(double nu, double gamma)
    {
        return 6.0 * std::pow(1.0 + nu, 3.0 * gamma);
    }

    bool nu_constraint_holds(double nu, double gamma)
    {
        return nu_constraint_value(nu, gamma) <= 7.0;
    }

    std::int64_t floor_power(std::int64_t L, double nu)
    {
        const long double Ld = static_cast<long double>(L);
        auto l = static_cast<std::int64_t>(std::floor(std::pow(Ld, static_cast<long double>(nu))));
        if (l < 1)
            l = 1;
        // l = floor(L^nu) iff l^(1/nu) <= L < (l+1)^(1/nu)
        const long double inv = 1.0L / static_cast<long double>(nu);
        while (std::pow(static_cast<long double>(l + 1), inv) <= Ld)
            ++l;
        while (l > 1 && std::pow(static_cast<long double>(l), inv) > Ld)
            --l;
        return l;
    }

    ScaleSequence build_scales(std::int64_t L0, double nu, double gamma, int k_max, bool strict)
    {
        if (L0 < 2)
            throw ParameterError("scales: L0 must be >= 2");
        if (!(nu > 0.0 && nu < 1.0))
            throw ParameterError("scales: nu must lie in (0,1)");
        if (!(gamma > 1.0))
            throw ParameterError("scales: gamma must be > 1");
        if (k_max < 0)
            throw ParameterError("scales: k_max must be non-negative");
        ScaleSequence seq;
        seq.L0 = L0;
        seq.nu = nu;
        seq.gamma = gamma;
        seq.strict = strict;
        const double c = nu_constraint_value(nu, gamma);
        if (c > 7.0)
        {
            const std::string msg = "nu-constraint 6(1+nu)^(3 gamma) <= 7 fails: value " + format_double(c);
            if (strict)
                throw ValidationError("scales: " + msg);
            seq.warnings.push_back("desk scales: " + msg);
        }
        std::int64_t L = L0;
        for (int k = 0; k <= k_max; ++k)
        {
            const std::int64_t ell = floor_power(L, nu);
            seq.levels.push_back({L, ell});
            if (ell == 1)
            {
                const std::string msg = "scales stagnate at level " + std::to_string(k) + " (ell = 1)";
                if (strict)
                    throw ValidationError("scales: " + msg);
                seq.warnings.push_back(msg);
            }
            if (k == k_max)
                break;
            if (L > std::numeric_limits<std::int64_t>::max() / ell)
                throw ParameterError("scales: L_" + std::to_string(k + 1) + " overflows 64 bits");
            const std::int64_t next = ell * L;
            const double ratio = static_cast<double>(next) / std::pow(static_cast<double>(L), 1.0 + nu);
            if (next < L || ratio > 1.0 + 1e-12)
                throw InvariantViolation("scales: sandwich L_k <= L_{k+1} <= L_k^{1+nu} broken");
            seq.sandwich_lower = std::min(seq.sandwich_lower, ratio);
            L = next;
        }
        return seq;
    }
} // namespace rwdre
