#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rwdre
{
    struct ScaleLevel
    {
        std::int64_t L;
        std::int64_t ell; // floor(L^nu)
    };

    struct ScaleSequence
    {
        std::int64_t L0 = 2;
        double nu = 0.5;
        double gamma = 1.25;
        bool strict = false;
        std::vector<ScaleLevel> levels;
        std::vector<std::string> warnings;
        // min_k L_{k+1} / L_k^{1+nu}; the upper sandwich constant is 1
        double sandwich_lower = 1.0;

        std::int64_t L(int k) const;
        std::int64_t ell(int k) const;
        int depth() const { return static_cast<int>(levels.size()) - 1; }
    };

    double nu_constraint_value(double nu, double gamma); // 6 (1+nu)^{3 gamma}
    bool nu_constraint_holds(double nu, double gamma);

    // floor(L^nu) computed exactly for integer L.
    std::int64_t floor_power(std::int64_t L, double nu);

    ScaleSequence build_scales(std::int64_t L0, double nu, double gamma, int k_max, bool strict);
} // namespace rwdre
