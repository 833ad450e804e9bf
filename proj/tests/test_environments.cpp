#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "rwdre/csv.hpp"
#include "rwdre/error.hpp"
#include "rwdre/exclusion.hpp"
#include "rwdre/stats.hpp"
#include "rwdre/zero_range.hpp"

using namespace rwdre;

namespace
{
    ZrParams linear_zr(double slope, double rho)
    {
        ZrParams p;
        p.g = RateFunction::linear(slope);
        p.gamma_minus = slope;
        p.gamma_plus = slope;
        p.rho = rho;
        return p;
    }

    // sum_k phi^k / prod_{i<=k} (c i), straight from the definition
    double brute_partition(double phi, double c)
    {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k)
        {
            term *= phi / (c * k);
            sum += term;
        }
        return sum;
    }

    double brute_density(double phi, double c)
    {
        double term = 1.0, sum = 0.0;
        for (int k = 1; k < 200; ++k)
        {
            term *= phi / (c * k);
            sum += k * term;
        }
        return sum / brute_partition(phi, c);
    }

    double poisson_pmf(int k, double m)
    {
        return std::exp(-m + k * std::log(m) - std::lgamma(k + 1.0));
    }

    std::int64_t net_displacement(const EnvTrajectory& t)
    {
        std::int64_t d = 0;
        for (const auto& j : t.jumps())
            d += j.to - j.from;
        return d;
    }
}

TEST_CASE("zr_partition")
{
    CHECK(zr_partition(1.0, linear_zr(1.0, 1.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(zr_partition(0.0, linear_zr(1.0, 1.0)) == 1.0);
    CHECK(std::abs(zr_partition(1.0, linear_zr(2.0, 1.0)) - brute_partition(1.0, 2.0)) < 1e-12);
    CHECK(std::abs(brute_partition(1.0, 2.0) - std::exp(0.5)) < 1e-12);
}

TEST_CASE("zr_density")
{
    CHECK(zr_density(0.7, linear_zr(1.0, 1.0)) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(zr_density(0.0, linear_zr(1.0, 1.0)) == 0.0);
    CHECK(std::abs(zr_density(1.0, linear_zr(2.0, 1.0)) - brute_density(1.0, 2.0)) < 1e-12);
    CHECK(std::abs(brute_density(1.0, 2.0) - 0.5) < 1e-12);
    double prev = -1.0;
    for (double phi = 0.0; phi < 5.0; phi += 0.25)
    {
        const double r = zr_density(phi, linear_zr(1.0, 1.0));
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("zr_fugacity")
{
    const double tol = 1e-10;
    CHECK(std::abs(zr_fugacity(1.3, linear_zr(1.0, 1.3), tol) - 1.3) <= 1e-9);
    const double phi = zr_fugacity(0.5, linear_zr(2.0, 0.5), tol);
    CHECK(std::abs(brute_density(phi, 2.0) - 0.5) <= 1e-9);
    CHECK(std::abs(phi - 1.0) <= 1e-8);
    const double small = zr_fugacity(1e-6, linear_zr(2.0, 1e-6), 1e-15);
    CHECK(small == doctest::Approx(2e-6).epsilon(1e-5));
}

TEST_CASE("ZR1 violation names the offending k")
{
    ZrParams p;
    p.g = RateFunction({0.0, 1.0, 2.0, 5.0, 6.0}, 1.0);
    p.gamma_minus = 1.0;
    p.gamma_plus = 1.0;
    p.rho = 1.0;
    try
    {
        p.validate();
        FAIL("expected a validation error");
    }
    catch (const ValidationError& e)
    {
        CHECK(std::string(e.what()).find("k=3") != std::string::npos);
    }
    CHECK_THROWS_AS(zr_partition(1.0, p), ValidationError);
}

TEST_CASE("rate function extends linearly")
{
    const RateFunction g({0.0, 1.0, 2.5}, 1.5);
    CHECK(g(2) == 2.5);
    CHECK(g(4) == doctest::Approx(5.5));
}

TEST_CASE("zr_sample_initial")
{
    ZrParams z = linear_zr(1.0, 1.0);
    z.phi = 0.0;
    CHECK(zr_sample_initial(z, 0, 1000, 3, 0).total() == 0);

    z.resolve();
    const auto a = zr_sample_initial(z, 0, 100000, 3, 0);
    CHECK(std::abs(static_cast<double>(a.total()) / 1e5 - 1.0) <= 3.0 * std::pow(10.0, -2.5));
    const auto b = zr_sample_initial(z, 0, 100000, 3, 0);
    CHECK(a.values == b.values);

    // one-site marginal against Poisson(1)
    std::vector<std::uint64_t> counts(12, 0);
    for (int v : a.values)
        counts[std::min(v, 11)]++;
    std::vector<double> probs(12);
    double acc = 0.0;
    for (int k = 0; k < 11; ++k)
        acc += probs[k] = poisson_pmf(k, 1.0);
    probs[11] = 1.0 - acc;
    CHECK(chi_square_gof(counts, probs).p_value > 0.001);
}

TEST_CASE("zr_evolve")
{
    ZrParams z = linear_zr(1.0, 1.0);
    z.resolve();
    const SpaceTimeWindow w{0, 20, 0.0, 5.0};

    OccupancyConfig zero{-40, std::vector<int>(100, 0)};
    ZrEvolveOptions o;
    o.buffer = 40;
    CHECK(zr_evolve(zero, 5.0, w, z, 1, 0, o).jumps().empty());

    o.min_buffer = 50;
    CHECK_THROWS_AS(zr_evolve(zero, 5.0, w, z, 1, 0, o), ParameterError);
    o.min_buffer = 0;
    OccupancyConfig empty{0, {}};
    CHECK_THROWS_AS(zr_evolve(empty, 5.0, {0, 1, 0.0, 1.0}, z, 1, 0, o), ParameterError);

    SUBCASE("single particle MSD")
    {
        const double t = 5.0;
        const int n = 10000;
        double sum = 0.0;
        OccupancyConfig one{-60, std::vector<int>(121, 0)};
        one.values[60] = 1;
        ZrEvolveOptions oo;
        oo.buffer = 50;
        for (int r = 0; r < n; ++r)
        {
            const auto tr = zr_evolve(one, t, {-10, 11, 0.0, t}, z, 17, static_cast<std::uint32_t>(r), oo);
            const double d = static_cast<double>(net_displacement(tr));
            sum += d * d;
        }
        const double se = std::sqrt((t + 2.0 * t * t) / n);
        CHECK(std::abs(sum / n - t) <= 3.0 * se);
    }

    SUBCASE("conservation and rate log")
    {
        ZrEvolveOptions oo;
        oo.record_firings = true;
        const auto init = zr_sample_initial(z, -30, 50, 5, 0);
        const auto tr = zr_evolve(init, 5.0, {0, 20, 0.0, 5.0}, z, 5, 0, oo);
        CHECK(tr.occupancy_at(5.0).total() == init.total());
        CHECK(tr.count_in(0, 20, 5.0) - tr.count_in(0, 20, 0.0) == tr.net_inflow(0, 20, 0.0, 5.0));
        REQUIRE(!tr.firings.empty());
        for (const auto& f : tr.firings)
        {
            CHECK(f.occ >= 1);
            CHECK(f.rate == z.g(f.occ));
            if (f.site >= 0 && f.site < 20)
                CHECK(tr.occupation_before(f.site, f.time) == f.occ);
        }
        CHECK_THROWS_AS(tr.occupation_before(25, 1.0), CoverageError);
        CHECK_THROWS_AS(tr.occupation_before(5, 6.0), CoverageError);
    }

    SUBCASE("invariance of the product measure at t=10")
    {
        const int n = 2000;
        std::vector<std::uint64_t> counts(8, 0);
        for (int r = 0; r < n; ++r)
        {
            const auto init = zr_sample_initial(z, -45, 46, 23, static_cast<std::uint32_t>(r));
            ZrEvolveOptions oo;
            oo.buffer = 45;
            const auto tr = zr_evolve(init, 10.0, {0, 1, 0.0, 10.0}, z, 23, static_cast<std::uint32_t>(r), oo);
            counts[std::min(tr.occupation_at(0, 10.0), 7)]++;
        }
        std::vector<double> probs(8);
        double acc = 0.0;
        for (int k = 0; k < 7; ++k)
            acc += probs[k] = poisson_pmf(k, 1.0);
        probs[7] = 1.0 - acc;
        CHECK(chi_square_gof(counts, probs).p_value > 0.01);
    }

    SUBCASE("buffer sensitivity")
    {
        const int n = 400;
        std::vector<double> a(n), b(n);
        for (int r = 0; r < n; ++r)
        {
            const auto rr = static_cast<std::uint32_t>(r);
            const std::int64_t B = zr_default_buffer(z, 5.0);
            ZrEvolveOptions o1, o2;
            o1.buffer = B;
            o2.buffer = 2 * B;
            const auto t1 = zr_evolve(zr_sample_initial(z, -B, 5 + B, 31, rr), 5.0, {0, 5, 0.0, 5.0}, z, 31, rr, o1);
            const auto t2 =
                zr_evolve(zr_sample_initial(z, -2 * B, 5 + 2 * B, 31, rr), 5.0, {0, 5, 0.0, 5.0}, z, 31, rr, o2);
            a[r] = static_cast<double>(t1.count_in(0, 5, 5.0));
            b[r] = static_cast<double>(t2.count_in(0, 5, 5.0));
        }
        const Moments ma = moments(a), mb = moments(b);
        CHECK(std::abs(ma.mean - mb.mean) < std::hypot(ma.se, mb.se) * 3.0);
    }
}

TEST_CASE("asep_sample_initial")
{
    AsepParams p;
    p.rho = 0.0;
    CHECK(asep_sample_initial(p, 0, 1000, 1, 0).total() == 0);
    p.rho = 1.0;
    CHECK(asep_sample_initial(p, 0, 1000, 1, 0).total() == 1000);
    p.rho = 0.4;
    const auto c = asep_sample_initial(p, 0, 100000, 1, 0);
    CHECK(std::abs(static_cast<double>(c.total()) / 1e5 - 0.4) <= 3.0 * std::sqrt(0.24 / 1e5));
    CHECK(c.values == asep_sample_initial(p, 0, 100000, 1, 0).values);
}

TEST_CASE("asep_evolve")
{
    SUBCASE("full lattice never moves")
    {
        AsepParams p;
        p.rho = 1.0;
        const auto init = asep_sample_initial(p, -30, 50, 1, 0);
        AsepEvolveOptions o;
        o.buffer = 30;
        const auto tr = asep_evolve(init, 10.0, {0, 20, 0.0, 10.0}, p, 1, 0, o);
        CHECK(tr.jumps().empty());
        for (std::int64_t x = 0; x < 20; ++x)
            CHECK(tr.occupation_at(x, 10.0) == 1);
    }

    SUBCASE("single particle with p=1")
    {
        AsepParams p;
        p.p = 1.0;
        const int n = 10000;
        double sum = 0.0;
        OccupancyConfig one{-40, std::vector<int>(120, 0)};
        one.values[40] = 1;
        AsepEvolveOptions o;
        o.buffer = 40;
        for (int r = 0; r < n; ++r)
        {
            const auto tr = asep_evolve(one, 10.0, {0, 40, 0.0, 10.0}, p, 3, static_cast<std::uint32_t>(r), o);
            for (const auto& j : tr.jumps())
                CHECK(j.to == j.from + 1);
            sum += static_cast<double>(net_displacement(tr));
        }
        CHECK(std::abs(sum / n - 10.0) <= 3.0 * std::sqrt(10.0 / n));
    }

    SUBCASE("invariance of Bernoulli(1/2) at t=10")
    {
        AsepParams p;
        p.p = 0.5;
        p.rho = 0.5;
        const int n = 2000;
        std::vector<std::uint64_t> counts(2, 0);
        for (int r = 0; r < n; ++r)
        {
            const auto rr = static_cast<std::uint32_t>(r);
            const std::int64_t B = asep_default_buffer(10.0);
            AsepEvolveOptions o;
            o.buffer = B;
            const auto tr = asep_evolve(asep_sample_initial(p, -B, 1 + B, 41, rr), 10.0, {0, 1, 0.0, 10.0}, p, 41, rr, o);
            counts[tr.occupation_at(0, 10.0)]++;
        }
        CHECK(chi_square_gof(counts, {0.5, 0.5}).p_value > 0.01);
    }

    SUBCASE("class labels must be positive")
    {
        AsepParams p;
        p.class_regions = {{-100, 100, 0}};
        CHECK_THROWS_AS(p.validate(), ParameterError);
    }

    SUBCASE("first-class particles ignore higher classes")
    {
        AsepParams with;
        with.p = 0.7;
        with.rho = 0.6;
        with.class_regions = {{-1000, 0, 2}, {0, 1000, 1}};
        AsepEvolveOptions o;
        o.buffer = 30;
        o.record_paths = true;
        for (std::uint32_t r = 0; r < 20; ++r)
        {
            const auto init = asep_sample_initial(with, -30, 50, 9, r);
            OccupancyConfig only = init;
            for (std::int64_t x = only.x_min; x < 0; ++x)
                only.values[static_cast<std::size_t>(x - only.x_min)] = 0;
            const auto a = asep_evolve(init, 8.0, {0, 20, 0.0, 8.0}, with, 9, r, o);
            const auto b = asep_evolve(only, 8.0, {0, 20, 0.0, 8.0}, with, 9, r, o);
            std::map<std::int64_t, const ParticlePath*> pa, pb;
            for (const auto& p : a.particles)
                if (p.cls == 1)
                    pa[p.label] = &p;
            for (const auto& p : b.particles)
                pb[p.label] = &p;
            REQUIRE(pa.size() == pb.size());
            for (const auto& [label, path] : pa)
            {
                REQUIRE(pb.count(label) == 1);
                CHECK(path->times == pb[label]->times);
                CHECK(path->positions == pb[label]->positions);
            }
        }
    }
}

TEST_CASE("asep_assign_classes")
{
    const auto r = asep_assign_classes(100, 0.05);
    REQUIRE(r.size() == 3);
    std::map<int, ClassRegion> by;
    for (const auto& c : r)
        by[c.cls] = c;
    CHECK(by[2].hi == 10);
    CHECK(by[3].lo == 10);
    CHECK(by[3].hi == 30);
    CHECK(by[1].lo == 30);
    CHECK(by[2].lo < -1000000);
    CHECK(by[1].hi > 1000000);
    const auto s = asep_assign_classes(50, 0.1);
    for (const auto& c : s)
        if (c.cls == 3)
            CHECK((c.lo == 10 && c.hi == 30));
    CHECK_THROWS_AS(asep_assign_classes(100, 0.0), ValidationError);
}

TEST_CASE("asep_class_events")
{
    SUBCASE("empty configuration")
    {
        const EnvTrajectory t(OccupancyConfig{-10, std::vector<int>(40, 0)}, {0, 20, 0.0, 30.0}, {});
        const auto e = asep_class_events(t, 100, 20, 2, 10);
        CHECK(e.all());
    }
    SUBCASE("still first-class particle at 3 Delta")
    {
        OccupancyConfig c{0, std::vector<int>(40, 0)};
        c.values[30] = 1;
        EnvTrajectory t(c, {0, 40, 0.0, 30.0}, {});
        t.particles = {ParticlePath{30, 1, {0.0}, {30}}};
        t.has_classes = true;
        CHECK(asep_class_events(t, 100, 20, 2, 10).G1);
    }
    SUBCASE("labels required")
    {
        OccupancyConfig c{0, std::vector<int>(40, 0)};
        c.values[3] = 1;
        const EnvTrajectory t(c, {0, 40, 0.0, 30.0}, {});
        CHECK_THROWS_AS(asep_class_events(t, 100, 20, 2, 10), UsageError);
    }
    SUBCASE("failure probability decreases with dH")
    {
        const double eps = 0.01, s = 2.0, dV = 20.0;
        std::vector<double> fail;
        for (double dH : {100.0, 200.0, 400.0})
        {
            AsepParams p;
            p.p = 0.7;
            p.rho = 0.5;
            p.class_regions = asep_assign_classes(dH, eps);
            const double Delta = 2.0 * eps * dH;
            int bad = 0;
            const int n = 1000;
            for (int r = 0; r < n; ++r)
            {
                const auto rr = static_cast<std::uint32_t>(r);
                const double T = dV + 2.0 * s;
                const std::int64_t B = asep_default_buffer(T);
                const std::int64_t lo = -40, hi = static_cast<std::int64_t>(dH) + 40;
                AsepEvolveOptions o;
                o.buffer = B;
                o.record_paths = true;
                const auto tr = asep_evolve(asep_sample_initial(p, lo - B, hi + B, 77, rr), T, {lo, hi, 0.0, T}, p, 77,
                                            rr, o);
                bad += asep_class_events(tr, dH, dV, s, Delta).all() ? 0 : 1;
            }
            fail.push_back(static_cast<double>(bad) / n);
        }
        MESSAGE("P(G^c) at dH=100,200,400: " << fail[0] << " " << fail[1] << " " << fail[2]);
        CHECK(fail[0] > 0.0);
        CHECK(fail[0] > fail[1]);
        CHECK(fail[1] >= fail[2]);
    }
}

TEST_CASE("trajectory csv")
{
    ZrParams z = linear_zr(1.0, 1.0);
    z.resolve();
    const auto init = zr_sample_initial(z, -10, 20, 2, 0);
    ZrEvolveOptions o;
    o.buffer = 10;
    const auto tr = zr_evolve(init, 2.0, {0, 10, 0.0, 2.0}, z, 2, 0, o);
    const std::string csv = trajectory_csv(tr, false);
    CHECK(csv.rfind("time,site,old_occ,new_occ,class\n", 0) == 0);
    const auto second = csv.substr(csv.find('\n') + 1);
    if (!second.empty())
        CHECK(second.substr(0, second.find('\n')).back() == ',');
    CHECK(csv == trajectory_csv(zr_evolve(init, 2.0, {0, 10, 0.0, 2.0}, z, 2, 0, o), false));
}
