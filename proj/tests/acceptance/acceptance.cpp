#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rwdre/box_events.hpp"
#include "rwdre/config.hpp"
#include "rwdre/curves.hpp"
#include "rwdre/decoupling.hpp"
#include "rwdre/deviation.hpp"
#include "rwdre/error.hpp"
#include "rwdre/parallel.hpp"
#include "rwdre/runner.hpp"
#include "rwdre/stats.hpp"
#include "rwdre/traps.hpp"

using namespace rwdre;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        bool pass;
        std::string detail;
    };

    struct Criterion
    {
        std::string name;
        double budget_s;
        std::function<Outcome(const fs::path&)> run;
    };

    std::string fmt(double x)
    {
        std::ostringstream ss;
        ss.precision(4);
        ss << x;
        return ss.str();
    }

    void save(const fs::path& dir, const std::string& name, const std::string& text)
    {
        fs::create_directories(dir);
        std::ofstream(dir / name, std::ios::binary) << text;
    }

    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    EnvSpec asep(double p, double rho)
    {
        EnvSpec e;
        e.kind = EnvKind::asep;
        e.asep.p = p;
        e.asep.rho = rho;
        e.prepare();
        return e;
    }

    EnvSpec zrp(double rho)
    {
        EnvSpec e;
        e.kind = EnvKind::zeroRange;
        e.zr.g = RateFunction::linear(1.0);
        e.zr.rho = rho;
        e.prepare();
        return e;
    }

    RateModel nonnestling()
    {
        RateModel r;
        r.alpha = {3.0, 2.0};
        r.beta = {0.5, 0.5};
        r.Lambda = 4.0;
        return r;
    }

    Experiment experiment(const EnvSpec& env, const RateModel& r, std::uint64_t seed)
    {
        Experiment ex;
        ex.env = env;
        ex.rates = r;
        ex.seed = seed;
        ex.partitions = 8;
        return ex;
    }

    Outcome lln(const fs::path& out)
    {
        const auto c = lln_curve(experiment(EnvSpec{}, RateModel::constant(0.8, 0.2, 1.0), 1001), {10.0, 100.0, 1000.0},
                                 0.05, 500);
        save(out, "lln.csv", lln_csv(c));
        const double se = c.rows.back().se;
        return {std::abs(c.v_hat - 0.6) <= 3.0 * se, "v_hat " + fmt(c.v_hat) + ", se " + fmt(se)};
    }

    Outcome coupling(const fs::path&)
    {
        struct Model
        {
            EnvSpec env;
            RateModel rates;
        };
        RateModel zr_rates;
        zr_rates.alpha = {0.2, 0.6, 0.8};
        zr_rates.beta = {0.6, 0.3, 0.1};
        zr_rates.Lambda = 1.0;
        const std::vector<Model> models{{asep(0.7, 0.5), nonnestling()}, {zrp(1.0), zr_rates}};
        const double T = 20.0;
        std::uint64_t violations = 0, checks = 0;
        for (std::size_t m = 0; m < models.size(); ++m)
        {
            const auto res = parallel_map(500, [&](std::uint64_t i) {
                const std::int64_t gap = static_cast<std::int64_t>(i % 4);
                const StartPoint y2{0, 0.0}, y1{gap, 0.0};
                Realization R(2001 + m, static_cast<std::uint32_t>(i), models[m].env, models[m].rates,
                              {{y2, T}, {y1, T}});
                const auto a = R.walk(y1, T);
                const auto b = R.walk(y2, T);
                std::pair<std::uint64_t, std::uint64_t> r{0, 0};
                for (const auto* p : {&a, &b})
                    for (const auto& j : p->jumps)
                    {
                        ++r.second;
                        r.first += a.position_at(j.time) < b.position_at(j.time) ? 1 : 0;
                    }
                return r;
            });
            for (const auto& r : res)
            {
                violations += r.first;
                checks += r.second;
            }
        }
        return {violations == 0, "1000 pairs, " + std::to_string(checks) + " event times, " +
                                     std::to_string(violations) + " violations"};
    }

    Outcome domination(const fs::path&)
    {
        const EnvSpec env = asep(0.7, 0.5);
        const RateModel r = nonnestling();
        const auto bad = parallel_map(10000, [&](std::uint64_t i) {
            const StartPoint y{static_cast<std::int64_t>(i % 7) - 3, 0.5 * static_cast<double>(i % 3)};
            Realization R(3001, static_cast<std::uint32_t>(i), env, r, {{y, 10.0}});
            const auto p = R.walk(y, 10.0);
            int b = 0;
            for (double s : {1.0, 2.5, 5.0, 10.0})
                b += p.max_excursion(s) <= dominating_count(y, s, R.noise()) ? 0 : 1;
            return b;
        });
        const auto failures = std::count_if(bad.begin(), bad.end(), [](int b) { return b > 0; });
        return {failures == 0, "10000 pairs, " + std::to_string(failures) + " failures"};
    }

    Outcome invariant(const fs::path&)
    {
        const int n = 2000;
        const int sites = 5;
        const double T = 10.0;
        double worst = 1.0;
        std::string detail;
        for (int model = 0; model < 2; ++model)
        {
            const EnvSpec env = model == 0 ? zrp(1.0) : asep(0.7, 0.5);
            const auto occ = parallel_map(n, [&](std::uint64_t i) {
                const auto e = make_environment(env, 4001 + model, static_cast<std::uint32_t>(i), -2, 3, T);
                const auto* tr = dynamic_cast<const EnvTrajectory*>(e.get());
                std::vector<int> v;
                for (std::int64_t x = -2; x <= 2; ++x)
                    v.push_back(tr->occupation_at(x, T));
                return v;
            });
            for (int s = 0; s < sites; ++s)
            {
                std::vector<double> probs;
                std::vector<std::uint64_t> counts;
                if (model == 0)
                {
                    counts.assign(8, 0);
                    double acc = 0.0;
                    for (int k = 0; k < 7; ++k)
                    {
                        probs.push_back(std::exp(-1.0 - std::lgamma(k + 1.0)));
                        acc += probs.back();
                    }
                    probs.push_back(1.0 - acc);
                    for (const auto& v : occ)
                        counts[static_cast<std::size_t>(std::min(v[static_cast<std::size_t>(s)], 7))]++;
                }
                else
                {
                    counts.assign(2, 0);
                    probs = {0.5, 0.5};
                    for (const auto& v : occ)
                        counts[static_cast<std::size_t>(v[static_cast<std::size_t>(s)])]++;
                }
                const double p = std::min(1.0, sites * chi_square_gof(counts, probs).p_value);
                worst = std::min(worst, p);
            }
            detail += (model == 0 ? "ZRP" : " ASEP");
        }
        return {worst > 0.01, detail + ": smallest Bonferroni-adjusted p-value " + fmt(worst)};
    }

    Outcome chernoff(const fs::path&)
    {
        int ok = 0, total = 0;
        for (double lambda : {0.5, 1.0, 2.0, 5.0})
            for (int u = 1; u <= 20; ++u)
            {
                ++total;
                ok += exact_poisson_tail(lambda, u) <= poisson_chernoff(lambda, u) ? 1 : 0;
            }
        return {ok == 80 && total == 80, std::to_string(ok) + "/" + std::to_string(total) + " grid points"};
    }

    Outcome cascading(const fs::path&)
    {
        const auto sc = build_scales(10, 0.5, 1.25, 1, false);
        const BoxIndex m{1.0, 1, 0.0, 0.0};
        struct Model
        {
            EnvSpec env;
            RateModel rates;
            CascadeParams p;
        };
        const std::vector<Model> models{
            {EnvSpec{}, RateModel::constant(1.0, 0.0, 1.0), CascadeParams{0.2, 0.4, 0.05, {}}},
            {asep(0.7, 0.5), nonnestling(), CascadeParams{1.5, 2.5, 1.2, {}}},
        };
        std::map<std::string, int> kinds;
        int valid = 0, total = 0;
        for (std::size_t k = 0; k < models.size(); ++k)
        {
            const auto& md = models[k];
            const auto res = parallel_map(500, [&](std::uint64_t i) -> std::string {
                try
                {
                    Realization R(5001 + k, static_cast<std::uint32_t>(i), md.env, md.rates,
                                  cascade_requests(m, sc, md.rates.lambda()));
                    const auto c = classify_cascading(m, sc, R, md.p);
                    return verify_cascading(c, m, sc, R, md.p) ? to_string(c.kind) : "unverified";
                }
                catch (const InvariantViolation&)
                {
                    return "none";
                }
            });
            for (const auto& s : res)
            {
                ++total;
                ++kinds[s];
                valid += (s != "unverified" && s != "none") ? 1 : 0;
            }
        }
        std::string d;
        for (const auto& [k, v] : kinds)
            d += k + "=" + std::to_string(v) + " ";
        return {valid == total && total == 1000, d + "(" + std::to_string(valid) + "/" + std::to_string(total) + " valid)"};
    }

    Outcome threat(const fs::path& out)
    {
        const std::vector<EnvSpec> envs{asep(0.7, 0.5), asep(0.5, 0.3), asep(0.9, 0.7)};
        const RateModel r = nonnestling();
        const auto p = TrapParams::derived(10.0, 3, 1.6, 2.8);
        std::uint64_t threatened = 0, speedup = 0, delay = 0, failures = 0;
        std::uint32_t next = 0;
        const std::uint64_t batch = 400;
        while (threatened < 1000 && next < 200000)
        {
            const auto res = parallel_map(batch, [&](std::uint64_t i) {
                const auto rep = next + static_cast<std::uint32_t>(i);
                const EnvSpec& env = envs[rep % envs.size()];
                Realization R(6001, rep, env, r, threat_requests({0, 0.0}, p));
                try
                {
                    const auto d = verify_threat_dichotomy({0, 0.0}, p, R);
                    if (!d.threat.threatened)
                        return 0;
                    return d.kind == Dichotomy::speedup ? 1 : 2;
                }
                catch (const InvariantViolation&)
                {
                    return 3;
                }
            });
            next += static_cast<std::uint32_t>(batch);
            for (int k : res)
            {
                if (k == 0 || threatened >= 1000)
                    continue;
                ++threatened;
                speedup += k == 1 ? 1 : 0;
                delay += k == 2 ? 1 : 0;
                failures += k == 3 ? 1 : 0;
            }
        }
        std::ostringstream csv;
        csv << "threatened,speedup,delay,failures,realizations\n"
            << threatened << "," << speedup << "," << delay << "," << failures << "," << next << "\n";
        save(out, "traps.csv", csv.str());
        return {threatened == 1000 && failures == 0,
                std::to_string(threatened) + " threatened starts: speedup " + std::to_string(speedup) + ", delay " +
                    std::to_string(delay) + ", neither " + std::to_string(failures)};
    }

    Outcome decoupling(const fs::path& out)
    {
        DecouplingParams p;
        p.v_circ = 1.5;
        p.c2 = 2.0;
        p.c3 = 5.0;
        p.C_circ = 1.0;
        p.kappa_circ = 0.1;
        p.gamma_circ = 1.5;
        const double s = 1.0;
        std::vector<DecouplingResult> rows;
        for (double dH : {50.0, 100.0, 200.0})
        {
            const double dV = std::max(0.0, (dH - p.c2 * s - p.c3) / p.v_circ);
            const LeftStrip B1{0.0, 0.0, s};
            const RightStrip B2{dH, s + dV, s};
            const auto xh = static_cast<std::int64_t>(dH);
            const BoxFunctional f1{FunctionalKind::occupationAtLeast, 0, 1, s, s, 1};
            const BoxFunctional f2{FunctionalKind::occupationAtLeast, xh, xh + 1, s + dV, s + dV, 1};
            auto r = decoupling_gap(asep(0.7, 0.5), B1, B2, f1, f2, p, 4000, 7001);
            r.f1.clear();
            r.f2.clear();
            rows.push_back(std::move(r));
        }
        save(out, "decoupling.csv", decoupling_csv(rows));
        bool ok = true;
        std::string d;
        for (std::size_t k = 0; k < rows.size(); ++k)
        {
            const auto& r = rows[k];
            ok = ok && r.condition_ok && r.gap <= r.bound;
            if (k > 0)
            {
                const auto& q = rows[k - 1];
                const double tol = 3.0 * std::sqrt(q.stderr_ * q.stderr_ + r.stderr_ * r.stderr_);
                ok = ok && std::max(r.gap, 0.0) <= std::max(q.gap, 0.0) + tol;
            }
            d += "dH=" + fmt(r.dH) + " gap " + fmt(r.gap) + " (se " + fmt(r.stderr_) + ", bound " + fmt(r.bound) + ") ";
        }
        return {ok, d};
    }

    Outcome bracket(const fs::path& out)
    {
        const auto ex = experiment(asep(0.7, 0.9), nonnestling(), 8001);
        const auto b = estimate_speed_bracket(ex, {50.0, 100.0, 200.0}, make_grid(0.0, 8.0, 0.05), 1000);
        save(out, "p_h.csv", ph_csv(b.curves));
        const double lo = drift_margin(ex.rates, default_probes(ex.rates)).margin - 0.3;
        const double hi = ex.rates.lambda();
        bool ok = b.conclusive;
        std::string d;
        std::optional<double> prev;
        for (const auto& r : b.rows)
        {
            if (!r.conclusive)
            {
                ok = false;
                d += "H=" + fmt(r.H) + " inconclusive ";
                continue;
            }
            const double w = *r.v_plus_hat - *r.v_minus_hat;
            ok = ok && *r.v_minus_hat <= *r.v_plus_hat;
            if (prev)
                ok = ok && w <= *prev + 1e-9;
            prev = w;
            d += "H=" + fmt(r.H) + " [" + fmt(*r.v_minus_hat) + ", " + fmt(*r.v_plus_hat) + "] ";
        }
        // the reported bracket is the one at the largest H
        if (!b.v_minus_hat || !b.v_plus_hat)
            return {false, d + "no reported bracket"};
        ok = ok && *b.v_minus_hat >= lo - 1e-9 && *b.v_plus_hat <= hi + 1e-9;
        return {ok, d + "reported [" + fmt(*b.v_minus_hat) + ", " + fmt(*b.v_plus_hat) + "] vs [" + fmt(lo) + ", " +
                        fmt(hi) + "]"};
    }

    Outcome ballisticity(const fs::path& out)
    {
        BallisticityParams bp;
        bp.v_star = 1.2;
        const auto rows = ballisticity_curve(experiment(asep(0.7, 0.9), nonnestling(), 9001), bp,
                                             {25.0, 50.0, 100.0, 200.0}, 10000);
        save(out, "ballisticity.csv", ballisticity_csv(rows));
        bool ok = rows.back().p.p_hat < 0.01;
        std::string d;
        for (std::size_t k = 0; k < rows.size(); ++k)
        {
            if (k > 0)
                ok = ok && rows[k].p.p_hat < rows[k - 1].p.p_hat;
            d += "t=" + fmt(rows[k].t) + ": " + fmt(rows[k].p.p_hat) + " ";
        }
        return {ok, d};
    }

    Outcome reproducibility(const fs::path& out)
    {
        const std::string base = R"([run]
seed = 17
replicas = 4
samples = 200
[environment]
kind = asep
p = 0.7
rho = 0.5
[rates]
alpha_per_s = 3, 2
beta_per_s = 0.5
Lambda_per_s = 4
[lln]
t_grid_s = 5, 20, 50
epsilon_sps = 0.2
[estimate_ph]
H_s = 20
v_min_sps = 0
v_max_sps = 5
v_step_sps = 0.25
[ballisticity]
v_star_sps = 1.2
t_grid_s = 10, 20
[decoupling]
d_h_sites = 30
s_s = 1
v_circ_sps = 1.5
c2 = 2
c3_sites = 5
)";
        const std::vector<std::string> subs{"lln", "estimate-ph", "ballisticity", "decoupling"};
        int same = 0, total = 0;
        for (const auto& sub : subs)
        {
            std::vector<fs::path> dirs;
            for (int rep = 0; rep < 2; ++rep)
            {
                auto cfg = parse_config(base);
                cfg.output_dir = (out / "repro" / (sub + "_" + std::to_string(rep))).string();
                if (rep == 1)
                    cfg.replicas = 1;
                run_subcommand(sub, cfg);
                dirs.emplace_back(cfg.output_dir);
            }
            for (const auto& e : fs::directory_iterator(dirs[0]))
            {
                if (e.path().extension() != ".csv")
                    continue;
                ++total;
                same += slurp(e.path()) == slurp(dirs[1] / e.path().filename()) ? 1 : 0;
            }
        }
        return {same == total && total > 0, std::to_string(same) + "/" + std::to_string(total) + " CSVs identical"};
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"acceptance checks"};
    std::string only;
    std::string out = "acceptance_out";
    app.add_option("--only", only, "run a single criterion");
    app.add_option("--out", out, "directory for CSV artifacts");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {"lln", 60, lln},
        {"monotone_coupling", 60, coupling},
        {"poisson_domination", 60, domination},
        {"invariant_measures", 300, invariant},
        {"chernoff_grid", 1, chernoff},
        {"cascading_trichotomy", 300, cascading},
        {"threat_dichotomy", 300, threat},
        {"decoupling_decay", 600, decoupling},
        {"speed_bracket", 900, bracket},
        {"ballisticity_decay", 300, ballisticity},
        {"reproducibility", 300, reproducibility},
    };
    int failed = 0, ran = 0;
    for (const auto& c : all)
    {
        if (!only.empty() && c.name != only)
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try
        {
            o = c.run(fs::path(out));
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt(secs) << " s, budget "
                  << c.budget_s << " s]" << std::endl;
        failed += pass ? 0 : 1;
    }
    if (ran == 0)
    {
        std::cerr << "unknown criterion: " << only << "\n";
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
