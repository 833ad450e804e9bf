#include "rwdre/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "rwdre/csv.hpp"
#include "rwdre/curves.hpp"
#include "rwdre/decoupling.hpp"
#include "rwdre/deviation.hpp"
#include "rwdre/exclusion.hpp"
#include "rwdre/parallel.hpp"
#include "rwdre/scales.hpp"
#include "rwdre/traps.hpp"

#ifndef RWDRE_VERSION
#define RWDRE_VERSION "dev"
#endif

namespace rwdre
{
    using nlohmann::json;

    std::string sha256_hex(std::string_view data)
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
            throw NumericalError("sha256 failed");
        static const char* hex = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i)
        {
            out.push_back(hex[md[i] >> 4]);
            out.push_back(hex[md[i] & 15]);
        }
        return out;
    }

    namespace
    {
        struct Context
        {
            const ExperimentConfig& cfg;
            ConfigView c;
            std::filesystem::path dir;
            std::vector<std::pair<std::string, std::string>> files; // name, sha
            std::vector<std::string> warnings;
            json summary = json::object();

            void emit(const std::string& name, const std::string& content)
            {
                write_file((dir / name).string(), content);
                files.emplace_back(name, sha256_hex(content));
            }

            Experiment experiment() const
            {
                return Experiment{cfg.env, cfg.rates, cfg.seed, cfg.replicas, 0};
            }
        };

        std::vector<double> v_grid(const ConfigView& c, const std::string& sec)
        {
            if (c.has(sec + ".v_sps"))
                return c.list(sec + ".v_sps");
            return make_grid(c.num(sec + ".v_min_sps"), c.num(sec + ".v_max_sps"), c.num(sec + ".v_step_sps"));
        }

        std::uint32_t replica_of(const ConfigView& c, const std::string& key)
        {
            const auto r = c.integer(key, 0);
            if (r < 0 || r > 0xffffffffll)
                throw ConfigError(key, "must be a 32-bit non-negative integer");
            return static_cast<std::uint32_t>(r);
        }

        void run_simulate_env(Context& ctx)
        {
            const auto& c = ctx.c;
            const auto x_min = c.integer("simulate_env.x_min_sites");
            const auto x_max = c.integer("simulate_env.x_max_sites");
            const double T = c.num("simulate_env.horizon_s");
            if (x_min >= x_max)
                throw ConfigError("simulate_env.x_max_sites", "must exceed x_min_sites");
            if (!(T > 0.0))
                throw ConfigError("simulate_env.horizon_s", "must be positive");
            EnvSpec spec = ctx.cfg.env;
            bool classes = false;
            if (c.has("simulate_env.class_d_h_sites"))
            {
                if (spec.kind != EnvKind::asep)
                    throw ConfigError("simulate_env.class_d_h_sites", "classes need the asep environment");
                spec.asep.class_regions =
                    asep_assign_classes(c.num("simulate_env.class_d_h_sites"), c.num("simulate_env.class_epsilon"));
                spec.record_paths = true;
                classes = true;
            }
            const auto rep = replica_of(c, "simulate_env.replica");
            if (spec.kind == EnvKind::constant)
            {
                ctx.warnings.push_back("constant environment: trajectory has no events");
                ctx.emit("trajectory.csv", "time,site,old_occ,new_occ,class\n");
                return;
            }
            const auto env = make_environment(spec, ctx.cfg.seed, rep, x_min, x_max, T);
            const auto* traj = dynamic_cast<const EnvTrajectory*>(env.get());
            ctx.emit("trajectory.csv", trajectory_csv(*traj, classes));
            ctx.summary["events"] = traj->jumps().size();
            ctx.summary["buffer_sites"] = traj->buffer_width();
        }

        void run_walk_cmd(Context& ctx)
        {
            const auto& c = ctx.c;
            const StartPoint y{c.integer("walk.x0_sites", 0), c.num("walk.t0_s", 0.0)};
            const double T = c.num("walk.horizon_s");
            if (!(T > 0.0))
                throw ConfigError("walk.horizon_s", "must be positive");
            if (!(y.t0 >= 0.0))
                throw ConfigError("walk.t0_s", "must be non-negative");
            Realization R(ctx.cfg.seed, replica_of(c, "walk.replica"), ctx.cfg.env, ctx.cfg.rates, {{y, T}});
            const WalkPath w = R.walk(y, T);
            ctx.emit("path.csv", path_csv(w));
            ctx.summary["final_position"] = w.final_position();
            ctx.summary["jumps"] = w.jumps.size();
        }

        std::string p_tilde_csv(const std::vector<PhRow>& rows)
        {
            std::vector<PhRow> t = rows;
            for (auto& r : t)
                r.p = r.p_tilde;
            return ph_csv(t);
        }

        void run_estimate_ph(Context& ctx)
        {
            const double H = ctx.c.num("estimate_ph.H_s");
            const auto rows = estimate_ph(ctx.experiment(), H, v_grid(ctx.c, "estimate_ph"), ctx.cfg.samples);
            ctx.emit("p_h.csv", ph_csv(rows));
            ctx.emit("p_tilde_h.csv", p_tilde_csv(rows));
        }

        void run_speed_bracket(Context& ctx)
        {
            const auto Hs = ctx.c.list("speed_bracket.H_s");
            const auto b = estimate_speed_bracket(ctx.experiment(), Hs, v_grid(ctx.c, "speed_bracket"), ctx.cfg.samples);
            ctx.emit("p_h.csv", ph_csv(b.curves));
            ctx.emit("p_tilde_h.csv", p_tilde_csv(b.curves));
            CsvWriter w({"H", "v_minus_hat", "v_plus_hat", "conclusive"});
            for (const auto& r : b.rows)
            {
                w.cell(r.H);
                r.v_minus_hat ? w.cell(*r.v_minus_hat) : w.empty();
                r.v_plus_hat ? w.cell(*r.v_plus_hat) : w.empty();
                w.cell(r.conclusive ? 1 : 0).end_row();
            }
            ctx.emit("speed_bracket.csv", w.str());
            if (!b.conclusive)
                ctx.warnings.push_back("speed bracket inconclusive at the largest H: grid does not bracket the 0.5 crossing");
            ctx.summary["threshold"] = b.threshold;
        }

        void run_decoupling(Context& ctx)
        {
            const auto& c = ctx.c;
            DecouplingParams p;
            p.v_circ = c.num("decoupling.v_circ_sps", p.v_circ);
            p.kappa_circ = c.num("decoupling.kappa_circ", p.kappa_circ);
            p.C_circ = c.num("decoupling.C_circ", p.C_circ);
            p.c2 = c.num("decoupling.c2", p.c2);
            p.c3 = c.num("decoupling.c3_sites", p.c3);
            p.gamma_circ = c.num("decoupling.gamma_circ", p.gamma_circ);
            p.validate();
            const double s = c.num("decoupling.s_s", 1.0);
            const auto width = c.integer("decoupling.width_sites", 1);
            const auto threshold = c.integer("decoupling.threshold", 1);
            if (width < 1)
                throw ConfigError("decoupling.width_sites", "must be >= 1");
            const std::string kind = c.str("decoupling.functional", "occupation");
            FunctionalKind fk;
            if (kind == "occupation")
                fk = FunctionalKind::occupationAtLeast;
            else if (kind == "jump_count")
                fk = FunctionalKind::jumpCountAtLeast;
            else if (kind == "noise_count")
                fk = FunctionalKind::noiseCountAtLeast;
            else
                throw ConfigError("decoupling.functional", "unknown functional '" + kind + "'");
            const auto dHs = c.list("decoupling.d_h_sites");
            std::vector<DecouplingResult> rows;
            for (std::size_t k = 0; k < dHs.size(); ++k)
            {
                const double dH = dHs[k];
                const double dV = c.has("decoupling.d_v_s") ? c.num("decoupling.d_v_s")
                                                            : std::max(0.0, (dH - p.c2 * s - p.c3) / p.v_circ);
                const LeftStrip B1{0.0, 0.0, s};
                const RightStrip B2{dH, s + dV, s};
                BoxFunctional f1{fk, 1 - width, 1, 0.0, s, threshold};
                BoxFunctional f2{fk, static_cast<std::int64_t>(std::ceil(dH)), static_cast<std::int64_t>(std::ceil(dH)) + width,
                                 s + dV, 2.0 * s + dV, threshold};
                if (fk == FunctionalKind::occupationAtLeast)
                {
                    f1.t_lo = f1.t_hi = s;
                    f2.t_lo = f2.t_hi = s + dV;
                }
                const auto r = decoupling_gap(ctx.cfg.env, B1, B2, f1, f2, p, ctx.cfg.samples, ctx.cfg.seed,
                                              ctx.cfg.rates.Lambda, static_cast<std::uint32_t>(k * ctx.cfg.samples));
                if (!r.condition_ok)
                    ctx.warnings.push_back("distance condition fails at d_h=" + format_double(dH));
                rows.push_back(r);
            }
            ctx.emit("decoupling.csv", decoupling_csv(rows));
        }

        void run_traps(Context& ctx)
        {
            const auto& c = ctx.c;
            TrapParams p;
            p.K = c.num("traps.K_s");
            p.r = static_cast<int>(c.integer("traps.r", 1));
            p.v_minus = c.num("traps.v_minus_sps");
            p.v_plus = c.num("traps.v_plus_sps");
            p.theta = c.num("traps.theta_sps", (p.v_plus - p.v_minus) / 6.0);
            p.validate();
            const auto n = ctx.cfg.samples;
            struct Row
            {
                DichotomyResult d;
            };
            const auto rows = parallel_map(
                n,
                [&](std::uint64_t i) {
                    const StartPoint y{0, 0.0};
                    Realization R(ctx.cfg.seed, static_cast<std::uint32_t>(i), ctx.cfg.env, ctx.cfg.rates,
                                  threat_requests(y, p));
                    return Row{verify_threat_dichotomy(y, p, R)};
                },
                ctx.cfg.replicas);
            CsvWriter w({"replica", "threatened", "j", "outcome", "displacement"});
            std::uint64_t threatened = 0;
            bool empty = false;
            for (std::uint64_t i = 0; i < n; ++i)
            {
                const auto& d = rows[i].d;
                empty = empty || d.threat.empty_interval;
                threatened += d.threat.threatened ? 1 : 0;
                w.cell(i).cell(d.threat.threatened ? 1 : 0);
                d.threat.j ? w.cell(*d.threat.j) : w.empty();
                w.cell(to_string(d.kind));
                d.threat.threatened ? w.cell(d.displacement) : w.empty();
                w.end_row();
            }
            if (empty)
                ctx.warnings.push_back("trap interval [theta K, 2 theta K] holds no lattice point for some anchor");
            ctx.emit("traps.csv", w.str());
            ctx.summary["threatened"] = threatened;
        }

        void run_ballisticity(Context& ctx)
        {
            const auto& c = ctx.c;
            BallisticityParams b;
            b.v_star = c.num("ballisticity.v_star_sps");
            b.kappa_star = c.num("ballisticity.kappa_star", b.kappa_star);
            b.C_star = c.num("ballisticity.C_star", b.C_star);
            b.gamma_star = c.num("ballisticity.gamma_star", b.gamma_star);
            const auto rows = ballisticity_curve(ctx.experiment(), b, c.list("ballisticity.t_grid_s"), ctx.cfg.samples);
            ctx.emit("ballisticity.csv", ballisticity_csv(rows));
        }

        void run_lln(Context& ctx)
        {
            const auto cur = lln_curve(ctx.experiment(), ctx.c.list("lln.t_grid_s"), ctx.c.num("lln.epsilon_sps", 0.05),
                                       ctx.cfg.samples);
            ctx.emit("lln.csv", lln_csv(cur));
            ctx.summary["v_hat"] = cur.v_hat;
        }

        void run_deviation(Context& ctx)
        {
            const auto& c = ctx.c;
            const auto f = submartingale_deviation_fit(ctx.experiment(), c.num("deviation.u_drift_sps"),
                                                       c.num("deviation.epsilon_sps"), c.list("deviation.t_grid_s"),
                                                       ctx.cfg.samples);
            ctx.emit("deviation.csv", deviation_csv(f));
            ctx.summary["monotone"] = f.monotone;
            ctx.summary["strictly_decreasing"] = f.strictly_decreasing;
            ctx.summary["fit_status"] = f.status == FitStatus::ok ? "ok" : "inconclusive";
            ctx.summary["slope"] = f.slope_estimate;
        }

        const std::map<std::string, std::function<void(Context&)>>& table()
        {
            static const std::map<std::string, std::function<void(Context&)>> t{
                {"simulate-env", run_simulate_env}, {"walk", run_walk_cmd},
                {"estimate-ph", run_estimate_ph},   {"speed-bracket", run_speed_bracket},
                {"decoupling", run_decoupling},     {"traps", run_traps},
                {"ballisticity", run_ballisticity}, {"lln", run_lln},
                {"deviation", run_deviation},
            };
            return t;
        }
    } // namespace

    const std::vector<std::string>& subcommands()
    {
        static const std::vector<std::string> names = [] {
            std::vector<std::string> v;
            for (const auto& [k, _] : table())
                v.push_back(k);
            return v;
        }();
        return names;
    }

    RunOutput run_subcommand(const std::string& name, const ExperimentConfig& cfg)
    {
        const auto it = table().find(name);
        if (it == table().end())
            throw UsageError("unknown subcommand '" + name + "'");
        const auto started = std::chrono::system_clock::now();
        const auto t0 = std::chrono::steady_clock::now();
        Context ctx{cfg, cfg.view(), cfg.output_dir, {}, {}, json::object()};
        std::filesystem::create_directories(ctx.dir);
        if (ctx.c.has("scales"))
        {
            const auto seq = build_scales(ctx.c.integer("scales.L0"), ctx.c.num("scales.nu"),
                                          ctx.c.num("scales.gamma", 1.25),
                                          static_cast<int>(ctx.c.integer("scales.k_max", 2)), cfg.strict_scales);
            ctx.warnings.insert(ctx.warnings.end(), seq.warnings.begin(), seq.warnings.end());
        }
        it->second(ctx);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        json m;
        m["artifact"] = "rwdre";
        m["version"] = RWDRE_VERSION;
        m["subcommand"] = name;
        std::ostringstream eff;
        eff << cfg.source << "\n#effective seed=" << cfg.seed << " replicas=" << cfg.replicas
            << " strict_scales=" << cfg.strict_scales;
        m["config_sha256"] = sha256_hex(eff.str());
        m["config_path"] = cfg.origin;
        m["seed"] = cfg.seed;
        m["replicas"] = cfg.replicas;
        m["samples"] = cfg.samples;
        m["environment"] = to_string(cfg.env.kind);
        const std::time_t tt = std::chrono::system_clock::to_time_t(started);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
        m["started_utc"] = buf;
        m["wall_clock_s"] = wall;
        json files = json::object();
        for (const auto& [f, h] : ctx.files)
            files[f] = h;
        m["files"] = files;
        m["warnings"] = ctx.warnings;
        m["summary"] = ctx.summary;

        RunOutput out;
        out.manifest_json = m.dump(2) + "\n";
        for (const auto& [f, _] : ctx.files)
            out.files.push_back((ctx.dir / f).string());
        const std::string mname = "manifest_" + name + ".json";
        write_file((ctx.dir / mname).string(), out.manifest_json);
        out.files.push_back((ctx.dir / mname).string());
        out.warnings = ctx.warnings;
        return out;
    }
} // namespace rwdre
