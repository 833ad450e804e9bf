#include "rwdre/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "rwdre/csv.hpp"
#include "rwdre/decoupling.hpp"
#include "rwdre/deviation.hpp"
#include "rwdre/scales.hpp"

namespace rwdre
{
    namespace pt = boost::property_tree;

    namespace
    {
        double parse_number(const std::string& field, std::string s)
        {
            boost::algorithm::trim(s);
            double v = 0.0;
            const auto* end = s.data() + s.size();
            const auto [p, ec] = std::from_chars(s.data(), end, v);
            if (s.empty() || ec != std::errc() || p != end)
                throw ConfigError(field, "expected a number, got '" + s + "'");
            if (!std::isfinite(v))
                throw ConfigError(field, "value must be finite");
            return v;
        }
    } // namespace

    bool ConfigView::has(const std::string& path) const
    {
        return tree_->get_child_optional(pt::ptree::path_type(path, '.')).has_value();
    }

    std::string ConfigView::str(const std::string& path) const
    {
        const auto v = tree_->get_optional<std::string>(pt::ptree::path_type(path, '.'));
        if (!v)
            throw ConfigError(path, "missing required key");
        return boost::algorithm::trim_copy(*v);
    }

    std::string ConfigView::str(const std::string& path, const std::string& fallback) const
    {
        return has(path) ? str(path) : fallback;
    }

    double ConfigView::num(const std::string& path) const
    {
        return parse_number(path, str(path));
    }

    double ConfigView::num(const std::string& path, double fallback) const
    {
        return has(path) ? num(path) : fallback;
    }

    std::optional<double> ConfigView::opt_num(const std::string& path) const
    {
        if (!has(path))
            return std::nullopt;
        return num(path);
    }

    std::int64_t ConfigView::integer(const std::string& path) const
    {
        const double v = num(path);
        if (v != std::floor(v) || std::abs(v) > 9.0e15)
            throw ConfigError(path, "expected an integer");
        return static_cast<std::int64_t>(v);
    }

    std::int64_t ConfigView::integer(const std::string& path, std::int64_t fallback) const
    {
        return has(path) ? integer(path) : fallback;
    }

    bool ConfigView::flag(const std::string& path, bool fallback) const
    {
        if (!has(path))
            return fallback;
        const std::string s = boost::algorithm::to_lower_copy(str(path));
        if (s == "true" || s == "1" || s == "yes")
            return true;
        if (s == "false" || s == "0" || s == "no")
            return false;
        throw ConfigError(path, "expected true or false");
    }

    std::vector<double> ConfigView::list(const std::string& path) const
    {
        std::vector<std::string> parts;
        const std::string raw = str(path);
        boost::algorithm::split(parts, raw, boost::is_any_of(","));
        std::vector<double> out;
        for (std::size_t i = 0; i < parts.size(); ++i)
            out.push_back(parse_number(path + "[" + std::to_string(i) + "]", parts[i]));
        return out;
    }

    std::vector<double> ConfigView::list(const std::string& path, const std::vector<double>& fallback) const
    {
        return has(path) ? list(path) : fallback;
    }

    namespace
    {
        EnvSpec parse_environment(const ConfigView& c)
        {
            EnvSpec e;
            const std::string kind = c.str("environment.kind", "constant");
            if (kind == "constant")
            {
                e.kind = EnvKind::constant;
                const auto s = c.integer("environment.state", 0);
                if (s < 0)
                    throw ConfigError("environment.state", "must be non-negative");
                e.constant_state = static_cast<int>(s);
            }
            else if (kind == "zero_range")
            {
                e.kind = EnvKind::zeroRange;
                e.zr.gamma_minus = c.num("environment.gamma_minus_per_s", 1.0);
                e.zr.gamma_plus = c.num("environment.gamma_plus_per_s", 1.0);
                if (c.has("environment.g_per_s"))
                    e.zr.g = RateFunction(c.list("environment.g_per_s"), e.zr.gamma_plus);
                else
                    e.zr.g = RateFunction::linear(c.num("environment.g_slope_per_s", 1.0),
                                                  static_cast<int>(c.integer("environment.g_k_max", 64)));
                e.zr.rho = c.num("environment.rho");
                try
                {
                    e.zr.validate();
                }
                catch (const Error& err)
                {
                    throw ConfigError("environment", err.what());
                }
            }
            else if (kind == "asep")
            {
                e.kind = EnvKind::asep;
                e.asep.p = c.num("environment.p", 0.5);
                e.asep.rho = c.num("environment.rho", 0.5);
            }
            else
                throw ConfigError("environment.kind", "unknown kind '" + kind + "' (constant, zero_range, asep)");
            if (c.has("environment.buffer_sites"))
            {
                const auto b = c.integer("environment.buffer_sites");
                if (b < 0)
                    throw ConfigError("environment.buffer_sites", "must be non-negative");
                e.buffer = b;
            }
            try
            {
                e.prepare();
            }
            catch (const ConfigError&)
            {
                throw;
            }
            catch (const Error& err)
            {
                throw ConfigError("environment", err.what());
            }
            return e;
        }

        RateModel parse_rates(const ConfigView& c)
        {
            RateModel r;
            r.alpha = c.list("rates.alpha_per_s");
            r.beta = c.list("rates.beta_per_s");
            r.Lambda = c.num("rates.Lambda_per_s");
            if (c.has("rates.drift_inf_sps"))
                r.declared_drift_inf = c.num("rates.drift_inf_sps");
            for (std::size_t k = 0; k < r.alpha.size(); ++k)
                if (r.alpha[k] < 0.0)
                    throw ConfigError("rates.alpha_per_s[" + std::to_string(k) + "]", "must be non-negative");
            for (std::size_t k = 0; k < r.beta.size(); ++k)
                if (r.beta[k] < 0.0)
                    throw ConfigError("rates.beta_per_s[" + std::to_string(k) + "]", "must be non-negative");
            try
            {
                r.validate();
            }
            catch (const Error& err)
            {
                throw ConfigError("rates", err.what());
            }
            return r;
        }
    } // namespace

    ExperimentConfig parse_config(const std::string& text, const std::string& origin)
    {
        ExperimentConfig cfg;
        cfg.source = text;
        cfg.origin = origin;
        std::istringstream in(text);
        try
        {
            pt::read_ini(in, cfg.tree);
        }
        catch (const pt::ini_parser_error& e)
        {
            throw ConfigError(origin + ":" + std::to_string(e.line()), e.message());
        }
        const ConfigView c = cfg.view();
        const auto seed = c.num("run.seed", 0.0);
        if (seed < 0.0 || seed != std::floor(seed) || seed >= 18446744073709551616.0)
            throw ConfigError("run.seed", "must be a non-negative 64-bit integer");
        // keep full 64-bit precision when the text is an integer literal
        if (c.has("run.seed"))
        {
            const std::string s = c.str("run.seed");
            std::uint64_t v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw ConfigError("run.seed", "must be a non-negative 64-bit integer");
            cfg.seed = v;
        }
        const auto reps = c.integer("run.replicas", 1);
        if (reps < 1 || reps > 1 << 20)
            throw ConfigError("run.replicas", "must be a positive integer");
        cfg.replicas = static_cast<unsigned>(reps);
        const auto n = c.integer("run.samples", 100);
        if (n < 1 || n > (1ll << 31))
            throw ConfigError("run.samples", "must be a positive integer below 2^31");
        cfg.samples = static_cast<std::uint64_t>(n);
        cfg.output_dir = c.str("run.output_dir", "out");
        cfg.strict_scales = c.flag("scales.strict", false);
        cfg.env = parse_environment(c);
        cfg.rates = parse_rates(c);
        return cfg;
    }

    ExperimentConfig load_config(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError(path, "cannot open config file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), path);
    }

    void apply_overrides(ExperimentConfig& cfg, const Overrides& o)
    {
        if (o.seed)
            cfg.seed = *o.seed;
        if (o.replicas)
        {
            if (*o.replicas < 1)
                throw ConfigError("--replicas", "must be a positive integer");
            cfg.replicas = *o.replicas;
        }
        if (o.output_dir)
            cfg.output_dir = *o.output_dir;
        if (o.strict_scales)
            cfg.strict_scales = true;
    }

    std::vector<std::string> validate_config(const std::string& text, const Overrides& o)
    {
        std::vector<std::string> failures;
        ExperimentConfig cfg;
        try
        {
            cfg = parse_config(text);
            apply_overrides(cfg, o);
        }
        catch (const Error& e)
        {
            failures.emplace_back(e.what());
            return failures;
        }
        const ConfigView c = cfg.view();
        auto check = [&](const std::string& section, auto&& fn) {
            if (!c.has(section))
                return;
            try
            {
                fn();
            }
            catch (const Error& e)
            {
                failures.emplace_back(e.what());
            }
        };
        check("scales", [&] {
            const auto seq = build_scales(c.integer("scales.L0"), c.num("scales.nu"), c.num("scales.gamma", 1.25),
                                          static_cast<int>(c.integer("scales.k_max", 2)), cfg.strict_scales);
            (void)seq;
        });
        check("decoupling", [&] {
            DecouplingParams p;
            p.v_circ = c.num("decoupling.v_circ_sps", p.v_circ);
            p.kappa_circ = c.num("decoupling.kappa_circ", p.kappa_circ);
            p.C_circ = c.num("decoupling.C_circ", p.C_circ);
            p.c2 = c.num("decoupling.c2", p.c2);
            p.c3 = c.num("decoupling.c3_sites", p.c3);
            p.gamma_circ = c.num("decoupling.gamma_circ", p.gamma_circ);
            p.validate();
            if (c.has("decoupling.d_v_s"))
            {
                const double s = c.num("decoupling.s_s", 1.0);
                const double dV = c.num("decoupling.d_v_s");
                for (double dH : c.list("decoupling.d_h_sites"))
                {
                    const auto dc = check_distance_condition({0.0, 0.0, s}, {dH, s + dV, s}, p);
                    if (!dc.ok)
                        failures.push_back("decoupling: distance condition fails at d_h=" + format_double(dH));
                }
            }
        });
        check("deviation", [&] {
            const double u = c.num("deviation.u_drift_sps");
            const DriftCheck d = drift_margin(cfg.rates, default_probes(cfg.rates));
            if (!(d.margin > u))
                failures.push_back("deviation.u_drift_sps: must lie below inf(alpha-beta) = " + format_double(d.margin));
        });
        return failures;
    }
} // namespace rwdre
