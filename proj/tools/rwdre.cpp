#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rwdre/config.hpp"
#include "rwdre/runner.hpp"

namespace
{
    int exit_code(const std::exception& e)
    {
        using namespace rwdre;
        if (dynamic_cast<const CoverageError*>(&e))
            return 3;
        if (dynamic_cast<const NumericalError*>(&e))
            return 4;
        if (dynamic_cast<const InvariantViolation*>(&e))
            return 5;
        if (dynamic_cast<const Error*>(&e))
            return 2;
        return 1;
    }

    std::string read_all(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw rwdre::ConfigError(path, "cannot open config file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Random walks in dynamic random environments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config;
    std::uint64_t seed = 0;
    unsigned replicas = 0;
    std::string out;
    bool strict = false;
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
    auto* rep_opt = app.add_option("--replicas", replicas, "sample partitions");
    auto* out_opt = app.add_option("--out", out, "output directory");
    app.add_flag("--strict-scales", strict, "enforce the nu-constraint on scales");
    app.add_option("--config", config, "experiment config (INI)")->required();
    for (const auto& name : rwdre::subcommands())
        app.add_subcommand(name);
    app.add_subcommand("validate", "check a config without simulating");
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    rwdre::Overrides ov;
    if (seed_opt->count())
        ov.seed = seed;
    if (rep_opt->count())
        ov.replicas = replicas;
    if (out_opt->count())
        ov.output_dir = out;
    ov.strict_scales = strict;
    const std::string sub = app.get_subcommands().front()->get_name();

    try
    {
        if (sub == "validate")
        {
            const auto failures = rwdre::validate_config(read_all(config), ov);
            for (const auto& f : failures)
                std::cout << "FAIL " << f << "\n";
            if (failures.empty())
                std::cout << "OK " << config << "\n";
            return 0;
        }
        auto cfg = rwdre::load_config(config);
        rwdre::apply_overrides(cfg, ov);
        const auto res = rwdre::run_subcommand(sub, cfg);
        for (const auto& w : res.warnings)
            std::cerr << "warning: " << w << "\n";
        for (const auto& f : res.files)
            std::cout << f << "\n";
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    }
    return 0;
}
