#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "rwdre/error.hpp"
#include "rwdre/realization.hpp"

namespace rwdre
{
    // Invalid configuration value; `field` is the dotted key path.
    class ConfigError : public ValidationError
    {
    public:
        ConfigError(std::string field, const std::string& what)
            : ValidationError(field + ": " + what), field_(std::move(field))
        {
        }
        const std::string& field() const { return field_; }

    private:
        std::string field_;
    };

    // Typed reads from an INI tree. Every failure names the key path.
    class ConfigView
    {
    public:
        explicit ConfigView(const boost::property_tree::ptree& tree) : tree_(&tree) {}

        bool has(const std::string& path) const;
        std::string str(const std::string& path) const;
        std::string str(const std::string& path, const std::string& fallback) const;
        double num(const std::string& path) const;
        double num(const std::string& path, double fallback) const;
        std::optional<double> opt_num(const std::string& path) const;
        std::int64_t integer(const std::string& path) const;
        std::int64_t integer(const std::string& path, std::int64_t fallback) const;
        bool flag(const std::string& path, bool fallback) const;
        std::vector<double> list(const std::string& path) const;
        std::vector<double> list(const std::string& path, const std::vector<double>& fallback) const;

    private:
        const boost::property_tree::ptree* tree_;
    };

    struct ExperimentConfig
    {
        std::string source;   // raw text
        std::string origin;   // file path or "<string>"
        boost::property_tree::ptree tree;

        EnvSpec env;
        RateModel rates;
        std::uint64_t seed = 0;
        unsigned replicas = 1; // partitions of the sample set
        std::uint64_t samples = 100;
        std::string output_dir = "out";
        bool strict_scales = false;

        ConfigView view() const { return ConfigView(tree); }
    };

    // Parses and validates the [run], [environment] and [rates] sections.
    ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
    ExperimentConfig load_config(const std::string& path);

    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<unsigned> replicas;
        std::optional<std::string> output_dir;
        bool strict_scales = false;
    };

    void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

    // Dry-run validation of every section present; one message per failure.
    std::vector<std::string> validate_config(const std::string& text, const Overrides& o = {});
} // namespace rwdre
