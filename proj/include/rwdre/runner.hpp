#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rwdre/config.hpp"

namespace rwdre
{
    std::string sha256_hex(std::string_view data);

    const std::vector<std::string>& subcommands();

    struct RunOutput
    {
        std::vector<std::string> files; // paths written, manifest last
        std::vector<std::string> warnings;
        std::string manifest_json;
    };

    // Runs one subcommand, writing its CSVs and manifest_<name>.json into
    // cfg.output_dir.
    RunOutput run_subcommand(const std::string& name, const ExperimentConfig& cfg);
} // namespace rwdre
