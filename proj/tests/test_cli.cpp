#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rwdre/config.hpp"
#include "rwdre/error.hpp"
#include "rwdre/runner.hpp"

using namespace rwdre;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch()
    {
        static const fs::path dir = [] {
            auto d = fs::temp_directory_path() / ("rwdre_cli_" + std::to_string(::getpid()));
            fs::create_directories(d);
            return d;
        }();
        return dir;
    }

    fs::path write_file(const std::string& name, const std::string& text)
    {
        const auto p = scratch() / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    struct Run
    {
        int code;
        std::string out;
    };

    Run run_cli(const std::string& args)
    {
        const std::string cmd = std::string(RWDRE_BIN) + " " + args + " 2>&1";
        FILE* f = ::popen(cmd.c_str(), "r");
        REQUIRE(f != nullptr);
        std::string out;
        char buf[4096];
        while (std::size_t k = std::fread(buf, 1, sizeof buf, f))
            out.append(buf, k);
        const int st = ::pclose(f);
        return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
    }

    const char* kLln = R"([run]
seed = 5
replicas = 1
samples = 60
output_dir = OUT

[environment]
kind = asep
p = 0.7
rho = 0.5

[rates]
alpha_per_s = 3, 2
beta_per_s = 0.5
Lambda_per_s = 4

[lln]
t_grid_s = 5, 20
epsilon_sps = 0.1
)";

    std::string with_out(std::string text, const fs::path& out)
    {
        text.replace(text.find("OUT"), 3, out.string());
        return text;
    }

    std::string field_of(const std::string& text)
    {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError& e)
        {
            return e.field();
        }
        return "";
    }
}

TEST_CASE("config parsing")
{
    const auto cfg = parse_config(kLln);
    CHECK(cfg.seed == 5);
    CHECK(cfg.samples == 60);
    CHECK(cfg.env.kind == EnvKind::asep);
    CHECK(cfg.rates.alpha == std::vector<double>{3.0, 2.0});
    CHECK(cfg.rates.Lambda == 4.0);

    std::string bad = kLln;
    bad.replace(bad.find("3, 2"), 4, "3, x");
    CHECK(field_of(bad) == "rates.alpha_per_s[1]");
    std::string nokind = kLln;
    nokind.replace(nokind.find("kind = asep"), 11, "kind = lattice");
    CHECK(field_of(nokind) == "environment.kind");
    std::string seed = kLln;
    seed.replace(seed.find("seed = 5"), 8, "seed = -1");
    CHECK(field_of(seed) == "run.seed");
    std::string lam = kLln;
    lam.replace(lam.find("Lambda_per_s = 4\n"), 17, "");
    CHECK(field_of(lam) == "rates.Lambda_per_s");

    auto c = parse_config(kLln);
    Overrides o;
    o.seed = 77;
    o.replicas = 3;
    apply_overrides(c, o);
    CHECK(c.seed == 77);
    CHECK(c.replicas == 3);
}

TEST_CASE("rates beyond Lambda are rejected with the occupation")
{
    std::string text = kLln;
    text.replace(text.find("alpha_per_s = 3, 2"), 18, "alpha_per_s = 3, 3.6");
    const auto path = write_file("rates.ini", with_out(text, scratch() / "rates"));
    const auto r = run_cli("lln --config " + path.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("occupation 1") != std::string::npos);
}

TEST_CASE("validate")
{
    const std::string zr = R"([run]
seed = 1
[environment]
kind = zero_range
g_per_s = 0, 1, 2, 2.2
gamma_minus_per_s = 0.5
gamma_plus_per_s = 1.5
rho = 1
[rates]
alpha_per_s = 0.5
beta_per_s = 0.1
Lambda_per_s = 1
)";
    const auto p = write_file("zr.ini", zr);
    const auto r = run_cli("validate --config " + p.string());
    CHECK(r.code == 0);
    CHECK(r.out.rfind("FAIL", 0) == 0);
    CHECK(r.out.find("k=3") != std::string::npos);

    const std::string scales = std::string(kLln) + "\n[scales]\nL0 = 10\nnu = 0.5\ngamma = 1.25\nk_max = 2\n";
    const auto q = write_file("scales.ini", scales);
    const auto lax = run_cli("validate --config " + q.string());
    CHECK(lax.out.rfind("OK", 0) == 0);
    const auto strict = run_cli("validate --strict-scales --config " + q.string());
    CHECK(strict.out.find("FAIL") != std::string::npos);
    CHECK(strict.out.find("nu-constraint") != std::string::npos);

    CHECK(validate_config(kLln).empty());
}

TEST_CASE("exit codes")
{
    CHECK(run_cli("lln").code == 2);
    CHECK(run_cli("frobnicate --config x.ini").code == 2);
    CHECK(run_cli("lln --config " + (scratch() / "missing.ini").string()).code == 2);
    CHECK(run_cli("--help").code == 0);

    const std::string bracket = R"([run]
seed = 3
samples = 30
output_dir = OUT
[environment]
kind = constant
[rates]
alpha_per_s = 0.8
beta_per_s = 0.2
Lambda_per_s = 1
[speed_bracket]
H_s = 10
v_sps = 0.5, 0.6
)";
    const auto p = write_file("bracket.ini", with_out(bracket, scratch() / "bracket"));
    const auto r = run_cli("speed-bracket --config " + p.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("inconclusive") != std::string::npos);
}

TEST_CASE("reproducibility")
{
    const auto a = scratch() / "a";
    const auto b = scratch() / "b";
    const auto c = scratch() / "c";
    const auto cfg = write_file("lln.ini", with_out(kLln, a));
    REQUIRE(run_cli("lln --config " + cfg.string()).code == 0);
    REQUIRE(run_cli("lln --config " + cfg.string() + " --out " + b.string() + " --replicas 8").code == 0);
    REQUIRE(run_cli("lln --config " + cfg.string() + " --out " + c.string() + " --seed 6").code == 0);
    const auto first = slurp(a / "lln.csv");
    CHECK(!first.empty());
    CHECK(first == slurp(b / "lln.csv"));
    CHECK(first != slurp(c / "lln.csv"));

    const auto m = nlohmann::json::parse(slurp(a / "manifest_lln.json"));
    CHECK(m["subcommand"] == "lln");
    CHECK(m["seed"] == 5);
    CHECK(m["config_sha256"].get<std::string>().size() == 64);
    CHECK(m["files"]["lln.csv"] == sha256_hex(first));
    const auto mb = nlohmann::json::parse(slurp(b / "manifest_lln.json"));
    CHECK(mb["replicas"] == 8);
    CHECK(mb["config_sha256"] != m["config_sha256"]);

    // in-process run gives the same bytes
    auto parsed = parse_config(with_out(kLln, scratch() / "d"));
    run_subcommand("lln", parsed);
    CHECK(slurp(scratch() / "d" / "lln.csv") == first);
}
