#include "soesn/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using soesn::read_text_file;
using soesn::write_text_file;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("soesn_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    return dir;
}

int run(const std::string& args, const std::string& env = "")
{
    const std::string command = env + (env.empty() ? "" : " ") + "\"" SOESN_CLI_PATH "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t data_rows(const std::string& csv)
{
    std::size_t rows = 0;
    std::size_t start = 0;
    while (start < csv.size()) {
        const std::size_t end = csv.find('\n', start);
        const std::string line = csv.substr(start, end - start);
        if (!line.empty() && line[0] != '#') {
            ++rows;
        }
        start = end == std::string::npos ? csv.size() : end + 1;
    }
    return rows - 1;  // header
}

} // namespace

TEST_CASE("help and parse errors")
{
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("generate --n abc") == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("generate writes three files plus the echo, deterministically")
{
    const auto a = scratch("gen_a");
    const auto b = scratch("gen_b");
    REQUIRE(run("generate --n 100 --rho 1.25 --leak 0.5 --tau 1000 --seed 7 --out " + a.string()) == 0);
    for (const char* name : {"trajectory.csv", "report.json", "traces.svg", "config.echo.json"}) {
        CHECK(fs::exists(a / name));
    }
    REQUIRE(run("generate --config " + (a / "config.echo.json").string() + " --out " + b.string()) == 0);
    CHECK(read_text_file(a / "trajectory.csv") == read_text_file(b / "trajectory.csv"));
    CHECK(read_text_file(a / "report.json") == read_text_file(b / "report.json"));
    CHECK(read_text_file(a / "config.echo.json") == read_text_file(b / "config.echo.json"));

    const auto report = nlohmann::json::parse(read_text_file(a / "report.json"));
    CHECK(report["metadata"]["seed"] == 7);
    CHECK(report["report"]["per_unit"].size() == 100);

    // Without --deterministic the plot carries a timestamp comment.
    CHECK(read_text_file(a / "traces.svg").find("<!-- generated ") != std::string::npos);
}

TEST_CASE("exit codes")
{
    const auto dir = scratch("codes");
    CHECK(run("generate --rho 0 --out " + dir.string()) == 2);
    CHECK(run("generate --leak 1.5 --out " + dir.string()) == 2);
    CHECK(run("generate --kind ring --out " + dir.string()) == 2);
    CHECK(run("reproduce --n 500 --sub 8 --out " + dir.string()) == 2);
    CHECK_FALSE(fs::exists(dir));

    REQUIRE(run("generate --tau 200 --out " + dir.string()) == 0);
    CHECK(run("generate --tau 200 --out " + dir.string()) == 4);
    CHECK(run("generate --tau 200 --force --out " + dir.string()) == 0);

    const auto config = scratch("codes_cfg");
    fs::create_directories(config);
    write_text_file(config / "unknown.json", R"({"command": "generate", "parameters": {"n": 10, "colour": 1}})");
    CHECK(run("generate --config " + (config / "unknown.json").string() + " --out " + (config / "o1").string()) == 2);
    write_text_file(config / "wrong.json", R"({"command": "sweep", "parameters": {}})");
    CHECK(run("generate --config " + (config / "wrong.json").string() + " --out " + (config / "o2").string()) == 2);
    write_text_file(config / "broken.json", "{not json");
    CHECK(run("generate --config " + (config / "broken.json").string() + " --out " + (config / "o3").string()) == 2);
    CHECK(run("generate --config " + (config / "missing.json").string() + " --out " + (config / "o4").string()) == 4);
}

TEST_CASE("explicit flags override the config file")
{
    const auto dir = scratch("override");
    fs::create_directories(dir);
    write_text_file(dir / "cfg.json", R"({"command": "generate", "seed": 3, "parameters": {"n": 12, "tau": 300}})");
    REQUIRE(run("generate --config " + (dir / "cfg.json").string() + " --n 20 --out " + (dir / "o").string()) == 0);
    const auto echo = nlohmann::json::parse(read_text_file(dir / "o" / "config.echo.json"));
    CHECK(echo["parameters"]["n"] == 20);
    CHECK(echo["parameters"]["tau"] == 300);
    CHECK(echo["seed"] == 3);
}

TEST_CASE("SOESN_SEED sets the default seed")
{
    const auto a = scratch("env_a");
    const auto b = scratch("env_b");
    REQUIRE(run("generate --n 10 --tau 200 --out " + a.string(), "SOESN_SEED=99") == 0);
    REQUIRE(run("generate --n 10 --tau 200 --seed 99 --out " + b.string()) == 0);
    CHECK(nlohmann::json::parse(read_text_file(a / "config.echo.json"))["seed"] == 99);
    CHECK(read_text_file(a / "trajectory.csv") == read_text_file(b / "trajectory.csv"));
    CHECK(run("generate --n 10 --tau 200 --out " + scratch("env_c").string(), "SOESN_SEED=abc") == 2);
}

TEST_CASE("sweep shape, smoke run and jobs independence")
{
    const auto smoke = scratch("sweep_smoke");
    REQUIRE(run("sweep --trials 1 --cells 1 --out " + smoke.string()) == 0);
    CHECK(data_rows(read_text_file(smoke / "sweep.csv")) == 1);

    const auto a = scratch("sweep_a");
    const auto b = scratch("sweep_b");
    REQUIRE(run("sweep --trials 2 --cells 3 --n 30 --tau 300 --seed 5 --jobs 1 --deterministic --out " + a.string()) ==
            0);
    REQUIRE(run("sweep --config " + (a / "config.echo.json").string() + " --jobs 3 --deterministic --out " +
                b.string()) == 0);
    const std::string csv = read_text_file(a / "sweep.csv");
    CHECK(data_rows(csv) == 9);
    CHECK(csv.find("leak,rho,ratio,trials\n") != std::string::npos);
    CHECK(csv == read_text_file(b / "sweep.csv"));
    CHECK(read_text_file(a / "sweep.svg") == read_text_file(b / "sweep.svg"));

    const auto echo = nlohmann::json::parse(read_text_file(a / "config.echo.json"));
    CHECK(echo["parameters"]["leak_values"].size() == 3);
}

TEST_CASE("inject-experiment schema")
{
    const auto dir = scratch("inject");
    REQUIRE(run("inject-experiment --trials 3 --populations 2 6 --tau 300 --out " + dir.string()) == 0);
    const std::string csv = read_text_file(dir / "injection.csv");
    CHECK(csv.find("population,ratio_without,ratio_with\n2,") != std::string::npos);
    CHECK(data_rows(csv) == 2);
    CHECK(fs::exists(dir / "injection.svg"));
}

TEST_CASE("reproduce outputs")
{
    const auto dir = scratch("reproduce");
    REQUIRE(run("reproduce --target square --n 64 --sub 1 4 --trials 2 --tau 400 --out " + dir.string()) == 0);
    for (const char* name : {"nrmse.json", "outcomes.jsonl", "overlay.svg", "boxplot.csv", "boxplot.svg"}) {
        CHECK(fs::exists(dir / name));
    }
    const auto summary = nlohmann::json::parse(read_text_file(dir / "nrmse.json"));
    CHECK(summary["summaries"].size() == 2);

    const auto lorenz = scratch("reproduce_lorenz");
    REQUIRE(run("reproduce --target lorenz --n 32 --sub 2 --tau 300 --out " + lorenz.string()) == 0);
    const auto echo = nlohmann::json::parse(read_text_file(lorenz / "config.echo.json"));
    CHECK(echo["parameters"]["lorenz_x0"] == nlohmann::json::parse("[0.0, 1.0, 1.05]"));

    const auto none = scratch("reproduce_none");
    REQUIRE(run("reproduce --n 32 --sub 2 --tau 300 --max-attempts 0 --out " + none.string()) == 0);
    const auto outcome = nlohmann::json::parse(read_text_file(none / "outcomes.jsonl"));
    CHECK(outcome["oscillatory"] == false);
}

TEST_CASE("topology-demo covers every kind")
{
    const auto dir = scratch("demo");
    REQUIRE(run("topology-demo --n 40 --tau 300 --out " + dir.string()) == 0);
    for (const char* kind : {"dense", "sparse", "block_diagonal", "weakly_coupled"}) {
        for (const char* suffix : {"_weights.svg", "_trajectory.csv", "_report.json", "_traces.svg"}) {
            CHECK(fs::exists(dir / (std::string(kind) + suffix)));
        }
    }
}
