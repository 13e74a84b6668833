#pragma once

#include "soesn/experiments.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace soesn::cli {

struct ClassifierConfig {
    std::size_t window = kDefaultWindow;
    double min_stddev = ClassifierThresholds{}.min_stddev;
    double min_peak_fraction = ClassifierThresholds{}.min_peak_fraction;

    ClassifierThresholds thresholds() const { return {min_stddev, min_peak_fraction}; }
};

struct GenerateConfig {
    std::string kind = "dense";
    std::size_t n = 100;
    double density = 0.1;
    std::size_t sub_count = 1;
    double coupling_scale = 0.05;
    double coupling_density = 0.05;
    bool inject_ensemble = false;
    double rho = 1.25;
    double leak = 0.5;
    double leak_sigma = 0.0;
    std::size_t tau = 1000;
    std::size_t trace_units = 6;
    ClassifierConfig classifier;
};

struct SweepConfig {
    std::vector<double> leak_values;
    std::vector<double> rho_values;
    std::size_t trials = 10;
    std::size_t n = 100;
    std::size_t tau = 1000;
    ClassifierConfig classifier;

    SweepConfig();
};

struct InjectConfig {
    std::vector<std::size_t> populations{4, 10, 25, 50, 100};
    std::size_t trials = 100;
    std::size_t tau = 1000;
    double rho = 1.25;
    double leak = 0.5;
    ClassifierConfig classifier;
};

struct ReproduceConfig {
    std::string target = "sine";
    std::string topology = "weakly_coupled";
    std::size_t n = 504;
    std::vector<std::size_t> sub{8};
    double coupling_scale = 0.05;
    double coupling_density = 0.05;
    std::size_t trials = 1;
    std::size_t tau = 1000;
    double dt = 0.01;
    double freq = 5.0;
    bool standardize = false;
    double leak_mu = 0.6;
    double leak_sigma = 0.1;
    double rho = 1.25;
    double lambda = kDefaultRidge;
    std::size_t washout = kDefaultWashout;
    std::size_t max_attempts = 10;
    double lorenz_sigma = 10.0;
    double lorenz_alpha = 28.0;
    double lorenz_beta = 2.667;
    std::array<double, 3> lorenz_x0{0.0, 1.0, 1.05};
    ClassifierConfig classifier;
};

struct DemoConfig {
    std::size_t n = 100;
    std::size_t sub_count = 4;
    double density = 0.1;
    double coupling_scale = 0.05;
    double coupling_density = 0.05;
    bool inject_ensemble = false;
    double rho = 1.25;
    double leak = 0.5;
    std::size_t tau = 1000;
    std::size_t trace_units = 6;
    ClassifierConfig classifier;
};

// Strict readers: unknown keys and wrong types raise InputError; missing keys keep defaults.
// Validation of value ranges happens here too, so a parsed config is always runnable.
void to_json(nlohmann::json& j, const GenerateConfig& c);
void from_json(const nlohmann::json& j, GenerateConfig& c);
void to_json(nlohmann::json& j, const SweepConfig& c);
void from_json(const nlohmann::json& j, SweepConfig& c);
void to_json(nlohmann::json& j, const InjectConfig& c);
void from_json(const nlohmann::json& j, InjectConfig& c);
void to_json(nlohmann::json& j, const ReproduceConfig& c);
void from_json(const nlohmann::json& j, ReproduceConfig& c);
void to_json(nlohmann::json& j, const DemoConfig& c);
void from_json(const nlohmann::json& j, DemoConfig& c);

/// {"command", "seed", "parameters"}: the file format of --config and config.echo.json.
struct RunFile {
    std::string command;
    std::optional<Seed> seed;
    nlohmann::json parameters = nlohmann::json::object();
};

RunFile parse_run_file(const nlohmann::json& j);

/// Inclusive arithmetic range, robust to accumulated rounding.
std::vector<double> linear_range(double first, double last, double step);

} // namespace soesn::cli
