#include "config.hpp"

#include "soesn/errors.hpp"
#include "soesn/io.hpp"

#include <cmath>
#include <set>

namespace soesn::cli {

namespace {

// Reads known keys out of a JSON object and rejects whatever is left.
class FieldReader {
public:
    FieldReader(const nlohmann::json& j, std::string context) : j_(j), context_(std::move(context))
    {
        if (!j_.is_object()) {
            throw InputError(context_ + ": expected a JSON object");
        }
    }

    template <class T>
    void operator()(const char* key, T& value)
    {
        seen_.insert(key);
        if (!j_.contains(key)) {
            return;
        }
        try {
            value = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw InputError(context_ + "." + key + ": " + e.what());
        }
    }

    void classifier(ClassifierConfig& c)
    {
        (*this)("window", c.window);
        (*this)("min_stddev", c.min_stddev);
        (*this)("min_peak_fraction", c.min_peak_fraction);
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw InputError(context_ + ": unknown field `" + key + "`");
            }
        }
    }

private:
    const nlohmann::json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

void put_classifier(nlohmann::json& j, const ClassifierConfig& c)
{
    j["window"] = c.window;
    j["min_stddev"] = c.min_stddev;
    j["min_peak_fraction"] = c.min_peak_fraction;
}

[[noreturn]] void invalid(const std::string& context, const std::string& message)
{
    throw InputError(context + ": " + message);
}

void check_positive(const std::string& context, const char* name, double value)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        invalid(context, std::string(name) + " must be positive, got " + format_double(value));
    }
}

void check_leak(const std::string& context, const char* name, double value)
{
    if (!(value > 0.0 && value <= 1.0)) {
        invalid(context, std::string(name) + " must be in (0, 1], got " + format_double(value));
    }
}

void check_at_least(const std::string& context, const char* name, std::size_t value, std::size_t minimum)
{
    if (value < minimum) {
        invalid(context, std::string(name) + " must be at least " + std::to_string(minimum) + ", got " +
                             std::to_string(value));
    }
}

void check_classifier(const std::string& context, const ClassifierConfig& c, std::size_t tau)
{
    check_at_least(context, "window", c.window, 16);
    if (c.window > tau + 1) {
        invalid(context, "window " + std::to_string(c.window) + " exceeds the " + std::to_string(tau + 1) +
                             "-row trajectory");
    }
    if (!(c.min_stddev >= 0.0) || !(c.min_peak_fraction >= 0.0 && c.min_peak_fraction < 1.0)) {
        invalid(context, "classifier thresholds out of range");
    }
}

TopologySpec checked_topology(const std::string& context, TopologySpec spec)
{
    try {
        spec.validate();
    } catch (const InputError& e) {
        invalid(context, e.what());
    }
    return spec;
}

} // namespace

std::vector<double> linear_range(double first, double last, double step)
{
    if (!(step > 0.0) || !(last >= first)) {
        throw InputError("range: need step > 0 and last >= first");
    }
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        // Round to 12 decimals so 0.1 * 3 prints as 0.3 in every output.
        out.push_back(std::round((first + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
}

SweepConfig::SweepConfig() : leak_values(linear_range(0.05, 1.0, 0.05)), rho_values(linear_range(0.1, 3.0, 0.1)) {}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const GenerateConfig& c)
{
    j = {{"kind", c.kind},
         {"n", c.n},
         {"density", c.density},
         {"sub_count", c.sub_count},
         {"coupling_scale", c.coupling_scale},
         {"coupling_density", c.coupling_density},
         {"inject_ensemble", c.inject_ensemble},
         {"rho", c.rho},
         {"leak", c.leak},
         {"leak_sigma", c.leak_sigma},
         {"tau", c.tau},
         {"trace_units", c.trace_units}};
    put_classifier(j, c.classifier);
}

void from_json(const nlohmann::json& j, GenerateConfig& c)
{
    const std::string context = "generate";
    c = GenerateConfig{};
    FieldReader read(j, context);
    read("kind", c.kind);
    read("n", c.n);
    read("density", c.density);
    read("sub_count", c.sub_count);
    read("coupling_scale", c.coupling_scale);
    read("coupling_density", c.coupling_density);
    read("inject_ensemble", c.inject_ensemble);
    read("rho", c.rho);
    read("leak", c.leak);
    read("leak_sigma", c.leak_sigma);
    read("tau", c.tau);
    read("trace_units", c.trace_units);
    read.classifier(c.classifier);
    read.finish();

    TopologySpec spec;
    spec.kind = topology_kind_from_string(c.kind);
    spec.n = c.n;
    spec.density = c.density;
    spec.sub_count = c.sub_count;
    spec.coupling_scale = c.coupling_scale;
    spec.coupling_density = c.coupling_density;
    spec.inject_ensemble = c.inject_ensemble;
    checked_topology(context, spec);
    check_positive(context, "rho", c.rho);
    check_leak(context, "leak", c.leak);
    if (!(c.leak_sigma >= 0.0)) {
        invalid(context, "leak_sigma must be non-negative");
    }
    check_at_least(context, "tau", c.tau, 1);
    check_classifier(context, c.classifier, c.tau);
}

void to_json(nlohmann::json& j, const SweepConfig& c)
{
    j = {{"leak_values", c.leak_values}, {"rho_values", c.rho_values}, {"trials", c.trials},
         {"n", c.n},                     {"tau", c.tau}};
    put_classifier(j, c.classifier);
}

void from_json(const nlohmann::json& j, SweepConfig& c)
{
    const std::string context = "sweep";
    c = SweepConfig{};
    FieldReader read(j, context);
    read("leak_values", c.leak_values);
    read("rho_values", c.rho_values);
    read("trials", c.trials);
    read("n", c.n);
    read("tau", c.tau);
    read.classifier(c.classifier);
    read.finish();

    if (c.leak_values.empty() || c.rho_values.empty()) {
        invalid(context, "leak_values and rho_values must be non-empty");
    }
    for (double a : c.leak_values) {
        check_leak(context, "leak value", a);
    }
    for (double rho : c.rho_values) {
        check_positive(context, "rho value", rho);
    }
    check_at_least(context, "trials", c.trials, 1);
    check_at_least(context, "n", c.n, 1);
    check_classifier(context, c.classifier, c.tau);
}

void to_json(nlohmann::json& j, const InjectConfig& c)
{
    j = {{"populations", c.populations}, {"trials", c.trials}, {"tau", c.tau}, {"rho", c.rho}, {"leak", c.leak}};
    put_classifier(j, c.classifier);
}

void from_json(const nlohmann::json& j, InjectConfig& c)
{
    const std::string context = "inject-experiment";
    c = InjectConfig{};
    FieldReader read(j, context);
    read("populations", c.populations);
    read("trials", c.trials);
    read("tau", c.tau);
    read("rho", c.rho);
    read("leak", c.leak);
    read.classifier(c.classifier);
    read.finish();

    if (c.populations.empty()) {
        invalid(context, "populations must be non-empty");
    }
    for (std::size_t n : c.populations) {
        check_at_least(context, "population", n, 2);
    }
    check_at_least(context, "trials", c.trials, 1);
    check_positive(context, "rho", c.rho);
    check_leak(context, "leak", c.leak);
    check_classifier(context, c.classifier, c.tau);
}

void to_json(nlohmann::json& j, const ReproduceConfig& c)
{
    j = {{"target", c.target},
         {"topology", c.topology},
         {"n", c.n},
         {"sub", c.sub},
         {"coupling_scale", c.coupling_scale},
         {"coupling_density", c.coupling_density},
         {"trials", c.trials},
         {"tau", c.tau},
         {"dt", c.dt},
         {"freq", c.freq},
         {"standardize", c.standardize},
         {"leak_mu", c.leak_mu},
         {"leak_sigma", c.leak_sigma},
         {"rho", c.rho},
         {"lambda", c.lambda},
         {"washout", c.washout},
         {"max_attempts", c.max_attempts},
         {"lorenz_sigma", c.lorenz_sigma},
         {"lorenz_alpha", c.lorenz_alpha},
         {"lorenz_beta", c.lorenz_beta},
         {"lorenz_x0", c.lorenz_x0}};
    put_classifier(j, c.classifier);
}

void from_json(const nlohmann::json& j, ReproduceConfig& c)
{
    const std::string context = "reproduce";
    c = ReproduceConfig{};
    FieldReader read(j, context);
    read("target", c.target);
    read("topology", c.topology);
    read("n", c.n);
    read("sub", c.sub);
    read("coupling_scale", c.coupling_scale);
    read("coupling_density", c.coupling_density);
    read("trials", c.trials);
    read("tau", c.tau);
    read("dt", c.dt);
    read("freq", c.freq);
    read("standardize", c.standardize);
    read("leak_mu", c.leak_mu);
    read("leak_sigma", c.leak_sigma);
    read("rho", c.rho);
    read("lambda", c.lambda);
    read("washout", c.washout);
    read("max_attempts", c.max_attempts);
    read("lorenz_sigma", c.lorenz_sigma);
    read("lorenz_alpha", c.lorenz_alpha);
    read("lorenz_beta", c.lorenz_beta);
    read("lorenz_x0", c.lorenz_x0);
    read.classifier(c.classifier);
    read.finish();

    static const std::set<std::string> targets{"sine", "sine_literal", "square", "lorenz"};
    if (!targets.contains(c.target)) {
        invalid(context, "unknown target `" + c.target + "` (sine, sine_literal, square, lorenz)");
    }
    const TopologyKind kind = topology_kind_from_string(c.topology);
    if (kind == TopologyKind::sparse) {
        invalid(context, "topology must be dense, block_diagonal or weakly_coupled");
    }
    if (c.sub.empty()) {
        invalid(context, "sub must list at least one sub-reservoir count");
    }
    for (std::size_t m : c.sub) {
        TopologySpec spec;
        spec.kind = kind == TopologyKind::dense ? TopologyKind::block_diagonal : kind;
        spec.n = c.n;
        spec.sub_count = m;
        spec.coupling_scale = c.coupling_scale;
        spec.coupling_density = c.coupling_density;
        checked_topology(context, spec);
    }
    if (kind == TopologyKind::dense && (c.sub.size() != 1 || c.sub.front() != 1)) {
        invalid(context, "a dense topology has exactly one sub-reservoir");
    }
    check_at_least(context, "trials", c.trials, 1);
    check_at_least(context, "tau", c.tau, 2);
    check_positive(context, "dt", c.dt);
    check_positive(context, "rho", c.rho);
    check_leak(context, "leak_mu", c.leak_mu);
    if (!(c.leak_sigma >= 0.0) || !(c.lambda >= 0.0) || !std::isfinite(c.lambda)) {
        invalid(context, "leak_sigma and lambda must be non-negative");
    }
    if (c.tau + 1 < c.washout + 2) {
        invalid(context, "tau must leave at least 2 samples after the washout");
    }
    check_classifier(context, c.classifier, c.tau);
}

void to_json(nlohmann::json& j, const DemoConfig& c)
{
    j = {{"n", c.n},
         {"sub_count", c.sub_count},
         {"density", c.density},
         {"coupling_scale", c.coupling_scale},
         {"coupling_density", c.coupling_density},
         {"inject_ensemble", c.inject_ensemble},
         {"rho", c.rho},
         {"leak", c.leak},
         {"tau", c.tau},
         {"trace_units", c.trace_units}};
    put_classifier(j, c.classifier);
}

void from_json(const nlohmann::json& j, DemoConfig& c)
{
    const std::string context = "topology-demo";
    c = DemoConfig{};
    FieldReader read(j, context);
    read("n", c.n);
    read("sub_count", c.sub_count);
    read("density", c.density);
    read("coupling_scale", c.coupling_scale);
    read("coupling_density", c.coupling_density);
    read("inject_ensemble", c.inject_ensemble);
    read("rho", c.rho);
    read("leak", c.leak);
    read("tau", c.tau);
    read("trace_units", c.trace_units);
    read.classifier(c.classifier);
    read.finish();

    TopologySpec spec;
    spec.kind = TopologyKind::weakly_coupled;
    spec.n = c.n;
    spec.density = c.density;
    spec.sub_count = c.sub_count;
    spec.coupling_scale = c.coupling_scale;
    spec.coupling_density = c.coupling_density;
    spec.inject_ensemble = c.inject_ensemble;
    checked_topology(context, spec);
    check_positive(context, "rho", c.rho);
    check_leak(context, "leak", c.leak);
    check_at_least(context, "tau", c.tau, 1);
    check_classifier(context, c.classifier, c.tau);
}

RunFile parse_run_file(const nlohmann::json& j)
{
    RunFile file;
    FieldReader read(j, "config");
    read("command", file.command);
    read("parameters", file.parameters);
    if (j.contains("seed")) {
        Seed seed = 0;
        read("seed", seed);
        file.seed = seed;
    }
    read.finish();
    if (!file.parameters.is_object()) {
        throw InputError("config: `parameters` must be an object");
    }
    return file;
}

} // namespace soesn::cli
