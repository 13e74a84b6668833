#include "config.hpp"

#include "soesn/errors.hpp"
#include "soesn/experiments.hpp"
#include "soesn/io.hpp"
#include "soesn/svg.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace soesn;
using namespace soesn::cli;

namespace {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Common {
    std::string config_path;
    std::string out = "soesn-out";
    bool force = false;
    unsigned jobs = 1;
    bool deterministic = false;
    Seed seed = 0;
    CLI::Option* seed_option = nullptr;
};

struct Context {
    std::string command;
    Seed seed = 0;
    json parameters;
    const Common* common = nullptr;

    svg::PlotStamp stamp() const
    {
        if (common->deterministic) {
            return {};
        }
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buffer[32];
        std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        return {std::string("generated ") + buffer};
    }

    json metadata() const { return make_metadata(command, seed, parameters); }
};

// Collects every output of a run so that nothing is written if any file would be clobbered.
class Outputs {
public:
    Outputs(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) {}

    void add(const std::string& name, std::string content) { files_[name] = std::move(content); }

    void check(const std::vector<std::string>& names) const
    {
        if (force_) {
            return;
        }
        for (const auto& name : names) {
            if (fs::exists(dir_ / name)) {
                throw IoError("refusing to overwrite " + (dir_ / name).string() + " (pass --force)");
            }
        }
    }

    void flush() const
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
        for (const auto& [name, content] : files_) {
            write_text_file(dir_ / name, content);
        }
    }

private:
    fs::path dir_;
    bool force_;
    std::map<std::string, std::string> files_;
};

std::string csv_with_metadata(const json& metadata, const std::function<void(std::ostream&)>& body)
{
    std::ostringstream out;
    out << "# " << metadata.dump() << '\n';
    body(out);
    return out.str();
}

std::string pretty(const json& j)
{
    return j.dump(2) + "\n";
}

std::vector<double> time_axis(std::size_t count, std::size_t offset, double dt)
{
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) {
        t[k] = static_cast<double>(k + offset) * dt;
    }
    return t;
}

std::string trace_plot(const std::string& title, const StateTrajectory& trajectory, std::size_t units,
                       const svg::PlotStamp& stamp)
{
    std::vector<svg::Series> series;
    const auto x = time_axis(trajectory.steps(), 0, 1.0);
    for (std::size_t i = 0; i < std::min(units, trajectory.n()); ++i) {
        series.push_back({"x" + std::to_string(i), x, trajectory.unit_series(i)});
    }
    return svg::line_chart(title, "step", "state", series, stamp);
}

struct Simulation {
    RealMatrix weights;
    StateTrajectory trajectory;
    OscillationReport report;
};

Simulation simulate(const TopologySpec& spec, double rho, double leak, double leak_sigma, std::size_t tau,
                    const ClassifierConfig& classifier, Seed seed)
{
    TopologySpec seeded = spec;
    seeded.seed = derive_seed(seed, {kWeightStream});
    Simulation sim{build_weights(seeded, rho), StateTrajectory(RealMatrix()), {}};
    Reservoir reservoir(sim.weights, sample_leak_vector(spec.n, leak, leak_sigma, derive_seed(seed, {kLeakStream})),
                        init_state(spec.n, derive_seed(seed, {kStateStream})));
    sim.trajectory = reservoir.run(tau);
    sim.report = classify_trajectory(sim.trajectory, classifier.window, classifier.thresholds());
    return sim;
}

void add_simulation(Outputs& outputs, const Context& ctx, const std::string& prefix, const Simulation& sim,
                    std::size_t trace_units, const std::string& title)
{
    const json metadata = ctx.metadata();
    outputs.add(prefix + "trajectory.csv",
                csv_with_metadata(metadata, [&](std::ostream& out) { sim.trajectory.write_csv(out); }));
    outputs.add(prefix + "report.json", pretty({{"metadata", metadata}, {"report", sim.report}}));
    outputs.add(prefix + "traces.svg", trace_plot(title, sim.trajectory, trace_units, ctx.stamp()));
}

// ---------------------------------------------------------------------------

int run_generate(const Context& ctx, Outputs& outputs)
{
    const auto c = ctx.parameters.get<GenerateConfig>();
    outputs.check({"trajectory.csv", "report.json", "traces.svg"});
    TopologySpec spec;
    spec.kind = topology_kind_from_string(c.kind);
    spec.n = c.n;
    spec.density = c.density;
    spec.sub_count = c.sub_count;
    spec.coupling_scale = c.coupling_scale;
    spec.coupling_density = c.coupling_density;
    spec.inject_ensemble = c.inject_ensemble;
    const auto sim = simulate(spec, c.rho, c.leak, c.leak_sigma, c.tau, c.classifier, ctx.seed);
    add_simulation(outputs, ctx, "", sim, c.trace_units, "Reservoir unit traces");
    std::cout << "self-oscillatory: " << (sim.report.reservoir_is_self_oscillatory ? "yes" : "no") << " ("
              << sim.report.oscillating_count() << "/" << c.n << " units)\n";
    return kOk;
}

int run_sweep(const Context& ctx, Outputs& outputs)
{
    const auto c = ctx.parameters.get<SweepConfig>();
    outputs.check({"sweep.csv", "sweep.svg"});
    SweepParams p;
    p.leak_values = c.leak_values;
    p.rho_values = c.rho_values;
    p.trials = c.trials;
    p.n = c.n;
    p.tau = c.tau;
    p.window = c.classifier.window;
    p.thresholds = c.classifier.thresholds();
    p.base_seed = ctx.seed;
    p.jobs = ctx.common->jobs;
    const auto result = sweep_heatmap(p);
    outputs.add("sweep.csv", [&] {
        std::ostringstream out;
        write_sweep_csv(out, result, ctx.metadata());
        return out.str();
    }());
    outputs.add("sweep.svg", svg::heatmap("Self-oscillation ratio", "leak", "spectral radius", result.leak_values,
                                          result.rho_values, result.grid, ctx.stamp()));
    std::cout << "swept " << result.grid.size() << " cells x " << result.trials_per_cell << " trials\n";
    return kOk;
}

int run_inject(const Context& ctx, Outputs& outputs)
{
    const auto c = ctx.parameters.get<InjectConfig>();
    outputs.check({"injection.csv", "injection.svg"});
    InjectionParams p;
    p.populations = c.populations;
    p.trials = c.trials;
    p.tau = c.tau;
    p.rho = c.rho;
    p.leak = c.leak;
    p.window = c.classifier.window;
    p.thresholds = c.classifier.thresholds();
    p.base_seed = ctx.seed;
    p.jobs = ctx.common->jobs;
    const auto rows = injection_ratio_experiment(p);
    outputs.add("injection.csv", [&] {
        std::ostringstream out;
        write_injection_csv(out, rows, ctx.metadata());
        return out.str();
    }());
    svg::Series without{"without ensemble", {}, {}};
    svg::Series with{"with ensemble", {}, {}};
    for (const auto& row : rows) {
        without.x.push_back(static_cast<double>(row.population));
        without.y.push_back(row.ratio_without);
        with.x.push_back(static_cast<double>(row.population));
        with.y.push_back(row.ratio_with);
        std::cout << "N=" << row.population << " without=" << format_double(row.ratio_without)
                  << " with=" << format_double(row.ratio_with) << "\n";
    }
    outputs.add("injection.svg",
                svg::line_chart("Oscillation ratio vs population", "neurons", "ratio", {without, with}, ctx.stamp()));
    return kOk;
}

TargetSignal make_target(const ReproduceConfig& c)
{
    TargetSignal target;
    if (c.target == "sine") {
        target = gen_sinusoid(c.tau, c.dt, SineMode::pure_sine, c.freq);
    } else if (c.target == "sine_literal") {
        target = gen_sinusoid(c.tau, c.dt, SineMode::literal_ode, c.freq);
    } else if (c.target == "square") {
        target = gen_square(c.tau, c.dt);
    } else {
        LorenzParams lorenz;
        lorenz.tau = c.tau;
        lorenz.dt = c.dt;
        lorenz.x0 = c.lorenz_x0;
        lorenz.sigma = c.lorenz_sigma;
        lorenz.alpha = c.lorenz_alpha;
        lorenz.beta = c.lorenz_beta;
        target = gen_lorenz(lorenz);
    }
    return c.standardize ? standardized(target) : target;
}

json nullable(double value)
{
    return std::isfinite(value) ? json(value) : json(nullptr);
}

int run_reproduce(const Context& ctx, Outputs& outputs)
{
    const auto c = ctx.parameters.get<ReproduceConfig>();
    const bool boxplot = c.sub.size() > 1;
    std::vector<std::string> names{"nrmse.json", "outcomes.jsonl", "overlay.svg"};
    if (boxplot) {
        names.insert(names.end(), {"boxplot.csv", "boxplot.svg"});
    }
    outputs.check(names);

    const TargetSignal target = make_target(c);
    ReproduceParams p;
    p.topology.kind = c.topology == "weakly_coupled" ? TopologyKind::weakly_coupled : TopologyKind::block_diagonal;
    p.topology.n = c.n;
    p.topology.coupling_scale = c.coupling_scale;
    p.topology.coupling_density = c.coupling_density;
    p.leak_mu = c.leak_mu;
    p.leak_sigma = c.leak_sigma;
    p.rho = c.rho;
    p.lambda = c.lambda;
    p.washout = c.washout;
    p.max_attempts = c.max_attempts;
    p.window = c.classifier.window;
    p.thresholds = c.classifier.thresholds();
    p.base_seed = ctx.seed;

    const auto summaries = subreservoir_count_sweep(p, c.n, c.sub, target, c.trials, ctx.common->jobs);
    const json metadata = ctx.metadata();

    json per_count = json::array();
    std::string jsonl;
    for (const auto& s : summaries) {
        json outcomes = json::array();
        for (std::size_t t = 0; t < s.outcomes.size(); ++t) {
            outcomes.push_back(s.outcomes[t]);
            json line = s.outcomes[t];
            line["sub_count"] = s.sub_count;
            line["trial"] = t;
            jsonl += line.dump() + "\n";
        }
        per_count.push_back({{"sub_count", s.sub_count},
                             {"median_nrmse", nullable(s.median)},
                             {"q1", nullable(s.q1)},
                             {"q3", nullable(s.q3)},
                             {"oscillatory_trials", s.nrmse.size()},
                             {"non_oscillatory", s.non_oscillatory},
                             {"outcomes", std::move(outcomes)}});
        std::cout << "M=" << s.sub_count << " median NRMSE "
                  << (std::isfinite(s.median) ? format_double(s.median) : std::string("n/a")) << " ("
                  << s.nrmse.size() << " oscillatory, " << s.non_oscillatory << " not)\n";
    }
    outputs.add("nrmse.json", pretty({{"metadata", metadata},
                                      {"target", target.name},
                                      {"channels", target.channels},
                                      {"dt", target.dt},
                                      {"summaries", std::move(per_count)}}));
    outputs.add("outcomes.jsonl", jsonl);

    // Overlay the first oscillatory trial against its target.
    std::vector<svg::Series> overlay;
    const std::size_t channels = std::min<std::size_t>(static_cast<std::size_t>(target.values.cols()), 3);
    const auto t_axis = time_axis(static_cast<std::size_t>(target.values.rows()) - c.washout, c.washout, target.dt);
    auto target_series = [&](std::size_t l) {
        std::vector<double> y(t_axis.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            y[k] = target.values(static_cast<Eigen::Index>(k + c.washout), static_cast<Eigen::Index>(l));
        }
        return svg::Series{"target " + target.channels[l], t_axis, y};
    };
    for (std::size_t l = 0; l < channels; ++l) {
        overlay.push_back(target_series(l));
    }
    for (const auto& s : summaries) {
        const auto hit = std::find_if(s.outcomes.begin(), s.outcomes.end(), [](const auto& o) { return o.oscillatory; });
        if (hit == s.outcomes.end()) {
            continue;
        }
        ReproduceParams trial = p;
        trial.topology.sub_count = s.sub_count;
        trial.base_seed = hit->seed;
        const auto fit = fit_waveform(trial, target);
        for (std::size_t l = 0; l < channels; ++l) {
            const auto col = fit.prediction.col(static_cast<Eigen::Index>(l));
            overlay.push_back({"readout " + target.channels[l] + " (M=" + std::to_string(s.sub_count) + ")", t_axis,
                               std::vector<double>(col.data(), col.data() + col.size())});
        }
        break;
    }
    outputs.add("overlay.svg", svg::line_chart("Target vs readout (" + target.name + ")", "t", "value", overlay,
                                               ctx.stamp()));

    if (boxplot) {
        outputs.add("boxplot.csv", csv_with_metadata(metadata, [&](std::ostream& out) {
                        out << "sub_count,trial,nrmse\n";
                        for (const auto& s : summaries) {
                            for (std::size_t t = 0; t < s.outcomes.size(); ++t) {
                                if (s.outcomes[t].oscillatory) {
                                    out << s.sub_count << ',' << t << ','
                                        << format_double(s.outcomes[t].median_nrmse()) << '\n';
                                }
                            }
                        }
                    }));
        std::vector<std::string> categories;
        std::vector<std::vector<double>> samples;
        for (const auto& s : summaries) {
            categories.push_back("M=" + std::to_string(s.sub_count));
            samples.push_back(s.nrmse);
        }
        outputs.add("boxplot.svg", svg::boxplot("NRMSE by sub-reservoir count", "NRMSE", categories, samples,
                                                ctx.stamp()));
    }
    return kOk;
}

int run_demo(const Context& ctx, Outputs& outputs)
{
    const auto c = ctx.parameters.get<DemoConfig>();
    const std::vector<TopologyKind> kinds{TopologyKind::dense, TopologyKind::sparse, TopologyKind::block_diagonal,
                                          TopologyKind::weakly_coupled};
    std::vector<std::string> names;
    for (auto kind : kinds) {
        const std::string prefix = std::string(to_string(kind)) + "_";
        for (const char* suffix : {"weights.svg", "trajectory.csv", "report.json", "traces.svg"}) {
            names.push_back(prefix + suffix);
        }
    }
    outputs.check(names);

    for (std::size_t k = 0; k < kinds.size(); ++k) {
        TopologySpec spec;
        spec.kind = kinds[k];
        spec.n = c.n;
        spec.density = c.density;
        spec.sub_count = kinds[k] == TopologyKind::block_diagonal || kinds[k] == TopologyKind::weakly_coupled
                             ? c.sub_count
                             : 1;
        spec.coupling_scale = c.coupling_scale;
        spec.coupling_density = c.coupling_density;
        spec.inject_ensemble = c.inject_ensemble;
        // Same seed for every kind so that the block draws are shared where the structure allows.
        const auto sim = simulate(spec, c.rho, c.leak, 0.0, c.tau, c.classifier, ctx.seed);
        const std::string name(to_string(kinds[k]));
        outputs.add(name + "_weights.svg", svg::matrix_image("Weights (" + name + ")", sim.weights, ctx.stamp()));
        add_simulation(outputs, ctx, name + "_", sim, c.trace_units, "Unit traces (" + name + ")");
        std::cout << name << ": " << sim.report.oscillating_count() << "/" << c.n << " units oscillating\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct Command {
    std::string name;
    CLI::App* app = nullptr;
    json defaults;
    std::vector<std::function<void(json&)>> patches;
    std::function<int(const Context&, Outputs&)> run;

    template <class T>
    void option(const std::string& flag, const std::string& key, const std::string& help)
    {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(flag, *value, help);
        patches.push_back([opt, value, key](json& p) {
            if (opt->count() > 0) {
                p[key] = *value;
            }
        });
    }

    void flag(const std::string& flag, const std::string& key, const std::string& help)
    {
        auto value = std::make_shared<bool>(false);
        CLI::Option* opt = app->add_flag(flag, *value, help);
        patches.push_back([opt, value, key](json& p) {
            if (opt->count() > 0) {
                p[key] = *value;
            }
        });
    }

    void classifier_options()
    {
        option<std::size_t>("--window", "window", "Trailing analysis window (samples)");
        option<double>("--min-stddev", "min_stddev", "Amplitude floor for oscillation");
        option<double>("--min-peak-fraction", "min_peak_fraction", "Peak share of non-DC power");
    }
};

Seed seed_from_env()
{
    const char* text = std::getenv("SOESN_SEED");
    if (text == nullptr || *text == '\0') {
        return 0;
    }
    Seed seed = 0;
    const std::string_view view(text);
    const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), seed);
    if (ec != std::errc() || ptr != view.data() + view.size()) {
        throw InputError("SOESN_SEED must be an unsigned integer, got `" + std::string(view) + "`");
    }
    return seed;
}

Context resolve(const Command& cmd, const Common& common)
{
    Context ctx;
    ctx.command = cmd.name;
    ctx.common = &common;
    json parameters = cmd.defaults;
    std::optional<Seed> file_seed;
    if (!common.config_path.empty()) {
        json file;
        try {
            file = json::parse(read_text_file(common.config_path));
        } catch (const json::parse_error& e) {
            throw InputError("config " + common.config_path + ": " + e.what());
        }
        const RunFile run = parse_run_file(file);
        if (!run.command.empty() && run.command != cmd.name) {
            throw InputError("config " + common.config_path + " is for `" + run.command + "`, not `" + cmd.name + "`");
        }
        for (const auto& [key, value] : run.parameters.items()) {
            parameters[key] = value;
        }
        file_seed = run.seed;
    }
    for (const auto& patch : cmd.patches) {
        patch(parameters);
    }
    if (common.seed_option->count() > 0) {
        ctx.seed = common.seed;
    } else if (file_seed) {
        ctx.seed = *file_seed;
    } else {
        ctx.seed = seed_from_env();
    }
    ctx.parameters = std::move(parameters);
    return ctx;
}

// Parses and re-serializes the parameters so the echo is the fully resolved config.
template <class Config>
json normalized(const json& parameters)
{
    return json(parameters.get<Config>());
}

int execute(const Command& cmd, const Common& common)
{
    Context ctx = resolve(cmd, common);
    if (cmd.name == "generate") {
        ctx.parameters = normalized<GenerateConfig>(ctx.parameters);
    } else if (cmd.name == "sweep") {
        ctx.parameters = normalized<SweepConfig>(ctx.parameters);
    } else if (cmd.name == "inject-experiment") {
        ctx.parameters = normalized<InjectConfig>(ctx.parameters);
    } else if (cmd.name == "reproduce") {
        ctx.parameters = normalized<ReproduceConfig>(ctx.parameters);
    } else {
        ctx.parameters = normalized<DemoConfig>(ctx.parameters);
    }
    Outputs outputs(common.out, common.force);
    outputs.check({"config.echo.json"});
    const int code = cmd.run(ctx, outputs);
    outputs.add("config.echo.json", pretty({{"command", ctx.command}, {"seed", ctx.seed}, {"parameters", ctx.parameters}}));
    outputs.flush();
    std::cout << "wrote " << common.out << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Self-oscillatory echo state network experiments"};
    app.require_subcommand(1);
    Common common;

    std::vector<Command> commands;
    auto add_command = [&](const std::string& name, const std::string& help, json defaults,
                           std::function<int(const Context&, Outputs&)> run) -> Command& {
        Command& cmd = commands.emplace_back();
        cmd.name = name;
        cmd.app = app.add_subcommand(name, help);
        cmd.defaults = std::move(defaults);
        cmd.run = std::move(run);
        return cmd;
    };
    commands.reserve(5);

    auto& generate = add_command("generate", "Build one reservoir, run it and classify the trajectory",
                                 json(GenerateConfig{}), run_generate);
    generate.option<std::string>("--kind", "kind", "dense | sparse | block_diagonal | weakly_coupled");
    generate.option<std::size_t>("--n", "n", "Number of units");
    generate.option<double>("--density", "density", "Sparse connection density");
    generate.option<std::size_t>("--sub", "sub_count", "Sub-reservoir count for block kinds");
    generate.option<double>("--coupling-scale", "coupling_scale", "Inter-block coupling range");
    generate.option<double>("--coupling-density", "coupling_density", "Inter-block coupling density");
    generate.flag("--inject-ensemble", "inject_ensemble", "Write the two-neuron oscillator into units 0-1");
    generate.option<double>("--rho", "rho", "Target spectral radius");
    generate.option<double>("--leak", "leak", "Leak rate (mean when --leak-sigma > 0)");
    generate.option<double>("--leak-sigma", "leak_sigma", "Spread of per-unit leak rates");
    generate.option<std::size_t>("--tau", "tau", "Steps to run");
    generate.option<std::size_t>("--trace-units", "trace_units", "Units drawn in traces.svg");
    generate.classifier_options();

    auto& sweep = add_command("sweep", "Oscillation ratio over a leak x spectral-radius grid", json(SweepConfig{}),
                              run_sweep);
    sweep.option<std::vector<double>>("--leak", "leak_values", "Leak values (list)");
    sweep.option<std::vector<double>>("--rho", "rho_values", "Spectral radius values (list)");
    sweep.option<std::size_t>("--trials", "trials", "Reservoirs per cell");
    sweep.option<std::size_t>("--n", "n", "Units per reservoir");
    sweep.option<std::size_t>("--tau", "tau", "Steps per run");
    sweep.classifier_options();
    std::size_t cells = 0;
    CLI::Option* cells_option =
        sweep.app->add_option("--cells", cells, "Keep only the first k values of each axis")->check(CLI::PositiveNumber);
    sweep.patches.push_back([&cells, cells_option](json& p) {
        if (cells_option->count() == 0) {
            return;
        }
        for (const char* axis : {"leak_values", "rho_values"}) {
            if (p[axis].is_array() && p[axis].size() > cells) {
                p[axis].erase(p[axis].begin() + static_cast<std::ptrdiff_t>(cells), p[axis].end());
            }
        }
    });

    auto& inject = add_command("inject-experiment", "Oscillation ratio with and without the injected ensemble",
                               json(InjectConfig{}), run_inject);
    inject.option<std::vector<std::size_t>>("--populations", "populations", "Reservoir sizes (list)");
    inject.option<std::size_t>("--trials", "trials", "Paired trials per size");
    inject.option<std::size_t>("--tau", "tau", "Steps per run");
    inject.option<double>("--rho", "rho", "Target spectral radius");
    inject.option<double>("--leak", "leak", "Leak rate");
    inject.classifier_options();

    auto& reproduce = add_command("reproduce", "Train a readout to reproduce a target waveform",
                                  json(ReproduceConfig{}), run_reproduce);
    reproduce.option<std::string>("--target", "target", "sine | sine_literal | square | lorenz");
    reproduce.option<std::string>("--topology", "topology", "weakly_coupled | block_diagonal | dense");
    reproduce.option<std::size_t>("--n", "n", "Units");
    reproduce.option<std::vector<std::size_t>>("--sub", "sub", "Sub-reservoir count(s); a list gives a boxplot");
    reproduce.option<double>("--coupling-scale", "coupling_scale", "Inter-block coupling range");
    reproduce.option<double>("--coupling-density", "coupling_density", "Inter-block coupling density");
    reproduce.option<std::size_t>("--trials", "trials", "Independent trials per count");
    reproduce.option<std::size_t>("--tau", "tau", "Steps");
    reproduce.option<double>("--dt", "dt", "Sampling step of the target");
    reproduce.option<double>("--freq", "freq", "Sine frequency");
    reproduce.flag("--standardize", "standardize", "Standardize target columns");
    reproduce.option<double>("--leak-mu", "leak_mu", "Mean leak rate");
    reproduce.option<double>("--leak-sigma", "leak_sigma", "Leak rate spread");
    reproduce.option<double>("--rho", "rho", "Spectral radius per block");
    reproduce.option<double>("--lambda", "lambda", "Ridge parameter");
    reproduce.option<std::size_t>("--washout", "washout", "Rows dropped before training");
    reproduce.option<std::size_t>("--max-attempts", "max_attempts", "Reservoir draws before giving up");
    reproduce.classifier_options();

    auto& demo = add_command("topology-demo", "Build and run every topology kind side by side", json(DemoConfig{}),
                             run_demo);
    demo.option<std::size_t>("--n", "n", "Units");
    demo.option<std::size_t>("--sub", "sub_count", "Sub-reservoir count for block kinds");
    demo.option<double>("--density", "density", "Sparse density");
    demo.option<double>("--coupling-scale", "coupling_scale", "Inter-block coupling range");
    demo.option<double>("--coupling-density", "coupling_density", "Inter-block coupling density");
    demo.flag("--inject-ensemble", "inject_ensemble", "Write the two-neuron oscillator into units 0-1");
    demo.option<double>("--rho", "rho", "Target spectral radius");
    demo.option<double>("--leak", "leak", "Leak rate");
    demo.option<std::size_t>("--tau", "tau", "Steps");
    demo.classifier_options();

    for (auto& cmd : commands) {
        CLI::App* sub = cmd.app;
        sub->add_option("--config", common.config_path, "JSON config (e.g. a config.echo.json)");
        sub->add_option("--out", common.out, "Output directory");
        sub->add_flag("--force", common.force, "Overwrite existing outputs");
        sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--deterministic", common.deterministic, "Omit timestamps from SVG output");
    }
    // One --seed per subcommand, all writing the same variable.
    std::vector<CLI::Option*> seed_options;
    for (auto& cmd : commands) {
        seed_options.push_back(cmd.app->add_option("--seed", common.seed, "Base seed (default: $SOESN_SEED or 0)"));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (commands[i].app->parsed()) {
                common.seed_option = seed_options[i];
                return execute(commands[i], common);
            }
        }
        return kUnexpected;
    } catch (const InputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUnexpected;
    }
}
