// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Usage: soesn_acceptance <path-to-soesn-cli> [--strict] [--only k[,k...]] [--report FILE]
// Without --strict the exit code only reports crashes; with it, any FAIL exits 1.
// --report also writes the verdict lines to FILE.

#include "oracles.hpp"

#include "soesn/experiments.hpp"
#include "soesn/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace soesn;
namespace fs = std::filesystem;

namespace {

constexpr Seed kSuiteSeed = 20240601;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v)
{
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

double median_of(const std::vector<double>& values)
{
    return values.empty() ? std::nan("") : quantile(values, 0.5);
}

std::vector<double> oscillatory_medians(const std::vector<TrialOutcome>& outcomes)
{
    std::vector<double> out;
    for (const auto& o : outcomes) {
        if (o.oscillatory) {
            out.push_back(o.median_nrmse());
        }
    }
    return out;
}

ReproduceParams weakly_coupled(std::size_t n, std::size_t m, Seed seed)
{
    ReproduceParams p;
    p.topology.kind = TopologyKind::weakly_coupled;
    p.topology.n = n;
    p.topology.sub_count = m;
    p.leak_mu = 0.6;
    p.leak_sigma = 0.1;
    p.rho = 1.25;
    p.lambda = 1e-8;
    p.washout = 100;
    p.base_seed = seed;
    return p;
}

// Pure sine with the square wave's fundamental: 5 Hz at dt = 0.01, a 20-step period.
TargetSignal sine_target(std::size_t tau)
{
    return gen_sinusoid(tau, 0.01, SineMode::pure_sine, 5.0);
}

// ---------------------------------------------------------------------------

Verdict criterion_1()
{
    SweepParams p;
    p.leak_values = {0.5};
    p.rho_values = {0.8, 2.0};
    p.trials = 200;
    p.n = 100;
    p.tau = 1000;
    p.base_seed = derive_seed(kSuiteSeed, {1});
    const auto result = sweep_heatmap(p);
    const double low = result.grid(0, 0);
    const double high = result.grid(0, 1);
    return {low <= 0.02 && high >= low + 0.20,
            "ratio(rho=0.8)=" + fmt(low) + " (<= 0.02), ratio(rho=2.0)=" + fmt(high) + " (>= ratio(0.8) + 0.20)"};
}

Verdict criterion_2()
{
    const RealMatrix w = two_neuron_ensemble().weights;
    auto bin_at = [&](double leak) -> std::optional<std::size_t> {
        Reservoir r(w, leak, init_state(2, derive_seed(kSuiteSeed, {2})));
        return classify_trajectory(r.run(1000), 100).per_unit[0].dominant_bin;
    };
    const auto slow = bin_at(0.2);
    const auto fast = bin_at(0.8);
    const bool pass = slow && fast && *slow < *fast;
    return {pass, "bin(leak=0.2)=" + (slow ? std::to_string(*slow) : std::string("none")) +
                      " < bin(leak=0.8)=" + (fast ? std::to_string(*fast) : std::string("none"))};
}

Verdict criterion_3()
{
    InjectionParams p;
    p.populations = {10, 50, 500};
    p.trials = 500;
    p.tau = 1000;
    p.rho = 1.25;
    p.leak = 0.5;
    p.base_seed = derive_seed(kSuiteSeed, {3});
    const auto rows = injection_ratio_experiment(p);
    const double gap10 = rows[0].ratio_with - rows[0].ratio_without;
    const double gap50 = rows[1].ratio_with - rows[1].ratio_without;
    const double gap500 = rows[2].ratio_with - rows[2].ratio_without;
    return {gap10 >= 0.10 && gap500 < gap10,
            "gap N=10 " + fmt(gap10) + " (>= 0.10), N=50 " + fmt(gap50) + ", N=500 " + fmt(gap500) +
                " (< gap N=10)"};
}

std::vector<SurveyEntry> survey()
{
    static const std::vector<SurveyEntry> entries = [] {
        SurveyParams p;
        p.reservoirs = 20;
        p.n = 100;
        p.rho = 1.25;
        p.leak = 0.5;
        p.tau = 1000;
        p.base_seed = derive_seed(kSuiteSeed, {4});
        return dense_reservoir_survey(p);
    }();
    return entries;
}

Verdict criterion_4()
{
    const auto entries = survey();
    std::size_t locked = 0;
    double worst = 1.0;
    for (const auto& e : entries) {
        locked += e.shared_fraction >= 0.95 ? 1 : 0;
        worst = std::min(worst, e.shared_fraction);
    }
    return {entries.size() == 20 && locked == entries.size(),
            std::to_string(locked) + "/" + std::to_string(entries.size()) +
                " reservoirs with >= 95% of oscillating units in one +-1 bin band (worst " + fmt(worst) + ")"};
}

Verdict criterion_5()
{
    const auto entries = survey();
    std::size_t agree = 0;
    for (const auto& e : entries) {
        agree += e.washout_agrees ? 1 : 0;
    }
    return {entries.size() == 20 && agree >= 18,
            std::to_string(agree) + "/" + std::to_string(entries.size()) +
                " reservoirs with identical per-unit bins (+-1) from two initial states (>= 18)"};
}

Verdict criterion_6()
{
    const auto p = weakly_coupled(504, 8, derive_seed(kSuiteSeed, {6}));
    const auto sine = oscillatory_medians(reproduce_trials(p, sine_target(1000), 30));
    const auto square = oscillatory_medians(reproduce_trials(p, gen_square(1000, 0.01), 30));
    const double sine_median = median_of(sine);
    const double square_median = median_of(square);
    return {sine_median < 0.05 && square_median < 0.25,
            "N=504 M=8: sine median NRMSE " + fmt(sine_median) + " (< 0.05, " + std::to_string(sine.size()) +
                "/30 oscillatory), square " + fmt(square_median) + " (< 0.25, " + std::to_string(square.size()) +
                "/30 oscillatory)"};
}

Verdict criterion_7()
{
    LorenzParams lorenz;
    lorenz.tau = 2000;
    const auto p = weakly_coupled(1008, 16, derive_seed(kSuiteSeed, {7}));
    const auto medians = oscillatory_medians(reproduce_trials(p, gen_lorenz(lorenz), 15));
    const double m = median_of(medians);
    return {m < 0.15, "N=1008 M=16 Lorenz: median per-dimension NRMSE " + fmt(m) + " (< 0.15, " +
                          std::to_string(medians.size()) + "/15 oscillatory)"};
}

Verdict criterion_8()
{
    const auto p = weakly_coupled(512, 1, derive_seed(kSuiteSeed, {8}));
    const auto summaries = subreservoir_count_sweep(p, 512, {1, 8, 128}, sine_target(1000), 30);
    const double m1 = summaries[0].median;
    const double m8 = summaries[1].median;
    const double m128 = summaries[2].median;
    return {m8 <= m1 && m8 <= m128,
            "median NRMSE M=1 " + fmt(m1) + ", M=8 " + fmt(m8) + ", M=128 " + fmt(m128) + " (M=8 lowest)"};
}

Verdict criterion_9()
{
    std::mt19937_64 rng(derive_seed(kSuiteSeed, {9}));
    double ridge_worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto rows = static_cast<Eigen::Index>(60 + i * 4);
        const auto cols = static_cast<Eigen::Index>(5 + i % 30);
        const RealMatrix x = oracle::random_matrix(rows, cols, rng);
        const RealMatrix y = oracle::random_matrix(rows, 2, rng);
        const RealMatrix expected = oracle::ridge_normal_equations(x, y, 1e-8);
        const RealMatrix got = train_ridge(x, y, 1e-8, 0).w_out;
        ridge_worst = std::max(ridge_worst, (got - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff());
    }

    double dft_worst = 0.0;
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> signal(static_cast<std::size_t>(16 + 7 * i));
        for (double& s : signal) {
            s = value(rng);
        }
        const auto got = periodogram(signal).bin_power;
        const auto expected = oracle::direct_periodogram(signal);
        for (std::size_t k = 0; k < got.size(); ++k) {
            dft_worst = std::max(dft_worst, std::abs(got[k] - expected[k]));
        }
    }

    LorenzParams lorenz;
    lorenz.tau = 2;
    const auto values = gen_lorenz(lorenz).values;
    const auto step = oracle::classic_rk4_step(lorenz.x0, lorenz.dt, lorenz.sigma, lorenz.alpha, lorenz.beta);
    double rk_error = 0.0;
    for (Eigen::Index d = 0; d < 3; ++d) {
        rk_error = std::max(rk_error, std::abs(values(1, d) - step[static_cast<std::size_t>(d)]));
    }

    double homogeneity_worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const RealMatrix w = oracle::random_matrix(40, 40, rng);
        const double c = 0.1 + 3.0 * std::abs(value(rng));
        const double base = spectral_radius(w);
        homogeneity_worst = std::max(homogeneity_worst, std::abs(spectral_radius(c * w) - c * base) / (c * base));
    }

    const bool pass = ridge_worst <= 1e-6 && dft_worst <= 1e-9 && rk_error <= 1e-12 && homogeneity_worst <= 1e-6;
    return {pass, "ridge " + fmt(ridge_worst) + " (<= 1e-6 rel), periodogram " + fmt(dft_worst) +
                      " (<= 1e-9 abs), RK4 " + fmt(rk_error) + " (<= 1e-12), homogeneity " + fmt(homogeneity_worst) +
                      " (<= 1e-6 rel)"};
}

Verdict criterion_10()
{
    constexpr double pi = std::numbers::pi;
    auto make = [](auto&& f) {
        std::vector<double> s(1000);
        for (std::size_t t = 0; t < s.size(); ++t) {
            s[t] = f(static_cast<double>(t));
        }
        return s;
    };
    std::vector<double> logistic(1000);
    logistic[0] = 0.3;
    for (std::size_t t = 1; t < logistic.size(); ++t) {
        logistic[t] = 3.9 * logistic[t - 1] * (1.0 - logistic[t - 1]);
    }
    const std::vector<std::pair<std::vector<double>, bool>> corpus{
        {make([](double) { return 0.7; }), false},
        {make([](double t) { return t < 500 ? 1.0 - t / 500.0 : 0.0; }), false},
        {make([](double t) { return std::exp(-t / 50.0) * std::sin(0.3 * t); }), false},
        {make([&](double t) { return std::sin(2 * pi * 10 * t / 100); }), true},
        {make([&](double t) { return std::sin(2 * pi * 3 * t / 100) + 0.5 * std::sin(2 * pi * 11 * t / 100); }), true},
        {logistic, true},
    };
    std::size_t correct = 0;
    for (const auto& [signal, expected] : corpus) {
        correct += classify_unit(signal).is_oscillating == expected ? 1 : 0;
    }
    return {correct == corpus.size(), std::to_string(correct) + "/6 synthetic signals classified correctly"};
}

int shell(const std::string& command)
{
    const int status = std::system((command + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict criterion_11(const std::string& cli)
{
    const fs::path root = fs::temp_directory_path() / ("soesn_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"generate", "--n 100 --rho 1.25 --leak 0.5 --tau 1000 --seed 7"},
        {"generate", "--kind weakly_coupled --n 96 --sub 4 --leak-sigma 0.1 --seed 8"},
        {"sweep", "--trials 4 --cells 4 --seed 3"},
        {"inject-experiment", "--trials 10 --populations 4 10 --seed 4"},
        {"reproduce", "--target square --n 128 --sub 1 4 --trials 3 --seed 5"},
        {"reproduce", "--target lorenz --n 96 --sub 4 --tau 600 --seed 6"},
        {"topology-demo", "--n 60 --tau 400 --seed 9"},
    };
    std::size_t identical = 0;
    std::vector<std::string> mismatches;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& [command, args] = runs[i];
        const fs::path first = root / (std::to_string(i) + "_a");
        const fs::path second = root / (std::to_string(i) + "_b");
        const std::string base = "\"" + cli + "\" " + command;
        if (shell(base + " " + args + " --jobs 1 --deterministic --out \"" + first.string() + "\"") != 0 ||
            shell(base + " --config \"" + (first / "config.echo.json").string() +
                  "\" --jobs 3 --deterministic --out \"" + second.string() + "\"") != 0) {
            mismatches.push_back(command + " (run failed)");
            continue;
        }
        bool same = true;
        for (const auto& entry : fs::directory_iterator(first)) {
            const fs::path other = second / entry.path().filename();
            if (!fs::exists(other) || read_text_file(entry.path()) != read_text_file(other)) {
                same = false;
                mismatches.push_back(command + ":" + entry.path().filename().string());
            }
        }
        identical += same ? 1 : 0;
    }
    fs::remove_all(root);
    std::string detail = std::to_string(identical) + "/" + std::to_string(runs.size()) +
                         " CLI runs byte-identical when rerun from config.echo.json with --jobs 3";
    for (const auto& m : mismatches) {
        detail += "; differs: " + m;
    }
    return {identical == runs.size(), detail};
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: soesn_acceptance <soesn-cli> [--strict] [--only k[,k...]]\n";
        return 2;
    }
    const std::string cli = argv[1];
    bool strict = false;
    std::set<int> only;
    std::string report_path;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--strict") {
            strict = true;
        } else if (arg == "--report" && i + 1 < argc) {
            report_path = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            for (std::string item; std::getline(list, item, ',');) {
                only.insert(std::stoi(item));
            }
        } else {
            std::cerr << "unknown argument " << arg << "\n";
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"sub-critical spectral radius suppresses oscillation", criterion_1},
        {"leak controls ensemble frequency", criterion_2},
        {"ensemble injection raises the oscillation ratio", criterion_3},
        {"phase locking in dense oscillatory reservoirs", criterion_4},
        {"initial state is washed out", criterion_5},
        {"sine and square waveform reproduction", criterion_6},
        {"Lorenz trajectory fit", criterion_7},
        {"interior optimum in sub-reservoir count", criterion_8},
        {"oracle suites", criterion_9},
        {"classifier sanity corpus", criterion_10},
        {"CLI reproducibility", [&] { return criterion_11(cli); }},
    };

    std::ostringstream report;
    auto emit = [&](const std::string& line) {
        std::cout << line << std::endl;
        report << line << '\n';
    };
    std::size_t passed = 0;
    std::size_t ran = 0;
    bool crashed = false;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i + 1);
        if (!only.empty() && !only.contains(number)) {
            continue;
        }
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Verdict verdict;
        try {
            verdict = criteria[i].second();
        } catch (const std::exception& e) {
            verdict = {false, std::string("exception: ") + e.what()};
            crashed = true;
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        passed += verdict.pass ? 1 : 0;
        emit(std::string(verdict.pass ? "PASS" : "FAIL") + "  " + std::to_string(number) + ". " + criteria[i].first +
             ": " + verdict.detail + " [" + fmt(seconds) + " s]");
    }
    emit(std::to_string(passed) + "/" + std::to_string(ran) + " criteria passed");
    if (!report_path.empty()) {
        write_text_file(report_path, report.str());
    }
    if (crashed) {
        return 1;
    }
    return strict && passed != ran ? 1 : 0;
}
