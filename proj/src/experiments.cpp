#include "soesn/experiments.hpp"

#include "soesn/detail/parallel.hpp"
#include "soesn/errors.hpp"
#include "soesn/io.hpp"
#include "soesn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>

namespace soesn {

namespace {

void require_window(std::size_t tau, std::size_t window, const char* what)
{
    if (tau == 0) {
        throw InputError(std::string(what) + ": tau must be at least 1");
    }
    if (window > tau + 1) {
        throw InputError(std::string(what) + ": window " + std::to_string(window) + " exceeds the " +
                         std::to_string(tau + 1) + "-row trajectory");
    }
}

bool runs_self_oscillating(const RealMatrix& w, double leak, const RealVector& x0, std::size_t tau,
                           std::size_t window, const ClassifierThresholds& thresholds)
{
    Reservoir reservoir(w, leak, x0);
    return classify_trajectory(reservoir.run(tau), window, thresholds).reservoir_is_self_oscillatory;
}

std::string describe_cell(double leak, double rho, std::size_t trial)
{
    return "leak=" + format_double(leak) + " rho=" + format_double(rho) + " trial=" + std::to_string(trial);
}

} // namespace

// ---------------------------------------------------------------------------

SweepResult sweep_heatmap(const SweepParams& params)
{
    if (params.trials == 0) {
        throw InputError("sweep_heatmap: trials must be at least 1");
    }
    if (params.n == 0) {
        throw InputError("sweep_heatmap: n must be at least 1");
    }
    if (params.leak_values.empty() || params.rho_values.empty()) {
        throw InputError("sweep_heatmap: leak and rho ranges must be non-empty");
    }
    for (double a : params.leak_values) {
        if (!(a > 0.0 && a <= 1.0)) {
            throw InputError("sweep_heatmap: leak value " + format_double(a) + " is outside (0, 1]");
        }
    }
    for (double rho : params.rho_values) {
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw InputError("sweep_heatmap: spectral radius " + format_double(rho) + " must be positive");
        }
    }
    require_window(params.tau, params.window, "sweep_heatmap");

    const std::size_t leaks = params.leak_values.size();
    const std::size_t rhos = params.rho_values.size();
    // hits[t][i * rhos + j]
    std::vector<std::vector<char>> hits(params.trials, std::vector<char>(leaks * rhos, 0));

    detail::parallel_for(params.trials, params.jobs, [&](std::size_t t) {
        const Seed trial_seed = derive_seed(params.base_seed, {t});
        const RealMatrix raw = build_dense(params.n, derive_seed(trial_seed, {kWeightStream}));
        const RealVector x0 = init_state(params.n, derive_seed(trial_seed, {kStateStream}));
        const double raw_rho = spectral_radius(raw);
        if (raw_rho < 1e-12) {
            throw CannotScaleError("sweep_heatmap: trial " + std::to_string(t) + " drew a matrix with zero spectral radius");
        }
        for (std::size_t j = 0; j < rhos; ++j) {
            const RealMatrix w = raw * (params.rho_values[j] / raw_rho);
            for (std::size_t i = 0; i < leaks; ++i) {
                try {
                    hits[t][i * rhos + j] = runs_self_oscillating(w, params.leak_values[i], x0, params.tau,
                                                                  params.window, params.thresholds);
                } catch (const NumericError& e) {
                    throw NumericError("sweep_heatmap: " + describe_cell(params.leak_values[i], params.rho_values[j], t) +
                                       ": " + e.what());
                }
            }
        }
    });

    SweepResult result;
    result.trials_per_cell = params.trials;
    result.leak_values = params.leak_values;
    result.rho_values = params.rho_values;
    result.base_seed = params.base_seed;
    result.grid = RealMatrix::Zero(static_cast<Eigen::Index>(leaks), static_cast<Eigen::Index>(rhos));
    for (std::size_t i = 0; i < leaks; ++i) {
        for (std::size_t j = 0; j < rhos; ++j) {
            std::size_t count = 0;
            for (std::size_t t = 0; t < params.trials; ++t) {
                count += hits[t][i * rhos + j] ? 1 : 0;
            }
            result.grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                static_cast<double>(count) / static_cast<double>(params.trials);
        }
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const nlohmann::json& metadata)
{
    out << "# " << metadata.dump() << '\n';
    out << "leak,rho,ratio,trials\n";
    for (std::size_t i = 0; i < result.leak_values.size(); ++i) {
        for (std::size_t j = 0; j < result.rho_values.size(); ++j) {
            out << format_double(result.leak_values[i]) << ',' << format_double(result.rho_values[j]) << ','
                << format_double(result.grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << ','
                << result.trials_per_cell << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

std::vector<InjectionRow> injection_ratio_experiment(const InjectionParams& params)
{
    if (params.trials == 0) {
        throw InputError("injection_ratio_experiment: trials must be at least 1");
    }
    if (!(params.leak > 0.0 && params.leak <= 1.0)) {
        throw InputError("injection_ratio_experiment: leak must be in (0, 1]");
    }
    if (!(params.rho > 0.0)) {
        throw InputError("injection_ratio_experiment: rho must be positive");
    }
    for (std::size_t population : params.populations) {
        if (population < 2) {
            throw InputError("injection_ratio_experiment: every population must be at least 2");
        }
    }
    require_window(params.tau, params.window, "injection_ratio_experiment");

    const EnsembleSpec ensemble = two_neuron_ensemble();
    std::vector<InjectionRow> rows;
    for (std::size_t population : params.populations) {
        std::vector<char> without(params.trials, 0);
        std::vector<char> with(params.trials, 0);
        detail::parallel_for(params.trials, params.jobs, [&](std::size_t t) {
            const Seed trial_seed = derive_seed(params.base_seed, {population, t});
            const RealMatrix w = scale_to_spectral_radius(
                build_dense(population, derive_seed(trial_seed, {kWeightStream})), params.rho);
            const RealVector x0 = init_state(population, derive_seed(trial_seed, {kStateStream}));
            without[t] = runs_self_oscillating(w, params.leak, x0, params.tau, params.window, params.thresholds);
            with[t] = runs_self_oscillating(inject_ensemble(w, ensemble), params.leak, x0, params.tau, params.window,
                                            params.thresholds);
        });
        const auto trials = static_cast<double>(params.trials);
        rows.push_back({population, static_cast<double>(std::count(without.begin(), without.end(), 1)) / trials,
                        static_cast<double>(std::count(with.begin(), with.end(), 1)) / trials});
    }
    return rows;
}

void write_injection_csv(std::ostream& out, const std::vector<InjectionRow>& rows, const nlohmann::json& metadata)
{
    out << "# " << metadata.dump() << '\n';
    out << "population,ratio_without,ratio_with\n";
    for (const auto& row : rows) {
        out << row.population << ',' << format_double(row.ratio_without) << ',' << format_double(row.ratio_with)
            << '\n';
    }
}

// ---------------------------------------------------------------------------

TargetSignal gen_sinusoid(std::size_t tau, double dt, SineMode mode, double freq)
{
    if (tau < 2) {
        throw InputError("gen_sinusoid: tau must be at least 2");
    }
    if (!(dt > 0.0)) {
        throw InputError("gen_sinusoid: dt must be positive");
    }
    TargetSignal target;
    target.name = mode == SineMode::literal_ode ? "sine_literal_ode" : "sine";
    target.dt = dt;
    target.channels = {"y"};
    target.values.resize(static_cast<Eigen::Index>(tau + 1), 1);
    for (std::size_t k = 0; k <= tau; ++k) {
        const double t = static_cast<double>(k) * dt;
        target.values(static_cast<Eigen::Index>(k), 0) =
            mode == SineMode::literal_ode ? 2.0 * t + 2.0 * std::sin(t) : std::sin(2.0 * std::numbers::pi * freq * t);
    }
    return target;
}

TargetSignal gen_square(std::size_t tau, double dt)
{
    if (tau < 2) {
        throw InputError("gen_square: tau must be at least 2");
    }
    if (!(dt > 0.0)) {
        throw InputError("gen_square: dt must be positive");
    }
    TargetSignal target;
    target.name = "square";
    target.dt = dt;
    target.channels = {"y"};
    target.values.resize(static_cast<Eigen::Index>(tau + 1), 1);
    for (std::size_t k = 0; k <= tau; ++k) {
        // sin(10 pi t) = sin(pi u) with u = 10 t half-periods elapsed.
        const double u = 10.0 * static_cast<double>(k) * dt;
        const double nearest = std::round(u);
        double value = 0.0;
        if (std::abs(u - nearest) > 1e-9) {
            value = std::fmod(std::floor(u), 2.0) == 0.0 ? 1.0 : -1.0;
        }
        target.values(static_cast<Eigen::Index>(k), 0) = value;
    }
    return target;
}

TargetSignal gen_lorenz(const LorenzParams& params)
{
    if (params.tau < 2) {
        throw InputError("gen_lorenz: tau must be at least 2");
    }
    if (!(params.dt > 0.0)) {
        throw InputError("gen_lorenz: dt must be positive");
    }
    using State = Eigen::Vector3d;
    const auto rhs = [&params](const State& s) {
        return State(params.sigma * (s.y() - s.x()), s.x() * (params.alpha - s.z()) - s.y(),
                     s.x() * s.y() - params.beta * s.z());
    };

    TargetSignal target;
    target.name = "lorenz";
    target.dt = params.dt;
    target.channels = {"x", "y", "z"};
    target.values.resize(static_cast<Eigen::Index>(params.tau + 1), 3);
    State s(params.x0[0], params.x0[1], params.x0[2]);
    target.values.row(0) = s.transpose();
    const double h = params.dt;
    for (std::size_t k = 1; k <= params.tau; ++k) {
        const State k1 = rhs(s);
        const State k2 = rhs(s + 0.5 * h * k1);
        const State k3 = rhs(s + 0.5 * h * k2);
        const State k4 = rhs(s + h * k3);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!s.allFinite()) {
            throw NumericError("gen_lorenz: state became non-finite at step " + std::to_string(k));
        }
        target.values.row(static_cast<Eigen::Index>(k)) = s.transpose();
    }
    return target;
}

TargetSignal standardized(const TargetSignal& target)
{
    TargetSignal out = target;
    for (Eigen::Index l = 0; l < out.values.cols(); ++l) {
        auto col = out.values.col(l);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(col.size()));
        if (sd > 0.0) {
            col /= sd;
        }
    }
    out.name += "_standardized";
    return out;
}

// ---------------------------------------------------------------------------

double TrialOutcome::median_nrmse() const
{
    if (!oscillatory || train_nrmse.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return quantile(train_nrmse, 0.5);
}

void to_json(nlohmann::json& j, const TrialOutcome& outcome)
{
    j = nlohmann::json{{"attempt_count", outcome.attempt_count},
                       {"oscillatory", outcome.oscillatory},
                       {"seed", outcome.seed}};
    if (outcome.oscillatory) {
        nlohmann::json errors = nlohmann::json::array();
        for (double e : outcome.train_nrmse) {
            errors.push_back(std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(nullptr));
        }
        j["train_nrmse"] = std::move(errors);
    }
}

StateTrajectory attempt_trajectory(const ReproduceParams& params, std::size_t attempt, std::size_t tau)
{
    const Seed attempt_seed = derive_seed(params.base_seed, {attempt});
    TopologySpec spec = params.topology;
    spec.seed = derive_seed(attempt_seed, {kWeightStream});
    const RealMatrix w = build_weights(spec, params.rho);
    const RealVector leak =
        sample_leak_vector(spec.n, params.leak_mu, params.leak_sigma, derive_seed(attempt_seed, {kLeakStream}));
    Reservoir reservoir(w, leak, init_state(spec.n, derive_seed(attempt_seed, {kStateStream})));
    return reservoir.run(tau);
}

WaveformFit fit_waveform(const ReproduceParams& params, const TargetSignal& target)
{
    params.topology.validate();
    const auto rows = static_cast<std::size_t>(target.values.rows());
    if (rows < params.washout + 2) {
        throw InputError("reproduce_waveform: target has " + std::to_string(rows) + " samples, needs at least washout + 2 = " +
                         std::to_string(params.washout + 2));
    }
    if (!target.values.allFinite()) {
        throw InputError("reproduce_waveform: target has non-finite values");
    }
    const std::size_t tau = rows - 1;
    require_window(tau, params.window, "reproduce_waveform");

    WaveformFit fit;
    fit.outcome.seed = params.base_seed;
    fit.washout = params.washout;
    for (std::size_t attempt = 0; attempt < params.max_attempts; ++attempt) {
        const StateTrajectory trajectory = attempt_trajectory(params, attempt, tau);
        fit.outcome.attempt_count = attempt + 1;

        if (!classify_trajectory(trajectory, params.window, params.thresholds).reservoir_is_self_oscillatory) {
            continue;
        }
        const ReadoutModel model = train_ridge(trajectory.rows(), target.values, params.lambda, params.washout);
        fit.outcome.oscillatory = true;
        fit.outcome.train_nrmse = model.train_nrmse;
        fit.prediction = predict(model, trajectory.rows().bottomRows(static_cast<Eigen::Index>(rows - params.washout)));
        return fit;
    }
    return fit;
}

TrialOutcome reproduce_waveform(const ReproduceParams& params, const TargetSignal& target)
{
    return fit_waveform(params, target).outcome;
}

std::vector<TrialOutcome> reproduce_trials(const ReproduceParams& params, const TargetSignal& target,
                                           std::size_t trials, unsigned jobs)
{
    std::vector<TrialOutcome> outcomes(trials);
    detail::parallel_for(trials, jobs, [&](std::size_t t) {
        ReproduceParams trial = params;
        trial.base_seed = derive_seed(params.base_seed, {t});
        outcomes[t] = reproduce_waveform(trial, target);
    });
    return outcomes;
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty()) {
        throw InputError("quantile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double position = q * static_cast<double>(values.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(position));
    const std::size_t upper = std::min(lower + 1, values.size() - 1);
    const double fraction = position - static_cast<double>(lower);
    return values[lower] + fraction * (values[upper] - values[lower]);
}

std::vector<SubCountSummary> subreservoir_count_sweep(const ReproduceParams& params, std::size_t n,
                                                      const std::vector<std::size_t>& sub_counts,
                                                      const TargetSignal& target, std::size_t trials, unsigned jobs)
{
    for (std::size_t m : sub_counts) {
        if (m == 0 || n % m != 0) {
            throw InputError("subreservoir_count_sweep: " + std::to_string(m) + " does not divide n = " +
                             std::to_string(n));
        }
    }
    std::vector<SubCountSummary> summaries;
    for (std::size_t m : sub_counts) {
        ReproduceParams per_count = params;
        per_count.topology.n = n;
        per_count.topology.sub_count = m;
        if (per_count.topology.kind != TopologyKind::block_diagonal) {
            per_count.topology.kind = TopologyKind::weakly_coupled;
        }
        SubCountSummary summary;
        summary.sub_count = m;
        summary.outcomes = reproduce_trials(per_count, target, trials, jobs);
        for (const auto& outcome : summary.outcomes) {
            if (outcome.oscillatory) {
                summary.nrmse.push_back(outcome.median_nrmse());
            } else {
                ++summary.non_oscillatory;
            }
        }
        if (summary.nrmse.empty()) {
            summary.median = summary.q1 = summary.q3 = std::numeric_limits<double>::quiet_NaN();
        } else {
            summary.median = quantile(summary.nrmse, 0.5);
            summary.q1 = quantile(summary.nrmse, 0.25);
            summary.q3 = quantile(summary.nrmse, 0.75);
        }
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

// ---------------------------------------------------------------------------

bool same_unit_bins(const OscillationReport& a, const OscillationReport& b)
{
    if (a.per_unit.size() != b.per_unit.size()) {
        throw DimensionError("same_unit_bins: reports cover different unit counts");
    }
    for (std::size_t i = 0; i < a.per_unit.size(); ++i) {
        const auto& ua = a.per_unit[i];
        const auto& ub = b.per_unit[i];
        if (ua.is_oscillating != ub.is_oscillating) {
            return false;
        }
        if (ua.is_oscillating) {
            const std::size_t x = *ua.dominant_bin;
            const std::size_t y = *ub.dominant_bin;
            if ((x > y ? x - y : y - x) > 1) {
                return false;
            }
        }
    }
    return true;
}

std::vector<SurveyEntry> dense_reservoir_survey(const SurveyParams& params)
{
    if (params.reservoirs == 0) {
        throw InputError("dense_reservoir_survey: need at least one reservoir");
    }
    if (!(params.leak > 0.0 && params.leak <= 1.0) || !(params.rho > 0.0)) {
        throw InputError("dense_reservoir_survey: leak must be in (0, 1] and rho positive");
    }
    require_window(params.tau, params.window, "dense_reservoir_survey");

    std::vector<SurveyEntry> found;
    const std::size_t batch = std::max<std::size_t>(params.reservoirs, params.jobs);
    for (std::size_t first = 0; first < params.max_draws && found.size() < params.reservoirs; first += batch) {
        const std::size_t count = std::min(batch, params.max_draws - first);
        std::vector<std::optional<SurveyEntry>> draws(count);
        detail::parallel_for(count, params.jobs, [&](std::size_t k) {
            const Seed seed = derive_seed(params.base_seed, {first + k});
            const RealMatrix w =
                scale_to_spectral_radius(build_dense(params.n, derive_seed(seed, {kWeightStream})), params.rho);
            Reservoir first_run(w, params.leak, init_state(params.n, derive_seed(seed, {kStateStream})));
            const auto report = classify_trajectory(first_run.run(params.tau), params.window, params.thresholds);
            if (!report.reservoir_is_self_oscillatory) {
                return;
            }
            Reservoir second_run(w, params.leak, init_state(params.n, derive_seed(seed, {kSecondStateStream})));
            const auto second = classify_trajectory(second_run.run(params.tau), params.window, params.thresholds);
            draws[k] = SurveyEntry{seed, report.oscillating_count(), shared_bin_fraction(report),
                                   same_unit_bins(report, second)};
        });
        for (auto& entry : draws) {
            if (entry && found.size() < params.reservoirs) {
                found.push_back(*entry);
            }
        }
    }
    return found;
}

// ---------------------------------------------------------------------------

nlohmann::json make_metadata(const std::string& command, Seed seed, const nlohmann::json& parameters)
{
    return nlohmann::json{{"artifact", "soesn"}, {"version", kVersion}, {"command", command}, {"seed", seed},
                          {"parameters", parameters}};
}

} // namespace soesn
