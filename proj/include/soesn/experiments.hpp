#pragma once

#include "soesn/oscillation.hpp"
#include "soesn/readout.hpp"
#include "soesn/topology.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace soesn {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Leak x spectral-radius sweep

struct SweepParams {
    std::vector<double> leak_values;
    std::vector<double> rho_values;
    std::size_t trials = 10;
    std::size_t n = 100;
    std::size_t tau = 1000;
    std::size_t window = kDefaultWindow;
    ClassifierThresholds thresholds;
    Seed base_seed = 0;
    unsigned jobs = 1;
};

struct SweepResult {
    /// grid(i, j) = oscillating fraction at leak_values[i], rho_values[j].
    RealMatrix grid;
    std::size_t trials_per_cell = 0;
    std::vector<double> leak_values;
    std::vector<double> rho_values;
    Seed base_seed = 0;
};

/// Dense reservoirs per (leak, rho) cell; trial t of every cell starts from the same raw
/// matrix and initial state, derived from (base_seed, t).
SweepResult sweep_heatmap(const SweepParams& params);

/// `leak,rho,ratio,trials` rows, preceded by `#` metadata lines.
void write_sweep_csv(std::ostream& out, const SweepResult& result, const nlohmann::json& metadata);

// ---------------------------------------------------------------------------
// Ensemble injection

struct InjectionParams {
    std::vector<std::size_t> populations{4, 10, 25, 50, 100};
    std::size_t trials = 100;
    std::size_t tau = 1000;
    double rho = 1.25;
    double leak = 0.5;
    std::size_t window = kDefaultWindow;
    ClassifierThresholds thresholds;
    Seed base_seed = 0;
    unsigned jobs = 1;
};

struct InjectionRow {
    std::size_t population = 0;
    double ratio_without = 0.0;
    double ratio_with = 0.0;
};

/// Paired arms: the same scaled dense matrix and initial state, with and without the
/// two-neuron ensemble written into the leading block (after scaling).
std::vector<InjectionRow> injection_ratio_experiment(const InjectionParams& params);

void write_injection_csv(std::ostream& out, const std::vector<InjectionRow>& rows,
                         const nlohmann::json& metadata);

// ---------------------------------------------------------------------------
// Target signals

struct TargetSignal {
    std::string name;
    double dt = 1.0;
    RealMatrix values;  ///< T x L
    std::vector<std::string> channels;
};

enum class SineMode { literal_ode, pure_sine };

/// literal_ode: x(t) = 2t + 2 sin t, the exact solution of dx/dt = 2(1 + cos t), x(0) = 0.
/// pure_sine: sin(2 pi freq t). Samples at t = k dt, k = 0..tau.
TargetSignal gen_sinusoid(std::size_t tau, double dt, SineMode mode, double freq);

/// sgn(sin(10 pi t)) at t = k dt, k = 0..tau, with sgn(0) = 0.
TargetSignal gen_square(std::size_t tau, double dt);

struct LorenzParams {
    std::size_t tau = 5000;
    double dt = 0.01;
    std::array<double, 3> x0{0.0, 1.0, 1.05};
    double sigma = 10.0;
    double alpha = 28.0;
    double beta = 2.667;
};

/// Fixed-step RK4; tau+1 samples of (x, y, z).
TargetSignal gen_lorenz(const LorenzParams& params);

/// Per-column standardization (zero mean, unit variance); constant columns are only centred.
TargetSignal standardized(const TargetSignal& target);

// ---------------------------------------------------------------------------
// Waveform reproduction

struct ReproduceParams {
    TopologySpec topology;
    double leak_mu = 0.6;
    double leak_sigma = 0.1;
    double rho = 1.25;
    double lambda = kDefaultRidge;
    std::size_t washout = kDefaultWashout;
    std::size_t max_attempts = 10;
    std::size_t window = kDefaultWindow;
    ClassifierThresholds thresholds;
    Seed base_seed = 0;
};

struct TrialOutcome {
    std::size_t attempt_count = 0;
    bool oscillatory = false;
    std::vector<double> train_nrmse;  ///< empty unless oscillatory
    Seed seed = 0;

    /// Median over output dimensions; NaN when not oscillatory.
    double median_nrmse() const;
};

void to_json(nlohmann::json& j, const TrialOutcome& outcome);

struct WaveformFit {
    TrialOutcome outcome;
    RealMatrix prediction;  ///< post-washout readout output; empty when not oscillatory
    std::size_t washout = 0;
};

/// The reservoir run used by reproduction attempt `attempt` (0-based), tau steps.
StateTrajectory attempt_trajectory(const ReproduceParams& params, std::size_t attempt, std::size_t tau);

/// Builds reservoirs from the topology until one self-oscillates (or max_attempts runs out),
/// then trains the readout on the trajectory against the target.
WaveformFit fit_waveform(const ReproduceParams& params, const TargetSignal& target);
TrialOutcome reproduce_waveform(const ReproduceParams& params, const TargetSignal& target);

/// `trials` independent reproductions; trial t uses base seed derive_seed(base_seed, {t}).
std::vector<TrialOutcome> reproduce_trials(const ReproduceParams& params, const TargetSignal& target,
                                           std::size_t trials, unsigned jobs = 1);

struct SubCountSummary {
    std::size_t sub_count = 0;
    std::vector<TrialOutcome> outcomes;
    std::vector<double> nrmse;  ///< median-over-dimension NRMSE of each oscillatory trial
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::size_t non_oscillatory = 0;
};

/// Runs reproduce_trials for every sub-reservoir count (weakly coupled unless the params'
/// topology says block_diagonal; M = 1 is a single dense block).
std::vector<SubCountSummary> subreservoir_count_sweep(const ReproduceParams& params, std::size_t n,
                                                      const std::vector<std::size_t>& sub_counts,
                                                      const TargetSignal& target, std::size_t trials,
                                                      unsigned jobs = 1);

/// Linear-interpolated quantile of a non-empty sample.
double quantile(std::vector<double> values, double q);

// ---------------------------------------------------------------------------
// Dense-reservoir surveys (phase locking, washout)

struct SurveyParams {
    std::size_t reservoirs = 20;
    std::size_t n = 100;
    double rho = 1.25;
    double leak = 0.5;
    std::size_t tau = 1000;
    std::size_t window = kDefaultWindow;
    ClassifierThresholds thresholds;
    /// Candidate reservoirs drawn before giving up on finding enough self-oscillatory ones.
    std::size_t max_draws = 1000;
    Seed base_seed = 0;
    unsigned jobs = 1;
};

struct SurveyEntry {
    Seed seed = 0;
    std::size_t oscillating_units = 0;
    double shared_fraction = 0.0;   ///< shared_bin_fraction of the first run
    bool washout_agrees = false;    ///< second initial state yields the same per-unit bins (+-1)
};

/// Draws dense reservoirs until `reservoirs` self-oscillatory ones are found; each is run from
/// two independent initial states.
std::vector<SurveyEntry> dense_reservoir_survey(const SurveyParams& params);

/// Per-unit comparison: identical oscillation flags and dominant bins within +-1.
bool same_unit_bins(const OscillationReport& a, const OscillationReport& b);

// ---------------------------------------------------------------------------

/// Metadata block carried by every experiment output.
nlohmann::json make_metadata(const std::string& command, Seed seed, const nlohmann::json& parameters);

} // namespace soesn
