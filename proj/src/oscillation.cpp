#include "soesn/oscillation.hpp"

#include "soesn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace soesn {

std::size_t OscillationReport::oscillating_count() const
{
    return static_cast<std::size_t>(
        std::count_if(per_unit.begin(), per_unit.end(), [](const auto& u) { return u.is_oscillating; }));
}

std::vector<std::size_t> OscillationReport::oscillating_bins() const
{
    std::vector<std::size_t> bins;
    for (const auto& u : per_unit) {
        if (u.is_oscillating) {
            bins.push_back(*u.dominant_bin);
        }
    }
    return bins;
}

UnitClassification classify_unit(std::span<const double> signal, std::size_t window,
                                 const ClassifierThresholds& thresholds)
{
    if (window < 16) {
        throw InputError("classify_unit: window must be at least 16, got " + std::to_string(window));
    }
    if (signal.size() < window) {
        throw InputError("classify_unit: window " + std::to_string(window) + " is longer than the signal (" +
                         std::to_string(signal.size()) + " samples)");
    }
    const auto tail = signal.last(window);

    double mean = 0.0;
    for (double x : tail) {
        mean += x;
    }
    mean /= static_cast<double>(window);
    double variance = 0.0;
    for (double x : tail) {
        variance += (x - mean) * (x - mean);
    }
    variance /= static_cast<double>(window);

    UnitClassification result;
    result.tail_stddev = std::sqrt(variance);
    if (!(result.tail_stddev > thresholds.min_stddev)) {
        return result;
    }

    const PowerSpectrum spectrum = periodogram(tail);
    double total = 0.0;
    std::size_t peak_bin = 1;
    for (std::size_t k = 1; k < spectrum.bin_count(); ++k) {
        total += spectrum.bin_power[k];
        if (spectrum.bin_power[k] > spectrum.bin_power[peak_bin]) {
            peak_bin = k;
        }
    }
    if (total > 0.0 && spectrum.bin_power[peak_bin] / total > thresholds.min_peak_fraction) {
        result.is_oscillating = true;
        result.dominant_bin = peak_bin;
    }
    return result;
}

OscillationReport classify_trajectory(const StateTrajectory& trajectory, std::size_t window,
                                      const ClassifierThresholds& thresholds)
{
    if (trajectory.steps() < window) {
        throw InputError("classify_trajectory: trajectory has " + std::to_string(trajectory.steps()) +
                         " rows, fewer than the window of " + std::to_string(window));
    }
    OscillationReport report;
    report.window = window;
    report.thresholds = thresholds;
    report.per_unit.reserve(trajectory.n());

    const auto& rows = trajectory.rows();
    const auto start = static_cast<Eigen::Index>(trajectory.steps() - window);
    std::vector<double> tail(window);
    for (Eigen::Index unit = 0; unit < rows.cols(); ++unit) {
        for (std::size_t t = 0; t < window; ++t) {
            tail[t] = rows(start + static_cast<Eigen::Index>(t), unit);
        }
        report.per_unit.push_back(classify_unit(tail, window, thresholds));
    }
    const std::size_t oscillating = report.oscillating_count();
    report.reservoir_is_self_oscillatory = oscillating > 0;
    report.phase_locked = oscillating >= 2 && is_phase_locked(report);
    return report;
}

bool is_phase_locked(const OscillationReport& report)
{
    const auto bins = report.oscillating_bins();
    if (bins.size() < 2) {
        throw InputError("is_phase_locked: needs at least two oscillating units, got " +
                         std::to_string(bins.size()));
    }
    const auto [lo, hi] = std::minmax_element(bins.begin(), bins.end());
    return *hi - *lo <= 1;
}

double shared_bin_fraction(const OscillationReport& report)
{
    const auto bins = report.oscillating_bins();
    if (bins.empty()) {
        return 0.0;
    }
    auto covered = [&bins](std::size_t centre) {
        return static_cast<std::size_t>(std::count_if(bins.begin(), bins.end(), [centre](std::size_t b) {
            return b + 1 >= centre && b <= centre + 1;
        }));
    };
    std::size_t best = 0;
    for (std::size_t b : bins) {
        best = std::max({best, covered(b), covered(b + 1), b > 0 ? covered(b - 1) : 0});
    }
    return static_cast<double>(best) / static_cast<double>(bins.size());
}

double dominant_frequency_hz(std::size_t dominant_bin, std::size_t window, double dt)
{
    if (dominant_bin == 0) {
        throw InputError("dominant_frequency_hz: bin 0 is DC, not a frequency");
    }
    if (window == 0 || 2 * dominant_bin > window) {
        throw InputError("dominant_frequency_hz: bin " + std::to_string(dominant_bin) +
                         " exceeds the Nyquist bin of a " + std::to_string(window) + "-sample window");
    }
    if (!(dt > 0.0)) {
        throw InputError("dominant_frequency_hz: dt must be positive");
    }
    return static_cast<double>(dominant_bin) / (static_cast<double>(window) * dt);
}

void to_json(nlohmann::json& j, const OscillationReport& report)
{
    nlohmann::json units = nlohmann::json::array();
    for (const auto& u : report.per_unit) {
        units.push_back({{"is_oscillating", u.is_oscillating},
                         {"dominant_bin", u.dominant_bin ? nlohmann::json(*u.dominant_bin) : nlohmann::json(nullptr)},
                         {"tail_stddev", u.tail_stddev}});
    }
    j = nlohmann::json{{"per_unit", std::move(units)},
                       {"reservoir_is_self_oscillatory", report.reservoir_is_self_oscillatory},
                       {"phase_locked", report.phase_locked},
                       {"window", report.window},
                       {"thresholds",
                        {{"min_stddev", report.thresholds.min_stddev},
                         {"min_peak_fraction", report.thresholds.min_peak_fraction}}}};
}

void from_json(const nlohmann::json& j, OscillationReport& report)
{
    report = OscillationReport{};
    for (const auto& u : j.at("per_unit")) {
        UnitClassification unit;
        unit.is_oscillating = u.at("is_oscillating").get<bool>();
        if (!u.at("dominant_bin").is_null()) {
            unit.dominant_bin = u.at("dominant_bin").get<std::size_t>();
        }
        unit.tail_stddev = u.at("tail_stddev").get<double>();
        report.per_unit.push_back(unit);
    }
    report.reservoir_is_self_oscillatory = j.at("reservoir_is_self_oscillatory").get<bool>();
    report.phase_locked = j.at("phase_locked").get<bool>();
    report.window = j.at("window").get<std::size_t>();
    if (j.contains("thresholds")) {
        report.thresholds.min_stddev = j.at("thresholds").at("min_stddev").get<double>();
        report.thresholds.min_peak_fraction = j.at("thresholds").at("min_peak_fraction").get<double>();
    }
}

} // namespace soesn
