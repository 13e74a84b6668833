#pragma once

#include "soesn/reservoir.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace soesn {

struct ClassifierThresholds {
    /// Trailing-window standard deviation must exceed this.
    double min_stddev = 1e-3;
    /// Largest non-DC bin must carry more than this share of total non-DC power.
    double min_peak_fraction = 0.05;
    bool operator==(const ClassifierThresholds&) const = default;
};

struct UnitClassification {
    bool is_oscillating = false;
    std::optional<std::size_t> dominant_bin;
    double tail_stddev = 0.0;
};

struct OscillationReport {
    std::vector<UnitClassification> per_unit;
    bool reservoir_is_self_oscillatory = false;
    /// Only meaningful when at least two units oscillate.
    bool phase_locked = false;
    std::size_t window = 0;
    ClassifierThresholds thresholds;

    std::size_t oscillating_count() const;
    std::vector<std::size_t> oscillating_bins() const;
};

void to_json(nlohmann::json& j, const OscillationReport& report);
void from_json(const nlohmann::json& j, OscillationReport& report);

inline constexpr std::size_t kDefaultWindow = 100;

UnitClassification classify_unit(std::span<const double> signal, std::size_t window = kDefaultWindow,
                                 const ClassifierThresholds& thresholds = {});

OscillationReport classify_trajectory(const StateTrajectory& trajectory,
                                      std::size_t window = kDefaultWindow,
                                      const ClassifierThresholds& thresholds = {});

/// True iff every oscillating unit's dominant bin lies within +-1 of every other's.
/// Throws InputError with fewer than two oscillating units.
bool is_phase_locked(const OscillationReport& report);

/// Largest share of oscillating units whose dominant bins fit in [c-1, c+1] for some c.
/// Zero when nothing oscillates.
double shared_bin_fraction(const OscillationReport& report);

/// bin / (window * dt).
double dominant_frequency_hz(std::size_t dominant_bin, std::size_t window, double dt);

} // namespace soesn
