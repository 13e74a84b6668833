#pragma once

#include "soesn/numerics.hpp"
#include "soesn/random.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace soesn {

enum class TopologyKind { dense, sparse, block_diagonal, weakly_coupled };

std::string_view to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(std::string_view name);

/// Declarative description of a reservoir weight matrix.
struct TopologySpec {
    TopologyKind kind = TopologyKind::dense;
    std::size_t n = 100;
    double density = 0.1;          ///< sparse only
    std::size_t sub_count = 1;     ///< block kinds
    double coupling_scale = 0.05;  ///< weakly_coupled only
    double coupling_density = 0.05;
    bool inject_ensemble = false;
    Seed seed = 0;

    /// Throws InputError on any violated invariant.
    void validate() const;
    bool operator==(const TopologySpec&) const = default;
};

void to_json(nlohmann::json& j, const TopologySpec& spec);
/// Strict: unknown fields are rejected with InputError.
void from_json(const nlohmann::json& j, TopologySpec& spec);

/// Small self-oscillating motif that can be written into a reservoir.
struct EnsembleSpec {
    std::size_t size = 2;
    RealMatrix weights;
};

RealMatrix build_dense(std::size_t n, Seed seed);
RealMatrix build_sparse(std::size_t n, double density, Seed seed);
RealMatrix build_block_diagonal(std::size_t n, std::size_t sub_count, Seed seed);
RealMatrix build_weakly_coupled(std::size_t n, std::size_t sub_count, double coupling_scale,
                                double coupling_density, Seed seed);

/// [[2, 1], [-1, 2]] scaled to spectral radius 1.25: three excitatory and one inhibitory
/// synapse, eigenvalues on a complex pair. Verified to oscillate standalone at leak 0.5.
EnsembleSpec two_neuron_ensemble();

/// Checks the EnsembleSpec invariants (2x2 sign pattern, standalone oscillation at leak 0.5
/// over 1000 steps). Throws InputError describing the first failure.
void validate_ensemble(const EnsembleSpec& ensemble);

/// Replaces the leading size x size block of W with the ensemble weights.
RealMatrix inject_ensemble(const RealMatrix& w, const EnsembleSpec& ensemble);

/// n draws from N(mu, sigma), each clipped to [0.05, 1].
RealVector sample_leak_vector(std::size_t n, double mu, double sigma, Seed seed);

inline constexpr double kLeakMin = 0.05;
inline constexpr double kLeakMax = 1.0;

/// Builds the matrix described by `spec`, rescaled to `rho` when given.
/// Dense and sparse matrices are rescaled as a whole; block kinds have every diagonal block
/// rescaled independently before (unscaled) coupling is added. The ensemble, when requested,
/// is injected after scaling so it keeps its own calibration.
RealMatrix build_weights(const TopologySpec& spec, std::optional<double> rho);

} // namespace soesn
