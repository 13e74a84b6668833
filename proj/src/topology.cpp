#include "soesn/topology.hpp"

#include "soesn/errors.hpp"
#include "soesn/oscillation.hpp"
#include "soesn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace soesn {

namespace {

constexpr std::uint64_t kCouplingStream = 1;

void require_positive_n(std::size_t n, const char* what)
{
    if (n == 0) {
        throw InputError(std::string(what) + ": n must be at least 1");
    }
}

void require_partition(std::size_t n, std::size_t sub_count, const char* what)
{
    require_positive_n(n, what);
    if (sub_count == 0 || n % sub_count != 0) {
        throw InputError(std::string(what) + ": n = " + std::to_string(n) +
                         " is not divisible into " + std::to_string(sub_count) + " equal sub-reservoirs");
    }
}

// Off-block entries only; diagonal blocks stay zero.
RealMatrix coupling_matrix(std::size_t n, std::size_t sub_count, double coupling_scale,
                           double coupling_density, Seed seed)
{
    const auto side = static_cast<Eigen::Index>(n);
    const std::size_t block = n / sub_count;
    RealMatrix c = RealMatrix::Zero(side, side);
    if (coupling_scale == 0.0 || coupling_density == 0.0) {
        return c;
    }
    Engine engine = make_engine(derive_seed(seed, {kCouplingStream}));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i / block == j / block) {
                continue;
            }
            const bool present = uniform(engine, 0.0, 1.0) < coupling_density;
            const double value = uniform(engine, -0.5, 0.5) * coupling_scale;
            if (present) {
                c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
            }
        }
    }
    return c;
}

} // namespace

std::string_view to_string(TopologyKind kind)
{
    switch (kind) {
    case TopologyKind::dense:
        return "dense";
    case TopologyKind::sparse:
        return "sparse";
    case TopologyKind::block_diagonal:
        return "block_diagonal";
    case TopologyKind::weakly_coupled:
        return "weakly_coupled";
    }
    return "dense";
}

TopologyKind topology_kind_from_string(std::string_view name)
{
    if (name == "dense") {
        return TopologyKind::dense;
    }
    if (name == "sparse") {
        return TopologyKind::sparse;
    }
    if (name == "block_diagonal") {
        return TopologyKind::block_diagonal;
    }
    if (name == "weakly_coupled") {
        return TopologyKind::weakly_coupled;
    }
    throw InputError("unknown topology kind `" + std::string(name) +
                     "` (expected dense, sparse, block_diagonal or weakly_coupled)");
}

void TopologySpec::validate() const
{
    require_positive_n(n, "TopologySpec");
    if (!(density > 0.0 && density <= 1.0)) {
        throw InputError("TopologySpec: density must be in (0, 1], got " + std::to_string(density));
    }
    if (sub_count == 0) {
        throw InputError("TopologySpec: sub_count must be at least 1");
    }
    if ((kind == TopologyKind::block_diagonal || kind == TopologyKind::weakly_coupled) && n % sub_count != 0) {
        throw InputError("TopologySpec: n = " + std::to_string(n) + " is not divisible by sub_count = " +
                         std::to_string(sub_count));
    }
    if (!(coupling_scale >= 0.0) || !std::isfinite(coupling_scale)) {
        throw InputError("TopologySpec: coupling_scale must be non-negative");
    }
    if (!(coupling_density >= 0.0 && coupling_density <= 1.0)) {
        throw InputError("TopologySpec: coupling_density must be in [0, 1]");
    }
    if (inject_ensemble && n < 2) {
        throw InputError("TopologySpec: inject_ensemble needs n >= 2");
    }
}

void to_json(nlohmann::json& j, const TopologySpec& spec)
{
    j = nlohmann::json{{"kind", std::string(to_string(spec.kind))},
                       {"n", spec.n},
                       {"density", spec.density},
                       {"sub_count", spec.sub_count},
                       {"coupling_scale", spec.coupling_scale},
                       {"coupling_density", spec.coupling_density},
                       {"inject_ensemble", spec.inject_ensemble},
                       {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, TopologySpec& spec)
{
    static const std::set<std::string> known{"kind",           "n",                "density",
                                             "sub_count",      "coupling_scale",   "coupling_density",
                                             "inject_ensemble", "seed"};
    if (!j.is_object()) {
        throw InputError("topology: expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw InputError("topology: unknown field `" + key + "`");
        }
    }
    try {
        spec = TopologySpec{};
        if (j.contains("kind")) {
            spec.kind = topology_kind_from_string(j.at("kind").get<std::string>());
        }
        if (j.contains("n")) {
            spec.n = j.at("n").get<std::size_t>();
        }
        if (j.contains("density")) {
            spec.density = j.at("density").get<double>();
        }
        if (j.contains("sub_count")) {
            spec.sub_count = j.at("sub_count").get<std::size_t>();
        }
        if (j.contains("coupling_scale")) {
            spec.coupling_scale = j.at("coupling_scale").get<double>();
        }
        if (j.contains("coupling_density")) {
            spec.coupling_density = j.at("coupling_density").get<double>();
        }
        if (j.contains("inject_ensemble")) {
            spec.inject_ensemble = j.at("inject_ensemble").get<bool>();
        }
        if (j.contains("seed")) {
            spec.seed = j.at("seed").get<Seed>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("topology: ") + e.what());
    }
}

RealMatrix build_dense(std::size_t n, Seed seed)
{
    require_positive_n(n, "build_dense");
    const auto side = static_cast<Eigen::Index>(n);
    RealMatrix w(side, side);
    Engine engine = make_engine(seed);
    for (Eigen::Index i = 0; i < side; ++i) {
        for (Eigen::Index j = 0; j < side; ++j) {
            w(i, j) = uniform(engine, -0.5, 0.5);
        }
    }
    return w;
}

RealMatrix build_sparse(std::size_t n, double density, Seed seed)
{
    require_positive_n(n, "build_sparse");
    if (!(density > 0.0 && density <= 1.0)) {
        throw InputError("build_sparse: density must be in (0, 1], got " + std::to_string(density));
    }
    const auto side = static_cast<Eigen::Index>(n);
    RealMatrix w = RealMatrix::Zero(side, side);
    Engine engine = make_engine(seed);
    for (Eigen::Index i = 0; i < side; ++i) {
        for (Eigen::Index j = 0; j < side; ++j) {
            const bool present = uniform(engine, 0.0, 1.0) < density;
            const double value = uniform(engine, -0.5, 0.5);
            if (present) {
                w(i, j) = value;
            }
        }
    }
    return w;
}

RealMatrix build_block_diagonal(std::size_t n, std::size_t sub_count, Seed seed)
{
    require_partition(n, sub_count, "build_block_diagonal");
    const auto side = static_cast<Eigen::Index>(n);
    const auto block = static_cast<Eigen::Index>(n / sub_count);
    RealMatrix w = RealMatrix::Zero(side, side);
    // Same stream as build_dense, so M = 1 reproduces the dense builder exactly.
    Engine engine = make_engine(seed);
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(sub_count); ++m) {
        for (Eigen::Index i = 0; i < block; ++i) {
            for (Eigen::Index j = 0; j < block; ++j) {
                w(m * block + i, m * block + j) = uniform(engine, -0.5, 0.5);
            }
        }
    }
    return w;
}

RealMatrix build_weakly_coupled(std::size_t n, std::size_t sub_count, double coupling_scale,
                                double coupling_density, Seed seed)
{
    require_partition(n, sub_count, "build_weakly_coupled");
    if (!(coupling_scale >= 0.0) || !std::isfinite(coupling_scale)) {
        throw InputError("build_weakly_coupled: coupling_scale must be non-negative");
    }
    if (!(coupling_density >= 0.0 && coupling_density <= 1.0)) {
        throw InputError("build_weakly_coupled: coupling_density must be in [0, 1]");
    }
    return build_block_diagonal(n, sub_count, seed) +
           coupling_matrix(n, sub_count, coupling_scale, coupling_density, seed);
}

EnsembleSpec two_neuron_ensemble()
{
    static const EnsembleSpec canonical = [] {
        RealMatrix base(2, 2);
        base << 2.0, 1.0,
               -1.0, 2.0;
        EnsembleSpec ensemble{2, scale_to_spectral_radius(base, 1.25)};
        validate_ensemble(ensemble);
        return ensemble;
    }();
    return canonical;
}

void validate_ensemble(const EnsembleSpec& ensemble)
{
    const auto size = static_cast<Eigen::Index>(ensemble.size);
    if (ensemble.size < 2 || ensemble.weights.rows() != size || ensemble.weights.cols() != size) {
        throw InputError("ensemble: weights must be size x size with size >= 2");
    }
    require_finite(ensemble.weights, "ensemble");
    if (ensemble.size == 2) {
        const auto positive = (ensemble.weights.array() > 0.0).count();
        const auto negative = (ensemble.weights.array() < 0.0).count();
        if (positive != 3 || negative != 1) {
            throw InputError("ensemble: a two-neuron ensemble needs 3 excitatory and 1 inhibitory synapse");
        }
    }
    constexpr Seed kProbeSeed = 0x0e5e3b1eULL;
    Reservoir probe(ensemble.weights, 0.5, init_state(ensemble.size, kProbeSeed));
    const auto report = classify_trajectory(probe.run(1000));
    if (!report.reservoir_is_self_oscillatory) {
        throw InputError("ensemble: does not sustain oscillation standalone at leak 0.5");
    }
}

RealMatrix inject_ensemble(const RealMatrix& w, const EnsembleSpec& ensemble)
{
    require_square(w, "inject_ensemble");
    const auto size = static_cast<Eigen::Index>(ensemble.size);
    if (w.rows() < size) {
        throw InputError("inject_ensemble: reservoir of size " + std::to_string(w.rows()) +
                         " is smaller than the ensemble (" + std::to_string(ensemble.size) + ")");
    }
    if (ensemble.weights.rows() != size || ensemble.weights.cols() != size) {
        throw DimensionError("inject_ensemble: ensemble weights do not match its size");
    }
    RealMatrix out = w;
    out.topLeftCorner(size, size) = ensemble.weights;
    return out;
}

RealVector sample_leak_vector(std::size_t n, double mu, double sigma, Seed seed)
{
    require_positive_n(n, "sample_leak_vector");
    if (!(sigma >= 0.0) || !std::isfinite(mu)) {
        throw InputError("sample_leak_vector: need finite mu and sigma >= 0");
    }
    RealVector leak(static_cast<Eigen::Index>(n));
    if (sigma == 0.0) {
        leak.setConstant(std::clamp(mu, kLeakMin, kLeakMax));
        return leak;
    }
    Engine engine = make_engine(seed);
    std::normal_distribution<double> gauss(mu, sigma);
    for (auto& a : leak) {
        a = std::clamp(gauss(engine), kLeakMin, kLeakMax);
    }
    return leak;
}

RealMatrix build_weights(const TopologySpec& spec, std::optional<double> rho)
{
    spec.validate();
    RealMatrix w;
    switch (spec.kind) {
    case TopologyKind::dense:
    case TopologyKind::sparse:
        w = spec.kind == TopologyKind::dense ? build_dense(spec.n, spec.seed)
                                             : build_sparse(spec.n, spec.density, spec.seed);
        if (rho) {
            w = scale_to_spectral_radius(w, *rho);
        }
        break;
    case TopologyKind::block_diagonal:
    case TopologyKind::weakly_coupled: {
        w = build_block_diagonal(spec.n, spec.sub_count, spec.seed);
        if (rho) {
            const auto block = static_cast<Eigen::Index>(spec.n / spec.sub_count);
            for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(spec.sub_count); ++m) {
                auto view = w.block(m * block, m * block, block, block);
                view = scale_to_spectral_radius(RealMatrix(view), *rho);
            }
        }
        if (spec.kind == TopologyKind::weakly_coupled) {
            w += coupling_matrix(spec.n, spec.sub_count, spec.coupling_scale, spec.coupling_density, spec.seed);
        }
        break;
    }
    }
    if (spec.inject_ensemble) {
        w = inject_ensemble(w, two_neuron_ensemble());
    }
    return w;
}

} // namespace soesn
