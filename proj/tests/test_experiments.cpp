#include "oracles.hpp"

#include "soesn/errors.hpp"
#include "soesn/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace soesn;

namespace {

constexpr double kPi = std::numbers::pi;

SweepParams small_sweep()
{
    SweepParams p;
    p.leak_values = {0.3, 0.9};
    p.rho_values = {0.5, 1.5};
    p.trials = 4;
    p.n = 30;
    p.tau = 300;
    p.base_seed = 17;
    return p;
}

ReproduceParams small_reproduce()
{
    ReproduceParams p;
    p.topology.kind = TopologyKind::weakly_coupled;
    p.topology.n = 40;
    p.topology.sub_count = 4;
    p.base_seed = 3;
    return p;
}

} // namespace

TEST_CASE("sinusoid targets")
{
    const auto literal = gen_sinusoid(400, kPi / 100, SineMode::literal_ode, 0.0);
    CHECK(literal.values.rows() == 401);
    CHECK(literal.values(0, 0) == 0.0);
    CHECK(literal.values(100, 0) == doctest::Approx(2 * kPi).epsilon(1e-12));
    // Derivative of the literal solution is 2(1 + cos t).
    const double t = 37 * kPi / 100;
    const double slope = (literal.values(38, 0) - literal.values(36, 0)) / (2 * kPi / 100);
    CHECK(slope == doctest::Approx(2 * (1 + std::cos(t))).epsilon(1e-3));

    const auto pure = gen_sinusoid(4, 0.25, SineMode::pure_sine, 1.0);
    CHECK(pure.values(1, 0) == doctest::Approx(1.0));
    CHECK(std::abs(pure.values(2, 0)) < 1e-12);

    CHECK_THROWS_AS(gen_sinusoid(1, 0.1, SineMode::pure_sine, 1.0), InputError);
    CHECK_THROWS_AS(gen_sinusoid(10, 0.0, SineMode::pure_sine, 1.0), InputError);
}

TEST_CASE("square target")
{
    const auto sq = gen_square(200, 0.01);
    CHECK(sq.values(5, 0) == 1.0);
    CHECK(sq.values(15, 0) == -1.0);
    CHECK(sq.values(10, 0) == 0.0);
    CHECK(sq.values(0, 0) == 0.0);
    for (Eigen::Index k = 0; k < sq.values.rows(); ++k) {
        const double v = sq.values(k, 0);
        CHECK((v == -1.0 || v == 0.0 || v == 1.0));
    }
    const auto coarse = gen_square(10, 0.05);
    CHECK(coarse.values(1, 0) == 1.0);
    CHECK(coarse.values(3, 0) == -1.0);
}

TEST_CASE("Lorenz integration")
{
    LorenzParams p;
    p.tau = 3;
    const auto lorenz = gen_lorenz(p);
    REQUIRE(lorenz.values.rows() == 4);
    REQUIRE(lorenz.values.cols() == 3);

    std::array<double, 3> y = p.x0;
    for (Eigen::Index k = 1; k <= 3; ++k) {
        y = oracle::classic_rk4_step(y, p.dt, p.sigma, p.alpha, p.beta);
        for (Eigen::Index d = 0; d < 3; ++d) {
            CHECK(std::abs(lorenz.values(k, d) - y[static_cast<std::size_t>(d)]) <= 1e-12);
        }
    }
    CHECK(lorenz.values(1, 0) == doctest::Approx(0.09510505043162207).epsilon(1e-14));
    CHECK(lorenz.values(1, 1) == doctest::Approx(1.003038694078439).epsilon(1e-14));
    CHECK(lorenz.values(1, 2) == doctest::Approx(1.0228454737836965).epsilon(1e-14));

    LorenzParams origin;
    origin.tau = 100;
    origin.x0 = {0.0, 0.0, 0.0};
    CHECK(gen_lorenz(origin).values.isZero(0.0));

    LorenzParams stable;
    stable.tau = 5000;
    stable.alpha = 0.5;
    const auto decayed = gen_lorenz(stable);
    CHECK(decayed.values.row(5000).norm() < 1e-6);

    LorenzParams unstable;
    unstable.dt = 1.0;
    unstable.tau = 200;
    CHECK_THROWS_AS(gen_lorenz(unstable), NumericError);
}

TEST_CASE("standardized targets")
{
    LorenzParams p;
    p.tau = 2000;
    const auto s = standardized(gen_lorenz(p));
    for (Eigen::Index d = 0; d < 3; ++d) {
        const auto col = s.values.col(d);
        CHECK(std::abs(col.mean()) < 1e-12);
        CHECK(std::sqrt(col.squaredNorm() / static_cast<double>(col.size())) == doctest::Approx(1.0));
    }
}

TEST_CASE("heatmap sweep")
{
    const auto params = small_sweep();
    const auto a = sweep_heatmap(params);
    CHECK(a.grid.rows() == 2);
    CHECK(a.grid.cols() == 2);
    CHECK(a.grid == sweep_heatmap(params).grid);
    CHECK(a.grid.minCoeff() >= 0.0);
    CHECK(a.grid.maxCoeff() <= 1.0);

    auto parallel = params;
    parallel.jobs = 3;
    CHECK(sweep_heatmap(parallel).grid == a.grid);

    auto single = params;
    single.trials = 1;
    const auto one = sweep_heatmap(single);
    for (Eigen::Index i = 0; i < one.grid.size(); ++i) {
        const double v = one.grid.data()[i];
        CHECK((v == 0.0 || v == 1.0));
    }

    auto bad = params;
    bad.rho_values = {0.0};
    CHECK_THROWS_AS(sweep_heatmap(bad), InputError);
    bad = params;
    bad.leak_values = {1.5};
    CHECK_THROWS_AS(sweep_heatmap(bad), InputError);
    bad = params;
    bad.trials = 0;
    CHECK_THROWS_AS(sweep_heatmap(bad), InputError);

    std::ostringstream csv;
    write_sweep_csv(csv, a, make_metadata("sweep", 17, {}));
    const std::string text = csv.str();
    CHECK(text.rfind("# ", 0) == 0);
    CHECK(text.find("leak,rho,ratio,trials\n") != std::string::npos);
}

TEST_CASE("sub-critical sweep cell stays quiet")
{
    SweepParams p;
    p.leak_values = {0.5};
    p.rho_values = {0.5};
    p.trials = 200;
    p.n = 100;
    p.base_seed = 5;
    CHECK(sweep_heatmap(p).grid(0, 0) <= 0.02);
}

TEST_CASE("ensemble injection")
{
    InjectionParams p;
    p.populations = {2, 6};
    p.trials = 5;
    p.tau = 400;
    p.base_seed = 9;
    const auto rows = injection_ratio_experiment(p);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].population == 2);
    CHECK(rows[0].ratio_with == 1.0);

    auto parallel = p;
    parallel.jobs = 2;
    const auto again = injection_ratio_experiment(parallel);
    CHECK(again[1].ratio_with == rows[1].ratio_with);
    CHECK(again[1].ratio_without == rows[1].ratio_without);

    p.populations = {1};
    CHECK_THROWS_AS(injection_ratio_experiment(p), InputError);

    std::ostringstream csv;
    write_injection_csv(csv, rows, make_metadata("inject-experiment", 9, {}));
    CHECK(csv.str().find("population,ratio_without,ratio_with\n") != std::string::npos);
}

TEST_CASE("realizable targets are reproduced exactly")
{
    auto params = small_reproduce();
    params.lambda = 1e-20;  // effectively unregularized; the stacked QR solve stays accurate here
    const std::size_t tau = 600;
    std::size_t attempt = 0;
    StateTrajectory trajectory = attempt_trajectory(params, attempt, tau);
    while (!classify_trajectory(trajectory).reservoir_is_self_oscillatory) {
        REQUIRE(attempt < 5);
        trajectory = attempt_trajectory(params, ++attempt, tau);
    }
    const RealMatrix mixing = oracle::random_matrix(40, 2, 4);
    TargetSignal target{"realizable", 1.0, trajectory.rows() * mixing, {"a", "b"}};

    const auto fit = fit_waveform(params, target);
    REQUIRE(fit.outcome.oscillatory);
    CHECK(fit.outcome.attempt_count == attempt + 1);
    CHECK(fit.outcome.train_nrmse[0] <= 1e-10);
    CHECK(fit.outcome.train_nrmse[1] <= 1e-10);
    CHECK(fit.prediction.rows() == static_cast<Eigen::Index>(tau + 1 - params.washout));
}

TEST_CASE("exhaustion is an outcome, not an error")
{
    auto params = small_reproduce();
    params.max_attempts = 0;
    const auto outcome = reproduce_waveform(params, gen_square(300, 0.01));
    CHECK_FALSE(outcome.oscillatory);
    CHECK(outcome.attempt_count == 0);
    CHECK(outcome.train_nrmse.empty());
    CHECK(std::isnan(outcome.median_nrmse()));
    const nlohmann::json j = outcome;
    CHECK(j["oscillatory"] == false);
    CHECK_FALSE(j.contains("train_nrmse"));

    params.max_attempts = 10;
    CHECK_THROWS_AS(reproduce_waveform(params, gen_square(50, 0.01)), InputError);
}

TEST_CASE("reproduction trials and sub-count sweep are deterministic")
{
    const auto params = small_reproduce();
    const auto target = gen_sinusoid(400, 0.01, SineMode::pure_sine, 5.0);
    const auto serial = reproduce_trials(params, target, 3, 1);
    const auto parallel = reproduce_trials(params, target, 3, 3);
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(serial[t].seed == parallel[t].seed);
        CHECK(serial[t].train_nrmse == parallel[t].train_nrmse);
    }
    CHECK(serial[0].seed != serial[1].seed);

    const auto a = subreservoir_count_sweep(params, 40, {1, 4}, target, 3);
    const auto b = subreservoir_count_sweep(params, 40, {1, 4}, target, 3);
    REQUIRE(a.size() == 2);
    CHECK(a[1].nrmse == b[1].nrmse);
    CHECK(a[0].nrmse.size() + a[0].non_oscillatory == 3);
    CHECK_THROWS_AS(subreservoir_count_sweep(params, 40, {3}, target, 1), InputError);
}

TEST_CASE("quantile")
{
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile({5.0}, 0.9) == 5.0);
    CHECK_THROWS_AS(quantile({}, 0.5), InputError);
}

TEST_CASE("survey helpers")
{
    OscillationReport a;
    a.per_unit = {{true, 5, 0.1}, {false, std::nullopt, 0.0}};
    OscillationReport b = a;
    CHECK(same_unit_bins(a, b));
    b.per_unit[0].dominant_bin = 6;
    CHECK(same_unit_bins(a, b));
    b.per_unit[0].dominant_bin = 7;
    CHECK_FALSE(same_unit_bins(a, b));
    b = a;
    b.per_unit[1] = {true, 5, 0.1};
    CHECK_FALSE(same_unit_bins(a, b));

    SurveyParams p;
    p.reservoirs = 2;
    p.n = 30;
    p.tau = 400;
    p.base_seed = 8;
    const auto entries = dense_reservoir_survey(p);
    REQUIRE(entries.size() == 2);
    for (const auto& e : entries) {
        CHECK(e.oscillating_units > 0);
        CHECK(e.shared_fraction > 0.0);
        CHECK(e.shared_fraction <= 1.0);
    }
    auto parallel = p;
    parallel.jobs = 2;
    const auto again = dense_reservoir_survey(parallel);
    CHECK(again[0].seed == entries[0].seed);
    CHECK(again[1].shared_fraction == entries[1].shared_fraction);
}

TEST_CASE("metadata")
{
    const auto m = make_metadata("sweep", 42, {{"n", 100}});
    CHECK(m["artifact"] == "soesn");
    CHECK(m["version"] == kVersion);
    CHECK(m["command"] == "sweep");
    CHECK(m["seed"] == 42);
    CHECK(m["parameters"]["n"] == 100);
}
