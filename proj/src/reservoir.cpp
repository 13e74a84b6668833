#include "soesn/reservoir.hpp"

#include "soesn/errors.hpp"
#include "soesn/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace soesn {

StateTrajectory::StateTrajectory(RealMatrix rows) : rows_(std::move(rows)) {}

std::vector<double> StateTrajectory::unit_series(std::size_t unit) const
{
    if (unit >= n()) {
        throw InputError("unit_series: unit " + std::to_string(unit) + " out of range");
    }
    std::vector<double> series(steps());
    for (std::size_t t = 0; t < steps(); ++t) {
        series[t] = rows_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(unit));
    }
    return series;
}

void StateTrajectory::write_csv(std::ostream& out) const
{
    out << 't';
    for (std::size_t i = 0; i < n(); ++i) {
        out << ",x" << i;
    }
    out << '\n';
    for (Eigen::Index t = 0; t < rows_.rows(); ++t) {
        out << t;
        for (Eigen::Index i = 0; i < rows_.cols(); ++i) {
            out << ',' << format_double(rows_(t, i));
        }
        out << '\n';
    }
}

StateTrajectory StateTrajectory::read_csv(std::istream& in)
{
    std::string line;
    // Leading `#` lines carry metadata and are skipped.
    while (std::getline(in, line) && line.rfind('#', 0) == 0) {
    }
    if (!in || line.rfind("t,", 0) != 0) {
        throw IoError("trajectory CSV: missing `t,x0,...` header");
    }
    const auto header = split_csv_line(line);
    const std::size_t n = header.size() - 1;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != n + 1) {
            throw IoError("trajectory CSV: row " + std::to_string(rows.size()) + " has " +
                          std::to_string(fields.size()) + " fields, expected " + std::to_string(n + 1));
        }
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) {
            row[i] = parse_double(fields[i + 1]);
        }
        rows.push_back(std::move(row));
    }
    RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = rows[t][i];
        }
    }
    return StateTrajectory(std::move(m));
}

RealVector init_state(std::size_t n, const UniformSource& draw)
{
    if (n == 0) {
        throw InputError("init_state: n must be at least 1");
    }
    RealVector x(static_cast<Eigen::Index>(n));
    // An all-(near-)zero start never leaves the origin; redraw it.
    constexpr int kMaxRedraws = 1000;
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        for (auto& xi : x) {
            xi = draw();
        }
        if (x.cwiseAbs().maxCoeff() >= 1e-6) {
            return x;
        }
    }
    throw NumericError("init_state: uniform source keeps producing a zero state");
}

RealVector init_state(std::size_t n, Seed seed)
{
    Engine engine = make_engine(seed);
    return init_state(n, [&engine] { return uniform(engine, -0.5, 0.5); });
}

Reservoir::Reservoir(RealMatrix weights, RealVector leak, RealVector state)
    : weights_(std::move(weights)), leak_(std::move(leak)), state_(std::move(state))
{
    require_square(weights_, "Reservoir");
    require_finite(weights_, "Reservoir");
    if (leak_.size() != weights_.rows()) {
        throw DimensionError("Reservoir: leak vector has " + std::to_string(leak_.size()) +
                             " entries, expected " + std::to_string(weights_.rows()));
    }
    for (Eigen::Index i = 0; i < leak_.size(); ++i) {
        if (!(leak_(i) > 0.0 && leak_(i) <= 1.0)) {
            throw InputError("Reservoir: leak[" + std::to_string(i) + "] = " + std::to_string(leak_(i)) +
                             " is outside (0, 1]");
        }
    }
    if (state_.size() != weights_.rows()) {
        throw DimensionError("Reservoir: state has " + std::to_string(state_.size()) +
                             " entries, expected " + std::to_string(weights_.rows()));
    }
    if (!state_.allFinite()) {
        throw InputError("Reservoir: initial state has non-finite entries");
    }
    drive_.resize(state_.size());
}

Reservoir::Reservoir(RealMatrix weights, double leak, RealVector state)
    : Reservoir(weights, RealVector::Constant(weights.rows(), leak), std::move(state))
{
}

void Reservoir::step()
{
    drive_.noalias() = weights_ * state_;
    state_ = (1.0 - leak_.array()) * state_.array() + leak_.array() * drive_.array().tanh();
    if (!state_.allFinite()) {
        for (Eigen::Index i = 0; i < state_.size(); ++i) {
            if (!std::isfinite(state_(i))) {
                throw NonFiniteStateError("Reservoir::step: unit " + std::to_string(i) +
                                              " became non-finite at step " + std::to_string(step_count_ + 1),
                                          static_cast<std::size_t>(i), step_count_ + 1);
            }
        }
    }
    ++step_count_;
}

StateTrajectory Reservoir::run(std::size_t tau)
{
    if (tau == 0) {
        throw InputError("Reservoir::run: tau must be at least 1");
    }
    RealMatrix rows(static_cast<Eigen::Index>(tau + 1), state_.size());
    rows.row(0) = state_.transpose();
    for (std::size_t t = 1; t <= tau; ++t) {
        step();
        rows.row(static_cast<Eigen::Index>(t)) = state_.transpose();
    }
    return StateTrajectory(std::move(rows));
}

} // namespace soesn
