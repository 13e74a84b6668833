#pragma once

#include "soesn/numerics.hpp"
#include "soesn/random.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

namespace soesn {

/// Time-major record of reservoir states; row t is x_t, row 0 the initial state.
class StateTrajectory {
public:
    StateTrajectory() = default;
    explicit StateTrajectory(RealMatrix rows);

    std::size_t steps() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
    const RealMatrix& rows() const noexcept { return rows_; }
    RealVector row(std::size_t t) const { return rows_.row(static_cast<Eigen::Index>(t)).transpose(); }
    /// Copy of one unit's time series.
    std::vector<double> unit_series(std::size_t unit) const;

    /// CSV with header `t,x0,x1,...` and 17 significant digits.
    void write_csv(std::ostream& out) const;
    static StateTrajectory read_csv(std::istream& in);

private:
    RealMatrix rows_;
};

/// Source of uniform draws on [-0.5, 0.5]; injectable for tests.
using UniformSource = std::function<double()>;

/// n values uniform on [-0.5, 0.5], redrawn while max |x_i| < 1e-6.
RealVector init_state(std::size_t n, Seed seed);
RealVector init_state(std::size_t n, const UniformSource& draw);

/// Input-free leaky tanh reservoir:
///   x' = (1 - leak) .* x + leak .* tanh(W x)
class Reservoir {
public:
    Reservoir(RealMatrix weights, RealVector leak, RealVector state);
    /// Scalar leak broadcast to every unit.
    Reservoir(RealMatrix weights, double leak, RealVector state);

    std::size_t n() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    const RealMatrix& weights() const noexcept { return weights_; }
    const RealVector& leak() const noexcept { return leak_; }
    const RealVector& state() const noexcept { return state_; }
    std::size_t step_count() const noexcept { return step_count_; }

    /// Advances one tick. Throws NonFiniteStateError naming the unit.
    void step();

    /// Runs tau steps; returns tau+1 rows starting at the current state.
    StateTrajectory run(std::size_t tau);

private:
    RealMatrix weights_;
    RealVector leak_;
    RealVector state_;
    RealVector drive_;
    std::size_t step_count_ = 0;
};

} // namespace soesn
