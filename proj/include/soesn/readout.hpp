#pragma once

#include "soesn/numerics.hpp"

#include <json.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace soesn {

/// Linear readout y_t = W_out^T x_t (no bias, no output nonlinearity).
struct ReadoutModel {
    RealMatrix w_out;               ///< N x L
    double lambda = 1e-8;
    std::vector<double> train_nrmse;  ///< one per output dimension
};

void to_json(nlohmann::json& j, const ReadoutModel& model);
void from_json(const nlohmann::json& j, ReadoutModel& model);

inline constexpr double kDefaultRidge = 1e-8;
inline constexpr std::size_t kDefaultWashout = 100;

/// Solves (X^T X + lambda I) W_out = X^T Y on the rows after `washout`.
/// X is T x N states, Y is T x L targets.
ReadoutModel train_ridge(const RealMatrix& states, const RealMatrix& targets,
                         double lambda = kDefaultRidge, std::size_t washout = kDefaultWashout);

/// X * W_out.
RealMatrix predict(const ReadoutModel& model, const RealMatrix& states);

/// RMS error over the standard deviation of the truth.
/// Throws InputError on length mismatch / fewer than 2 samples, NumericError on zero-variance truth.
double nrmse(std::span<const double> truth, std::span<const double> prediction);

/// Column-wise nrmse.
std::vector<double> nrmse_columns(const RealMatrix& truth, const RealMatrix& prediction);

} // namespace soesn
