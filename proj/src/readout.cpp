#include "soesn/readout.hpp"

#include "soesn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace soesn {

namespace {

bool is_constant(std::span<const double> values)
{
    return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

} // namespace

ReadoutModel train_ridge(const RealMatrix& states, const RealMatrix& targets, double lambda, std::size_t washout)
{
    if (states.rows() != targets.rows()) {
        throw DimensionError("train_ridge: states have " + std::to_string(states.rows()) + " rows but targets have " +
                             std::to_string(targets.rows()));
    }
    if (states.cols() == 0 || targets.cols() == 0) {
        throw DimensionError("train_ridge: empty state or target dimension");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InputError("train_ridge: lambda must be a non-negative finite number");
    }
    const auto total = static_cast<std::size_t>(states.rows());
    if (total <= washout || total - washout < 2) {
        throw InputError("train_ridge: " + std::to_string(total) + " rows leave fewer than 2 after a washout of " +
                         std::to_string(washout));
    }
    require_finite(states, "train_ridge states");
    require_finite(targets, "train_ridge targets");

    const auto kept = static_cast<Eigen::Index>(total - washout);
    const auto x = states.bottomRows(kept);
    const auto y = targets.bottomRows(kept);
    const Eigen::Index n = states.cols();

    // Same minimizer as (X^T X + lambda I) W = X^T Y, but solved as the stacked least-squares
    // problem [X; sqrt(lambda) I] W = [Y; 0] so the conditioning of X is not squared.
    RealMatrix stacked(kept + n, n);
    stacked.topRows(kept) = x;
    stacked.bottomRows(n) = RealMatrix::Identity(n, n) * std::sqrt(lambda);
    RealMatrix rhs = RealMatrix::Zero(kept + n, targets.cols());
    rhs.topRows(kept) = y;

    ReadoutModel model;
    model.lambda = lambda;
    if (lambda > 0.0) {
        model.w_out = Eigen::HouseholderQR<RealMatrix>(stacked).solve(rhs);
    } else {
        const Eigen::ColPivHouseholderQR<RealMatrix> qr(stacked);
        if (qr.rank() < n) {
            throw NumericError("train_ridge: state matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                               std::to_string(n) + "); use lambda > 0");
        }
        model.w_out = qr.solve(rhs);
    }
    if (!model.w_out.allFinite()) {
        throw NumericError("train_ridge: solution is not finite");
    }

    const RealMatrix prediction = x * model.w_out;
    model.train_nrmse.resize(static_cast<std::size_t>(targets.cols()));
    for (Eigen::Index l = 0; l < targets.cols(); ++l) {
        const RealVector truth = y.col(l);
        if (!is_constant({truth.data(), static_cast<std::size_t>(truth.size())})) {
            const RealVector pred = prediction.col(l);
            model.train_nrmse[static_cast<std::size_t>(l)] =
                nrmse(std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size())),
                      std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())));
        } else {
            // Constant target: NRMSE is undefined.
            model.train_nrmse[static_cast<std::size_t>(l)] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return model;
}

RealMatrix predict(const ReadoutModel& model, const RealMatrix& states)
{
    if (states.cols() != model.w_out.rows()) {
        throw DimensionError("predict: states have " + std::to_string(states.cols()) + " columns, W_out expects " +
                             std::to_string(model.w_out.rows()));
    }
    return states * model.w_out;
}

double nrmse(std::span<const double> truth, std::span<const double> prediction)
{
    if (truth.size() != prediction.size()) {
        throw DimensionError("nrmse: series lengths differ (" + std::to_string(truth.size()) + " vs " +
                             std::to_string(prediction.size()) + ")");
    }
    if (truth.size() < 2) {
        throw InputError("nrmse: needs at least 2 samples");
    }
    if (is_constant(truth)) {
        throw NumericError("nrmse: truth has zero variance, metric undefined");
    }
    const auto count = static_cast<double>(truth.size());
    double mean = 0.0;
    for (double v : truth) {
        mean += v;
    }
    mean /= count;
    double variance = 0.0;
    double squared_error = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        variance += (truth[i] - mean) * (truth[i] - mean);
        squared_error += (truth[i] - prediction[i]) * (truth[i] - prediction[i]);
    }
    if (variance == 0.0) {
        throw NumericError("nrmse: truth has zero variance, metric undefined");
    }
    return std::sqrt(squared_error / count) / std::sqrt(variance / count);
}

std::vector<double> nrmse_columns(const RealMatrix& truth, const RealMatrix& prediction)
{
    if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols()) {
        throw DimensionError("nrmse_columns: shape mismatch");
    }
    std::vector<double> out;
    for (Eigen::Index l = 0; l < truth.cols(); ++l) {
        const RealVector a = truth.col(l);
        const RealVector b = prediction.col(l);
        out.push_back(nrmse({a.data(), static_cast<std::size_t>(a.size())}, {b.data(), static_cast<std::size_t>(b.size())}));
    }
    return out;
}

void to_json(nlohmann::json& j, const ReadoutModel& model)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.w_out.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index l = 0; l < model.w_out.cols(); ++l) {
            row.push_back(model.w_out(i, l));
        }
        rows.push_back(std::move(row));
    }
    nlohmann::json errors = nlohmann::json::array();
    for (double e : model.train_nrmse) {
        errors.push_back(std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(nullptr));
    }
    j = nlohmann::json{{"W_out", std::move(rows)}, {"lambda", model.lambda}, {"train_nrmse", std::move(errors)}};
}

void from_json(const nlohmann::json& j, ReadoutModel& model)
{
    const auto& rows = j.at("W_out");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto l = n > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    model.w_out.resize(n, l);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows.at(static_cast<std::size_t>(i)).size()) != l) {
            throw InputError("ReadoutModel: ragged W_out");
        }
        for (Eigen::Index k = 0; k < l; ++k) {
            model.w_out(i, k) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
        }
    }
    model.lambda = j.at("lambda").get<double>();
    model.train_nrmse.clear();
    for (const auto& e : j.at("train_nrmse")) {
        model.train_nrmse.push_back(e.is_null() ? std::numeric_limits<double>::quiet_NaN() : e.get<double>());
    }
}

} // namespace soesn
