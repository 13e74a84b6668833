#include "soesn/numerics.hpp"

#include "soesn/errors.hpp"
#include "soesn/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>

namespace soesn {

void require_square(const RealMatrix& w, const char* what)
{
    if (w.rows() != w.cols() || w.rows() == 0) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                             std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
    }
}

void require_finite(const RealMatrix& w, const char* what)
{
    if (!w.allFinite()) {
        throw InputError(std::string(what) + ": matrix has non-finite entries");
    }
}

namespace {

// Largest |root| of lambda^2 - trace lambda + det.
double max_root_modulus(double trace, double det)
{
    const double disc = trace * trace - 4.0 * det;
    if (disc < 0.0) {
        return std::sqrt(std::max(det, 0.0));
    }
    const double s = std::sqrt(disc);
    return std::max(std::abs(0.5 * (trace + s)), std::abs(0.5 * (trace - s)));
}

} // namespace

double spectral_radius_power(const RealMatrix& w, const PowerIterationOptions& options)
{
    require_square(w, "spectral_radius");
    require_finite(w, "spectral_radius");

    const Eigen::Index n = w.rows();
    Engine engine = make_engine(options.start_seed);
    RealVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = uniform(engine, -1.0, 1.0);
    }
    v.normalize();

    constexpr int kSpreadWindow = 25;
    constexpr double kResidualFactor = 100.0;
    std::deque<double> history;
    double estimate = 0.0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const RealVector u = w * v;
        const double u_norm = u.norm();
        if (u_norm == 0.0) {
            return 0.0;
        }
        const RealVector wu = w * u;

        // Rayleigh-Ritz on span{v, W v}: orthonormal basis (v, q), H = Q^T W Q.
        const double h11 = v.dot(u);
        RealVector q = u - h11 * v;
        const double q_norm = q.norm();
        // How far span{v, q} is from being W-invariant. A stalled estimate alone is not
        // enough: on unitary-like matrices the Ritz value can be constant and still wrong.
        double residual = 0.0;
        if (q_norm <= 1e-13 * u_norm) {
            estimate = std::abs(h11);
        } else {
            q /= q_norm;
            // W q = (W u - h11 W v) / q_norm
            const RealVector wq = (wu - h11 * u) / q_norm;
            const double h12 = v.dot(wq);
            const double h21 = q.dot(u);
            const double h22 = q.dot(wq);
            estimate = max_root_modulus(h11 + h22, h11 * h22 - h12 * h21);
            residual = (wq - h12 * v - h22 * q).norm();
        }

        history.push_back(estimate);
        if (history.size() > kSpreadWindow) {
            history.pop_front();
        }
        if (history.size() == kSpreadWindow) {
            const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
            const double scale = std::max(estimate, 1e-300);
            if (*hi - *lo <= options.tolerance * scale && residual <= kResidualFactor * options.tolerance * scale) {
                return estimate;
            }
        }

        const double wu_norm = wu.norm();
        if (wu_norm == 0.0) {
            // W^2 v = 0: the Krylov space is exhausted and the Ritz estimate is exact.
            return estimate;
        }
        v = wu / wu_norm;
    }
    throw ConvergenceError("spectral_radius: power iteration did not converge after " +
                               std::to_string(options.max_iterations) +
                               " iterations (last estimate " + std::to_string(estimate) + ")",
                           estimate);
}

double spectral_radius_dense(const RealMatrix& w)
{
    require_square(w, "spectral_radius");
    require_finite(w, "spectral_radius");
    Eigen::EigenSolver<RealMatrix> solver(w, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("spectral_radius: dense eigenvalue solve failed");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const RealMatrix& w)
{
    try {
        return spectral_radius_power(w);
    } catch (const ConvergenceError&) {
        return spectral_radius_dense(w);
    }
}

RealMatrix scale_to_spectral_radius(const RealMatrix& w, double rho_target)
{
    if (!(rho_target > 0.0) || !std::isfinite(rho_target)) {
        throw InputError("scale_to_spectral_radius: target must be positive, got " +
                         std::to_string(rho_target));
    }
    const double rho = spectral_radius(w);
    if (rho < 1e-12) {
        throw CannotScaleError("scale_to_spectral_radius: spectral radius " + std::to_string(rho) +
                               " is too small to rescale");
    }
    return w * (rho_target / rho);
}

PowerSpectrum periodogram(std::span<const double> signal)
{
    const std::size_t n = signal.size();
    if (n < 8) {
        throw InputError("periodogram: signal needs at least 8 samples, got " + std::to_string(n));
    }
    double mean = 0.0;
    for (double x : signal) {
        if (!std::isfinite(x)) {
            throw InputError("periodogram: signal has non-finite samples");
        }
        mean += x;
    }
    mean /= static_cast<double>(n);

    std::vector<double> centred(n);
    std::transform(signal.begin(), signal.end(), centred.begin(), [mean](double x) { return x - mean; });

    std::vector<double> cos_table(n), sin_table(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        cos_table[m] = std::cos(angle);
        sin_table[m] = std::sin(angle);
    }

    PowerSpectrum spectrum;
    spectrum.sample_count = n;
    spectrum.bin_power.resize(n / 2 + 1);
    for (std::size_t k = 0; k < spectrum.bin_power.size(); ++k) {
        double re = 0.0;
        double im = 0.0;
        std::size_t phase = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += centred[t] * cos_table[phase];
            im -= centred[t] * sin_table[phase];
            phase += k;
            if (phase >= n) {
                phase -= n;
            }
        }
        spectrum.bin_power[k] = (re * re + im * im) / static_cast<double>(n);
    }
    return spectrum;
}

} // namespace soesn
