#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace soesn {

/// Dense real matrix. Row-major semantics are only relevant for I/O; storage is Eigen's default.
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// One-sided power spectrum of a real signal.
struct PowerSpectrum {
    std::vector<double> bin_power;  ///< floor(sample_count/2)+1 bins, k = 0 is DC
    std::size_t sample_count = 0;

    std::size_t bin_count() const noexcept { return bin_power.size(); }
};

struct PowerIterationOptions {
    int max_iterations = 10000;
    double tolerance = 1e-8;
    /// Seed for the deterministic random start vector.
    unsigned long long start_seed = 0x5eed5eedULL;
};

/// Largest |eigenvalue| by power iteration. Each iteration applies W twice and takes the
/// Ritz values of W on span{v, W v}, so a dominant complex-conjugate (or +-real) pair is
/// resolved through a 2x2 eigenproblem. Converged once the estimate has stalled and the
/// subspace is nearly invariant.
/// Throws ConvergenceError (carrying the last estimate) if the cap is reached.
double spectral_radius_power(const RealMatrix& w, const PowerIterationOptions& options = {});

/// Largest |eigenvalue| from the real Schur form (dense Hessenberg QR).
double spectral_radius_dense(const RealMatrix& w);

/// Power iteration first; dense solve when power iteration does not converge.
double spectral_radius(const RealMatrix& w);

/// Returns W * (rho_target / spectral_radius(W)).
/// Throws CannotScaleError when the spectral radius is below 1e-12.
RealMatrix scale_to_spectral_radius(const RealMatrix& w, double rho_target);

/// |DFT_k(x - mean(x))|^2 / n for k = 0..n/2 (rectangular window, no padding).
PowerSpectrum periodogram(std::span<const double> signal);

/// Throws DimensionError unless w is square.
void require_square(const RealMatrix& w, const char* what);

/// Throws InputError naming `what` unless every entry is finite.
void require_finite(const RealMatrix& w, const char* what);

} // namespace soesn
