#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "gridkr/grid.hpp"
#include "gridkr/spectrum.hpp"
#include "gridkr/target.hpp"

namespace gridkr {

/// Coefficients alpha of an interpolant sum_p alpha_p K(x_p, .), with the
/// DFT bins of alpha cached so span Fourier coefficients B[k] are O(1):
///   B[k] = (-1)^(sum k) N^{d/2} (alpha . u_{k mod N}) G[k].
class InterpolantCoeffs {
public:
    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    double residual_inf() const { return residual_inf_; }
    /// alpha^T u_l for a flat class index.
    std::complex<double> dft_bin(long long cls) const { return bins_[cls]; }
    /// Fourier coefficient of the span function at frequency k (needs the
    /// spectrum window to cover k).
    std::complex<double> span_coeff(const Spectrum& spectrum, std::span<const int> k) const;

    static InterpolantCoeffs from_alpha(const Grid& grid, Eigen::VectorXd alpha,
                                        double residual_inf);

private:
    Grid grid_;
    Eigen::VectorXd alpha_;
    double residual_inf_ = 0.0;
    std::vector<std::complex<double>> bins_;
};

/// Interpolation coefficients from a symmetric dense factorization, with the
/// interpolation residual ||K alpha - y||_inf checked.
InterpolantCoeffs solve_dense(const KernelSpec& kernel, const Grid& grid,
                              const Eigen::VectorXd& y, long long dense_limit = 4096);

/// Same system solved in O(n log n) through the DFT diagonalization
/// K^{-1} y = U diag(1/lambda) U^H y, with eigenvalues from exact hop folds.
InterpolantCoeffs solve_fft(const Spectrum& spectrum, int N, const Eigen::VectorXd& y);

struct NoiselessMse {
    double value = 0.0;
    double tail_bound = 0.0;  // bound on the energy beyond the probe window
};

/// ||fhat - f*||^2 by Parseval over |k|_inf <= probe_cutoff (probe_cutoff
/// <= spectrum cutoff; pass 0 for the full window).
NoiselessMse mse_noiseless(const InterpolantCoeffs& coeffs, const Spectrum& spectrum,
                           const TargetSpec& target, int probe_cutoff = 0);

/// Exact expectation of the noisy estimation error through K^{-2} quadratic
/// forms: sigma^2 sum_l ||G_l||^2 (u_l^H K^{-2} u_l) N^d. Independent check
/// for the closed-form noisy term (no sampling).
double noisy_error_deterministic(const Spectrum& spectrum, int N, double sigma2,
                                 long long dense_limit = 4096);

enum class NoiseKind { gaussian, rademacher };

struct MonteCarloResult {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;
};

/// Simulated expected MSE: draws y = R_N f* + xi, interpolates, measures
/// ||fhat - f*||^2 by Parseval. Deterministic given the seed; trials use
/// independently derived streams.
MonteCarloResult mse_monte_carlo(const Spectrum& spectrum, int N, const TargetSpec& target,
                                 double sigma2, int trials, std::uint64_t seed,
                                 NoiseKind noise = NoiseKind::gaussian, int probe_cutoff = 0);

}  // namespace gridkr
