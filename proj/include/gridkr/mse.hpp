#pragma once

#include <string>
#include <vector>

#include "gridkr/spectrum.hpp"
#include "gridkr/target.hpp"

namespace gridkr {

/// Per-class values of one error term, flat over [N]^d, plus the total.
struct PerClassError {
    std::vector<double> per_class;
    double total = 0.0;
};

/// Exact expected-MSE decomposition of the kernel interpolation estimator:
/// approximation + noise-free estimation + averaged noisy estimation.
struct MseReport {
    KernelFamily family{};
    double bandwidth = 0.0;
    int d = 0, N = 0;
    double sigma2 = 0.0;
    std::string target_id;

    std::vector<double> apx, free, noisy;  // flat over [N]^d
    double apx_total = 0.0, free_total = 0.0, noisy_total = 0.0, total = 0.0;

    /// Comparison tolerance derived from the data: cond(K) estimate times the
    /// spectral truncation interval times 10.
    double tolerance = 0.0;
    double cond_estimate = 0.0;
    double trunc_interval = 0.0;
};

/// apx_i = ||V_i||^2 - <G_i,V_i>^2 / ||G_i||^2 per hop class; independent of
/// sigma. Requires classes meeting the target support to be non-degenerate.
PerClassError approximation_error(const Spectrum& spectrum, int N, const TargetSpec& target);

/// Aliasing error of noiseless interpolation; zero when the target lies in
/// the representer span. Requires all classes non-degenerate.
PerClassError noise_free_error(const Spectrum& spectrum, int N, const TargetSpec& target);

/// noisy_i = (sigma^2/N^d) ||G_i||^2 / (signed alias sum)^2; target-free.
PerClassError noisy_error(const Spectrum& spectrum, int N, double sigma2);

MseReport full_mse(const Spectrum& spectrum, int N, const TargetSpec& target, double sigma2,
                   const std::string& target_id = "");

/// As above with a caller-provided hop table (one table serves many targets).
MseReport full_mse(const Spectrum& spectrum, const HopTable& hop, const TargetSpec& target,
                   double sigma2, const std::string& target_id = "");

}  // namespace gridkr
