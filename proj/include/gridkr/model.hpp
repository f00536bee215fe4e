#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "gridkr/grid.hpp"
#include "gridkr/spectrum.hpp"
#include "gridkr/target.hpp"

namespace gridkr {

/// Dense kernel matrix (K(x_p, x_q)) over the grid; block-circulant along
/// each axis. Throws SingularKernelError when the smallest circulant
/// eigenvalue magnitude falls below 1e-12 of the largest.
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid,
                              long long dense_limit = 4096);

/// Spectral data of the kernel matrix obtained without forming it: the DFT
/// vectors u_l and eigenvalues N^d * (signed alias sum of class l). For the
/// named positive families the signed sum equals ||G_l||_1.
class EigenStructure {
public:
    int resolution() const { return N_; }
    int dim() const { return d_; }
    long long size() const { return static_cast<long long>(lambda_.size()); }
    double lambda(long long cls) const { return lambda_[cls]; }
    const std::vector<double>& lambdas() const { return lambda_; }
    /// Interval accounting for hop-sum round-off/tail.
    double interval() const { return interval_; }
    /// u_l as a dense complex vector (entries N^{-d/2} e^{-j 2pi <l,p>/N}).
    Eigen::VectorXcd dft_vector(long long cls) const;

private:
    friend EigenStructure eigenstructure(const Spectrum&, int);
    int N_ = 0, d_ = 0;
    std::vector<double> lambda_;
    double interval_ = 0.0;
};

EigenStructure eigenstructure(const Spectrum& spectrum, int N);

/// Sparse Fourier series: parallel arrays of frequency vectors and real
/// coefficients.
struct SparseFourier {
    std::vector<std::vector<int>> freqs;
    std::vector<double> coeffs;
    double l2_norm() const;
};

/// Empirical eigenfunction psi_l of the empirical kernel operator: the
/// normalized alias bundle with coefficient G[mN+l]/sqrt(||G_l||_1) at
/// frequency mN+l. On the offset grid the bundle carries a sign twist
/// (-1)^(N sum(m)); for even N this is the textbook bundle. Throws
/// DegenerateClassError when ||G_l||_1 = 0.
SparseFourier empirical_eigenfunction(const Spectrum& spectrum, int N,
                                      std::span<const int> cls);

/// L2 projection of the target onto the span of the grid representers.
struct ProjectionResult {
    int N = 0, d = 0;
    /// Per-class projection weights, flat over [N]^d (zero off the target
    /// support classes).
    std::vector<std::complex<double>> weights;
    /// Fourier coefficients of P_X f* (support classes, window frequencies).
    TargetSpec::Coeffs projection;
    /// Fourier coefficients of f* - P_X f* over the same frequency set.
    TargetSpec::Coeffs residual;
    double proj_norm_sq = 0.0;
};

ProjectionResult project_target(const Spectrum& spectrum, int N, const TargetSpec& target);

}  // namespace gridkr
