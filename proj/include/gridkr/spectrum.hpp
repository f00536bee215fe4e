#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "gridkr/kernels.hpp"

namespace gridkr {

/// Statistics of one N-hop subsequence G_l = {G[mN + l]}.
struct HopStats {
    double l1 = 0.0;          // sum of |G[mN+l]|
    double l2sq = 0.0;        // sum of G[mN+l]^2
    double signed_sum = 0.0;  // sum of G[mN+l]; the circulant eigenvalue is N^d times this
    double interval = 0.0;    // width of the uncertainty interval on the sums
};

/// All hop statistics of a spectrum for one resolution N, indexed by the flat
/// row-major class index over [N]^d. Sums are exact folds of the full alias
/// tail where the backing representation allows it (see Spectrum).
class HopTable {
public:
    int resolution() const { return N_; }
    int dim() const { return d_; }
    long long size() const { return static_cast<long long>(sg_.size()); }
    double l1(long long cls) const { return l1_[cls]; }
    double l2sq(long long cls) const { return l2_[cls]; }
    double signed_sum(long long cls) const { return sg_[cls]; }
    double interval() const { return interval_; }
    HopStats stats(long long cls) const {
        return {l1_[cls], l2_[cls], sg_[cls], interval_};
    }

private:
    friend class Spectrum;
    int N_ = 0, d_ = 0;
    std::vector<double> sg_, l1_, l2_;
    double interval_ = 0.0;
};

/// Truncated Fourier coefficient table of a kernel, G[k] over the window
/// |k|_inf <= cutoff, with an analytic bound on the neglected tail.
///
/// Representation depends on the family:
///  - separable families (Gaussian, Dirichlet, Laplace/tabulated at d=1)
///    store one axis table; d-dimensional coefficients are products;
///  - Laplace at d in {2,3} stores the full window from tensor-product
///    trapezoid quadrature.
/// Hop sums use exact alias folding (quadrature at nodes divisible by N sums
/// the whole tail into one period) or closed-form lattice identities, so the
/// derived circulant eigenvalues match dense linear algebra to round-off.
class Spectrum {
public:
    const KernelSpec& kernel() const { return kernel_; }
    int cutoff() const { return cutoff_; }
    int dim() const { return kernel_.dim(); }
    /// Upper bound on sum_{|k|_inf > cutoff} |G[k]|; absent for tabulated
    /// profiles (no analytic tail).
    std::optional<double> truncation_bound() const { return trunc_; }

    /// G[k] for |k|_inf <= cutoff; throws std::out_of_range beyond the window.
    double coeff(std::span<const int> k) const;
    double coeff1(long long k) const;  // d = 1 convenience

    /// All class statistics for resolution N (requires cutoff >= N).
    HopTable hop_table(int N) const;
    HopStats hop_stats(int N, std::span<const int> cls) const;

    /// Largest |G[k]| over the stored window.
    double max_abs_coeff() const { return max_abs_; }

private:
    friend Spectrum build_spectrum(const KernelSpec&, int);
    KernelSpec kernel_;
    int cutoff_ = 0;
    bool separable_ = true;
    std::vector<double> axis_;      // separable: G1[-cutoff..cutoff]
    std::vector<double> full_;      // non-separable: row-major (2c+1)^d window
    std::optional<double> trunc_;
    double max_abs_ = 0.0;
    int build_nodes_ = 0;           // quadrature nodes used at build time (0 = closed form)

    // per-N hop tables are expensive for the quadrature-backed families;
    // copies of a Spectrum share the memo
    struct HopCache {
        std::mutex mu;
        std::map<int, std::shared_ptr<const HopTable>> tables;
    };
    std::shared_ptr<HopCache> hop_cache_ = std::make_shared<HopCache>();

    HopTable compute_hop_table(int N) const;
    void axis_hop_sums(int N, std::vector<double>& sg, std::vector<double>& l1,
                       std::vector<double>& l2, double& interval) const;
};

/// Closed-form coefficient for the named families at d = 1 (per-axis factor
/// for d > 1). Gaussian uses the ratio law anchored at a cached quadrature
/// G[0]; the law is exact only up to the periodization wrap-around, which the
/// stored spectra resolve by quadrature.
double closed_form_coeff(const KernelSpec& kernel, long long k);

/// Trapezoid-rule Fourier coefficient (1/2pi)^d Int g(M theta) e^{-j<k,theta>}.
/// Deterministic; requires nodes_per_axis >= 4 (|k|_inf + 1).
double quadrature_coeff(const KernelSpec& kernel, std::span<const int> k, int nodes_per_axis);
/// As above but signals ConvergenceError if doubling the node count moves the
/// value by more than tol.
double quadrature_coeff_checked(const KernelSpec& kernel, std::span<const int> k,
                                int nodes_per_axis, double tol);

/// Default window size: max(8 ceil(M), 4N).
int default_cutoff(const KernelSpec& kernel, int N);

Spectrum build_spectrum(const KernelSpec& kernel, int cutoff);

}  // namespace gridkr
