#pragma once

#include <span>
#include <string>
#include <vector>

namespace gridkr {

enum class KernelFamily { gaussian, laplace, dirichlet, tabulated };

std::string family_name(KernelFamily f);
KernelFamily family_from_name(const std::string& name);

/// Reduce an angle to [-pi, pi).
double wrap_angle(double t);

/// A shift-invariant periodic kernel K(x,x') = g(M (x - x' mod S^1)) on the
/// d-torus. For the Gaussian and Laplace families the bandwidth M scales the
/// input of a radial profile; for the Dirichlet family M is the order of the
/// kernel and enters the profile itself.
class KernelSpec {
public:
    static KernelSpec gaussian(double bandwidth, int dim);
    static KernelSpec laplace(double bandwidth, int dim);
    static KernelSpec dirichlet(int order, int dim);
    /// Even profile sampled on [0, pi] as (theta, value) pairs; interpolated
    /// with a cubic spline and extended evenly/periodically. d = 1 only.
    static KernelSpec tabulated(std::vector<double> thetas, std::vector<double> values,
                                double bandwidth = 1.0);
    /// Load a tabulated profile from two-column `theta value` text with `#`
    /// comments. Rejects asymmetric input (theta < 0 rows must mirror the
    /// positive side to 1e-9).
    static KernelSpec tabulated_from_file(const std::string& path, double bandwidth = 1.0);

    KernelFamily family() const { return family_; }
    double bandwidth() const { return bandwidth_; }
    int dim() const { return dim_; }

    /// Kernel value at a vector of wrapped per-axis differences.
    double value(std::span<const double> wrapped_diff) const;
    /// One-axis profile g1(M t) used for separable evaluation and quadrature
    /// (for Gaussian/Dirichlet this is the exact per-axis factor).
    double axis_value(double t) const;
    /// g evaluated at zero offset (the kernel matrix diagonal).
    double value_at_zero() const;

    /// True when the d-dimensional profile is an exact per-axis product.
    bool separable() const;
    /// The base kernel (M = 1 instance) of the same family.
    KernelSpec base() const;

    /// Defaults to the Gaussian base kernel (M = 1, d = 1).
    KernelSpec() = default;

private:
    KernelFamily family_ = KernelFamily::gaussian;
    double bandwidth_ = 1.0;
    int dim_ = 1;
    // tabulated profile: natural cubic spline on [0, pi]
    std::vector<double> tab_theta_, tab_value_, tab_second_;
    double spline_eval(double t) const;
};

}  // namespace gridkr
