#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "gridkr/grid.hpp"

namespace gridkr {

/// Sparse Fourier representation of a target function f* = sum_k V[k] phi_k.
class TargetSpec {
public:
    using Coeffs = std::map<std::vector<int>, std::complex<double>>;

    explicit TargetSpec(int dim, bool real_valued = true) : dim_(dim), real_(real_valued) {}

    int dim() const { return dim_; }
    bool real_valued() const { return real_; }
    const Coeffs& coeffs() const { return c_; }
    bool empty() const { return c_.empty(); }

    void set(std::vector<int> k, std::complex<double> v);
    /// Adds the pair V[k] += v, V[-k] += conj(v) (a real cosine/sine mode).
    void add_conjugate_pair(const std::vector<int>& k, std::complex<double> v);

    /// Checks conjugate symmetry when real_valued.
    void validate() const;

    double norm_sq() const;

    /// Named targets of the built-in battery: zero, dc, cos1, cosn, pair,
    /// mixed. Frequencies sit on the first axis; `mixed` adds a diagonal
    /// mode for d >= 2.
    static TargetSpec battery(const std::string& id, int dim);
    static const std::vector<std::string>& battery_ids();

private:
    int dim_;
    bool real_;
    Coeffs c_;
};

/// R_N f*: values of the target at all grid points (row-major flat order).
std::vector<double> evaluate_on_grid(const TargetSpec& target, const Grid& grid);

}  // namespace gridkr
