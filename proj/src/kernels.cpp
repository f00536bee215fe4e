#include "gridkr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gridkr {

std::string family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::gaussian: return "gaussian";
        case KernelFamily::laplace: return "laplace";
        case KernelFamily::dirichlet: return "dirichlet";
        case KernelFamily::tabulated: return "tabulated";
    }
    return "?";
}

KernelFamily family_from_name(const std::string& name) {
    if (name == "gaussian" || name == "gauss") return KernelFamily::gaussian;
    if (name == "laplace") return KernelFamily::laplace;
    if (name == "dirichlet") return KernelFamily::dirichlet;
    if (name == "tabulated") return KernelFamily::tabulated;
    throw std::invalid_argument("unknown kernel family: " + name);
}

double wrap_angle(double t) {
    double w = std::fmod(t + M_PI, 2.0 * M_PI);
    if (w < 0) w += 2.0 * M_PI;
    return w - M_PI;
}

namespace {

double dirichlet_profile(double t, double order) {
    // sin((M+1/2)t)/sin(t/2) with the removable singularity filled by its
    // limit 2M+1.
    double s = std::sin(0.5 * t);
    if (std::abs(s) < 1e-9) return 2.0 * order + 1.0;
    return std::sin((order + 0.5) * t) / s;
}

void validate_common(double bandwidth, int dim) {
    if (!(bandwidth > 0)) throw std::invalid_argument("kernel bandwidth must be positive");
    if (dim < 1) throw std::invalid_argument("kernel dimension must be >= 1");
}

}  // namespace

KernelSpec KernelSpec::gaussian(double bandwidth, int dim) {
    validate_common(bandwidth, dim);
    KernelSpec k;
    k.family_ = KernelFamily::gaussian;
    k.bandwidth_ = bandwidth;
    k.dim_ = dim;
    return k;
}

KernelSpec KernelSpec::laplace(double bandwidth, int dim) {
    validate_common(bandwidth, dim);
    KernelSpec k;
    k.family_ = KernelFamily::laplace;
    k.bandwidth_ = bandwidth;
    k.dim_ = dim;
    return k;
}

KernelSpec KernelSpec::dirichlet(int order, int dim) {
    if (order < 0) throw std::invalid_argument("dirichlet order must be a non-negative integer");
    if (dim < 1) throw std::invalid_argument("kernel dimension must be >= 1");
    KernelSpec k;
    k.family_ = KernelFamily::dirichlet;
    k.bandwidth_ = order;
    k.dim_ = dim;
    return k;
}

KernelSpec KernelSpec::tabulated(std::vector<double> thetas, std::vector<double> values,
                                 double bandwidth) {
    if (!(bandwidth > 0)) throw std::invalid_argument("kernel bandwidth must be positive");
    if (thetas.size() != values.size() || thetas.size() < 4)
        throw std::invalid_argument("tabulated profile needs >= 4 (theta, value) samples");
    std::vector<size_t> order(thetas.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return thetas[a] < thetas[b]; });
    std::vector<double> th, va;
    for (size_t i : order) {
        th.push_back(thetas[i]);
        va.push_back(values[i]);
    }
    if (std::abs(th.front()) > 1e-12)
        throw std::invalid_argument("tabulated profile must start at theta = 0");
    if (th.back() > M_PI + 1e-9)
        throw std::invalid_argument("tabulated profile samples must lie in [0, pi]");
    for (double v : va)
        if (!std::isfinite(v)) throw std::invalid_argument("tabulated profile must be finite");

    KernelSpec k;
    k.family_ = KernelFamily::tabulated;
    k.bandwidth_ = bandwidth;
    k.dim_ = 1;
    k.tab_theta_ = std::move(th);
    k.tab_value_ = std::move(va);

    // natural cubic spline second derivatives
    size_t n = k.tab_theta_.size();
    k.tab_second_.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        double sig = (k.tab_theta_[i] - k.tab_theta_[i - 1]) /
                     (k.tab_theta_[i + 1] - k.tab_theta_[i - 1]);
        double p = sig * k.tab_second_[i - 1] + 2.0;
        k.tab_second_[i] = (sig - 1.0) / p;
        double dd = (k.tab_value_[i + 1] - k.tab_value_[i]) /
                        (k.tab_theta_[i + 1] - k.tab_theta_[i]) -
                    (k.tab_value_[i] - k.tab_value_[i - 1]) /
                        (k.tab_theta_[i] - k.tab_theta_[i - 1]);
        u[i] = (6.0 * dd / (k.tab_theta_[i + 1] - k.tab_theta_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (size_t i = n - 1; i-- > 0;)
        k.tab_second_[i] = k.tab_second_[i] * k.tab_second_[i + 1] + u[i];
    return k;
}

KernelSpec KernelSpec::tabulated_from_file(const std::string& path, double bandwidth) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open profile file: " + path);
    std::vector<double> th, va;
    std::vector<std::pair<double, double>> negatives;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double t, v;
        if (!(ls >> t >> v)) continue;
        if (t < 0)
            negatives.emplace_back(-t, v);
        else {
            th.push_back(t);
            va.push_back(v);
        }
    }
    // evenness: any theta < 0 rows must mirror the positive side
    for (auto [t, v] : negatives) {
        bool matched = false;
        for (size_t i = 0; i < th.size(); ++i) {
            if (std::abs(th[i] - t) < 1e-12) {
                if (std::abs(va[i] - v) > 1e-9)
                    throw std::invalid_argument(
                        "tabulated profile violates evenness: g(-theta) != g(theta) at theta = " +
                        std::to_string(t));
                matched = true;
                break;
            }
        }
        if (!matched)
            throw std::invalid_argument(
                "tabulated profile violates evenness: unmatched sample at theta = " +
                std::to_string(-t));
    }
    return tabulated(std::move(th), std::move(va), bandwidth);
}

double KernelSpec::spline_eval(double t) const {
    // even periodic extension: reduce to [0, pi]
    t = std::abs(wrap_angle(t));
    size_t lo = 0, hi = tab_theta_.size() - 1;
    if (t <= tab_theta_.front()) return tab_value_.front();
    if (t >= tab_theta_.back()) return tab_value_.back();
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (tab_theta_[mid] > t)
            hi = mid;
        else
            lo = mid;
    }
    double h = tab_theta_[hi] - tab_theta_[lo];
    double a = (tab_theta_[hi] - t) / h, b = (t - tab_theta_[lo]) / h;
    return a * tab_value_[lo] + b * tab_value_[hi] +
           ((a * a * a - a) * tab_second_[lo] + (b * b * b - b) * tab_second_[hi]) * h * h / 6.0;
}

double KernelSpec::axis_value(double t) const {
    switch (family_) {
        case KernelFamily::gaussian: {
            double u = bandwidth_ * t;
            return std::exp(-u * u);
        }
        case KernelFamily::laplace:
            return std::exp(-bandwidth_ * std::abs(t));
        case KernelFamily::dirichlet:
            return dirichlet_profile(t, bandwidth_);
        case KernelFamily::tabulated:
            return spline_eval(bandwidth_ * t);
    }
    return 0.0;
}

double KernelSpec::value(std::span<const double> wrapped_diff) const {
    if (static_cast<int>(wrapped_diff.size()) != dim_)
        throw std::invalid_argument("kernel value: offset dimension mismatch");
    switch (family_) {
        case KernelFamily::gaussian: {
            double r2 = 0;
            for (double t : wrapped_diff) r2 += t * t;
            return std::exp(-bandwidth_ * bandwidth_ * r2);
        }
        case KernelFamily::laplace: {
            double r2 = 0;
            for (double t : wrapped_diff) r2 += t * t;
            return std::exp(-bandwidth_ * std::sqrt(r2));
        }
        case KernelFamily::dirichlet: {
            double p = 1.0;
            for (double t : wrapped_diff) p *= dirichlet_profile(t, bandwidth_);
            return p;
        }
        case KernelFamily::tabulated:
            return spline_eval(bandwidth_ * wrapped_diff[0]);
    }
    return 0.0;
}

double KernelSpec::value_at_zero() const {
    std::vector<double> zero(dim_, 0.0);
    return value(zero);
}

bool KernelSpec::separable() const {
    if (dim_ == 1) return true;
    return family_ == KernelFamily::gaussian || family_ == KernelFamily::dirichlet;
}

KernelSpec KernelSpec::base() const {
    KernelSpec b = *this;
    b.bandwidth_ = 1.0;
    return b;
}

}  // namespace gridkr
