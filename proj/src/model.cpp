#include "gridkr/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "gridkr/errors.hpp"

namespace gridkr {

namespace {

std::string cls_to_string(std::span<const int> cls) {
    std::ostringstream os;
    for (size_t i = 0; i < cls.size(); ++i) os << (i ? ":" : "") << cls[i];
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// targets

void TargetSpec::set(std::vector<int> k, std::complex<double> v) {
    if (static_cast<int>(k.size()) != dim_)
        throw std::invalid_argument("TargetSpec::set: frequency dimension mismatch");
    if (v == std::complex<double>(0.0, 0.0))
        c_.erase(k);
    else
        c_[std::move(k)] = v;
}

void TargetSpec::add_conjugate_pair(const std::vector<int>& k, std::complex<double> v) {
    std::vector<int> mk(k.size());
    for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    c_[k] += v;
    if (mk != k) c_[mk] += std::conj(v);
}

void TargetSpec::validate() const {
    if (!real_) return;
    for (const auto& [k, v] : c_) {
        std::vector<int> mk(k.size());
        for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
        auto it = c_.find(mk);
        std::complex<double> mv = (it == c_.end()) ? std::complex<double>(0) : it->second;
        if (std::abs(mv - std::conj(v)) > 1e-12)
            throw std::invalid_argument("TargetSpec: real-valued target requires V[-k] = conj(V[k])");
    }
}

double TargetSpec::norm_sq() const {
    double s = 0;
    for (const auto& [k, v] : c_) s += std::norm(v);
    return s;
}

const std::vector<std::string>& TargetSpec::battery_ids() {
    static const std::vector<std::string> ids = {"zero", "dc", "cos1", "cosn", "pair", "mixed"};
    return ids;
}

TargetSpec TargetSpec::battery(const std::string& id, int dim) {
    TargetSpec t(dim);
    auto axis_freq = [dim](int k) {
        std::vector<int> f(dim, 0);
        f[0] = k;
        return f;
    };
    if (id == "zero") {
        return t;
    } else if (id == "dc") {
        t.set(axis_freq(0), 1.0);
    } else if (id == "cos1") {
        t.add_conjugate_pair(axis_freq(1), 0.5);
    } else if (id == "cosn") {
        t.add_conjugate_pair(axis_freq(1), 1.0 / std::sqrt(2.0));
    } else if (id == "pair") {
        t.add_conjugate_pair(axis_freq(1), 0.5);
        t.add_conjugate_pair(axis_freq(9), 0.5);
    } else if (id == "mixed") {
        t.set(axis_freq(0), 0.5);
        t.add_conjugate_pair(axis_freq(2), -0.25);
        t.add_conjugate_pair(axis_freq(5), 0.125);
        if (dim >= 2) {
            std::vector<int> diag(dim, 0);
            diag[0] = diag[1] = 1;
            t.add_conjugate_pair(diag, 0.125);
        }
    } else {
        throw std::invalid_argument("unknown battery target id: " + id);
    }
    t.validate();
    return t;
}

std::vector<double> evaluate_on_grid(const TargetSpec& target, const Grid& grid) {
    if (target.dim() != grid.d)
        throw std::invalid_argument("evaluate_on_grid: dimension mismatch");
    std::vector<double> out(grid.n, 0.0);
    double max_imag = 0.0;
    for (long long p = 0; p < grid.n; ++p) {
        auto x = grid.point(p);
        std::complex<double> acc = 0.0;
        for (const auto& [k, v] : target.coeffs()) {
            double phase = 0.0;
            for (int a = 0; a < grid.d; ++a) phase += k[a] * x[a];
            acc += v * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        max_imag = std::max(max_imag, std::abs(acc.imag()));
        out[p] = acc.real();
    }
    if (target.real_valued() && max_imag > 1e-10)
        throw std::runtime_error("evaluate_on_grid: real-valued target produced imaginary part");
    return out;
}

// ---------------------------------------------------------------------------
// kernel matrix and eigenstructure

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid, long long dense_limit) {
    if (kernel.dim() != grid.d)
        throw std::invalid_argument("kernel_matrix: dimension mismatch");
    if (grid.n > dense_limit)
        throw std::invalid_argument("kernel_matrix: N^d exceeds the dense limit");
    long long n = grid.n;
    Eigen::MatrixXd K(n, n);
    std::vector<double> diff(grid.d);
    for (long long p = 0; p < n; ++p) {
        auto xp = grid.point(p);
        for (long long q = p; q < n; ++q) {
            auto xq = grid.point(q);
            for (int a = 0; a < grid.d; ++a) diff[a] = wrap_angle(xp[a] - xq[a]);
            double v = kernel.value(diff);
            K(p, q) = v;
            K(q, p) = v;
        }
    }
    // circulant eigenvalues come from the DFT of the first row; used only to
    // flag singularity
    std::vector<std::complex<double>> row(n);
    for (long long q = 0; q < n; ++q) row[q] = K(0, q);
    detail::fft(row, std::vector<int>(grid.d, grid.N), -1);
    double lmax = 0.0, lmin = std::numeric_limits<double>::infinity();
    for (auto& z : row) {
        lmax = std::max(lmax, std::abs(z.real()));
        lmin = std::min(lmin, std::abs(z.real()));
    }
    if (lmin < 1e-12 * lmax)
        throw SingularKernelError("kernel matrix is singular: smallest circulant eigenvalue " +
                                  std::to_string(lmin) + " below 1e-12 of largest " +
                                  std::to_string(lmax));
    return K;
}

EigenStructure eigenstructure(const Spectrum& spectrum, int N) {
    HopTable hop = spectrum.hop_table(N);
    EigenStructure e;
    e.N_ = N;
    e.d_ = spectrum.dim();
    double nd = std::pow(static_cast<double>(N), spectrum.dim());
    e.lambda_.resize(hop.size());
    for (long long c = 0; c < hop.size(); ++c) e.lambda_[c] = nd * hop.signed_sum(c);
    e.interval_ = nd * hop.interval();
    return e;
}

Eigen::VectorXcd EigenStructure::dft_vector(long long cls) const {
    Grid g = Grid::make(N_, d_);
    auto l = g.unflatten(cls);
    Eigen::VectorXcd u(g.n);
    double norm = std::pow(static_cast<double>(N_), -0.5 * d_);
    for (long long p = 0; p < g.n; ++p) {
        auto pi = g.unflatten(p);
        long long dot = 0;
        for (int a = 0; a < d_; ++a) dot += static_cast<long long>(l[a]) * pi[a];
        double phase = -2.0 * M_PI * (dot % N_) / N_;
        u(p) = norm * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return u;
}

// ---------------------------------------------------------------------------
// empirical eigenfunctions and projection

double SparseFourier::l2_norm() const {
    double s = 0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
}

SparseFourier empirical_eigenfunction(const Spectrum& spectrum, int N,
                                      std::span<const int> cls) {
    int d = spectrum.dim();
    if (static_cast<int>(cls.size()) != d)
        throw std::invalid_argument("empirical_eigenfunction: class dimension mismatch");
    HopStats hs = spectrum.hop_stats(N, cls);
    if (hs.l1 <= 1e-14 * std::max(1.0, spectrum.max_abs_coeff()))
        throw DegenerateClassError("empirical eigenfunction undefined: ||G_l||_1 = 0 for class " +
                                   cls_to_string(cls));
    double root = std::sqrt(hs.l1);
    double s = (N % 2 == 0) ? 1.0 : -1.0;

    SparseFourier f;
    int c = spectrum.cutoff();
    // enumerate window aliases m N + cls
    std::vector<int> mlo(d), mhi(d);
    for (int a = 0; a < d; ++a) {
        mlo[a] = -((c + cls[a]) / N);      // smallest m with m N + cls >= -c
        mhi[a] = (c - cls[a]) / N;         // largest m with m N + cls <= c
    }
    std::vector<int> m(mlo), k(d);
    while (true) {
        long long msum = 0;
        for (int a = 0; a < d; ++a) {
            k[a] = m[a] * N + cls[a];
            msum += m[a];
        }
        double g = spectrum.coeff(k);
        if (g != 0.0) {
            double twist = (s > 0 || msum % 2 == 0) ? 1.0 : -1.0;
            f.freqs.push_back(k);
            f.coeffs.push_back(twist * g / root);
        }
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++m[a] <= mhi[a]) break;
            m[a] = mlo[a];
        }
        if (a < 0) break;
    }
    return f;
}

ProjectionResult project_target(const Spectrum& spectrum, int N, const TargetSpec& target) {
    int d = spectrum.dim();
    if (target.dim() != d)
        throw std::invalid_argument("project_target: dimension mismatch");
    HopTable hop = spectrum.hop_table(N);
    double s = (N % 2 == 0) ? 1.0 : -1.0;

    ProjectionResult r;
    r.N = N;
    r.d = d;
    r.weights.assign(hop.size(), std::complex<double>(0.0));

    // class inner products <G_l, V_l> with the grid sign twist; classes whose
    // aliased mass vanishes get zero weight (the span has no component there)
    std::map<long long, std::complex<double>> T;
    for (const auto& [k, v] : target.coeffs()) {
        long long flat = 0, msum = 0;
        for (int a = 0; a < d; ++a) {
            int cl = ((k[a] % N) + N) % N;
            flat = flat * N + cl;
            msum += (static_cast<long long>(k[a]) - cl) / N;
        }
        double twist = (s > 0 || msum % 2 == 0) ? 1.0 : -1.0;
        double g = spectrum.coeff(k);
        T[flat] += twist * g * v;
    }
    double floor2 = 1e-14 * std::max(1.0, spectrum.max_abs_coeff());
    floor2 *= floor2;
    for (auto it = T.begin(); it != T.end();) {
        if (hop.l2sq(it->first) <= floor2) {
            it = T.erase(it);
            continue;
        }
        r.weights[it->first] = it->second / hop.l2sq(it->first);
        r.proj_norm_sq += std::norm(it->second) / hop.l2sq(it->first);
        ++it;
    }

    // projection coefficients over support-class window frequencies
    Grid cg = Grid::make(N, d);
    int c = spectrum.cutoff();
    for (const auto& [flat, w] : T) {
        auto cls = cg.unflatten(flat);
        std::vector<int> mlo(d), mhi(d), m(d), k(d);
        for (int a = 0; a < d; ++a) {
            mlo[a] = -((c + cls[a]) / N);
            mhi[a] = (c - cls[a]) / N;
            m[a] = mlo[a];
        }
        std::complex<double> weight = r.weights[flat];
        while (true) {
            long long msum = 0;
            for (int a = 0; a < d; ++a) {
                k[a] = m[a] * N + cls[a];
                msum += m[a];
            }
            double g = spectrum.coeff(k);
            if (g != 0.0) {
                double twist = (s > 0 || msum % 2 == 0) ? 1.0 : -1.0;
                r.projection[k] = weight * twist * g;
            }
            int a = d - 1;
            for (; a >= 0; --a) {
                if (++m[a] <= mhi[a]) break;
                m[a] = mlo[a];
            }
            if (a < 0) break;
        }
    }

    // residual = target - projection on the union of both supports
    r.residual = r.projection;
    for (auto& [k, v] : r.residual) v = -v;
    for (const auto& [k, v] : target.coeffs()) r.residual[k] += v;
    return r;
}

}  // namespace gridkr
