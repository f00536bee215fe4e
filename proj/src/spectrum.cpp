#include "gridkr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "fft.hpp"
#include "gridkr/errors.hpp"

namespace gridkr {

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// smallest 3 * 2^j >= x (used where no fold divisibility is required)
int round_nodes(long long x) {
    long long n = 6;
    while (n < x) n *= 2;
    if (n > (1 << 22)) throw std::invalid_argument("quadrature node count too large");
    return static_cast<int>(n);
}

// smallest multiple of N >= x
int round_to_multiple(long long x, int N) {
    long long m = ((x + N - 1) / N) * N;
    if (m > (1 << 22)) throw std::invalid_argument("quadrature node count too large");
    return static_cast<int>(m);
}

// Trapezoid-rule Fourier coefficients of the one-axis profile, all k in
// [-cutoff, cutoff]. On the uniform grid the rule is a DFT of the samples;
// the e^{-jk(-pi)} phase of the left endpoint becomes the (-1)^k factor.
std::vector<double> axis_quad(const KernelSpec& kernel, int cutoff, int nodes) {
    std::vector<double> f(nodes);
    for (int p = 0; p < nodes; ++p)
        f[p] = kernel.axis_value(-M_PI + 2.0 * M_PI * p / nodes);
    auto F = detail::fft_real_1d(f);
    std::vector<double> out(2 * cutoff + 1);
    for (int k = -cutoff; k <= cutoff; ++k) {
        long long idx = ((k % nodes) + nodes) % nodes;
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out[k + cutoff] = sign * F[idx].real() / nodes;
    }
    // evenness is exact for an even profile; symmetrize away round-off
    for (int k = 1; k <= cutoff; ++k) {
        double m = 0.5 * (out[cutoff + k] + out[cutoff - k]);
        out[cutoff + k] = out[cutoff - k] = m;
    }
    return out;
}

// Full d-dimensional window for non-separable profiles (Laplace d >= 2).
std::vector<double> full_quad(const KernelSpec& kernel, int cutoff, int nodes) {
    int d = kernel.dim();
    long long total = ipow(nodes, d);
    if (total > (1LL << 25)) throw std::invalid_argument("full quadrature grid too large");
    std::vector<std::complex<double>> f(total);
    std::vector<double> theta(d);
    std::vector<int> idx(d, 0);
    for (long long flat = 0; flat < total; ++flat) {
        for (int a = 0; a < d; ++a) theta[a] = -M_PI + 2.0 * M_PI * idx[a] / nodes;
        f[flat] = kernel.value(theta);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < nodes) break;
            idx[a] = 0;
        }
    }
    detail::fft(f, std::vector<int>(d, nodes), -1);
    int w = 2 * cutoff + 1;
    std::vector<double> out(ipow(w, d));
    std::vector<int> k(d, -cutoff);
    for (long long flat = 0; flat < static_cast<long long>(out.size()); ++flat) {
        long long src = 0;
        int parity = 0;
        for (int a = 0; a < d; ++a) {
            src = src * nodes + ((k[a] % nodes) + nodes) % nodes;
            parity += k[a];
        }
        double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        out[flat] = sign * f[src].real() / static_cast<double>(total);
        for (int a = d - 1; a >= 0; --a) {
            if (++k[a] <= cutoff) break;
            k[a] = -cutoff;
        }
    }
    return out;
}

double gaussian_g0_quad(double M) {
    static std::mutex mu;
    static std::unordered_map<double, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;
    auto k = KernelSpec::gaussian(M, 1);
    int nodes = round_nodes(std::max<long long>(32768, 16 * static_cast<long long>(std::ceil(M))));
    double sum = 0;
    for (int p = 0; p < nodes; ++p) sum += k.axis_value(-M_PI + 2.0 * M_PI * p / nodes);
    double g0 = sum / nodes;
    cache[M] = g0;
    return g0;
}

// |G_true[k] - G[0] e^{-k^2/4M^2}| <= floor / k^2: the periodization of the
// Gaussian integral leaves a boundary term of size e^{-M^2 pi^2}.
double gaussian_wrap_floor(double M) {
    return 2.0 * M * M * std::exp(-M * M * M_PI * M_PI) * (2.0 + 1.0 / (M * M * M_PI * M_PI));
}

double gaussian_axis_tail(double M, double K) {
    double g0 = gaussian_g0_quad(M);
    double a = std::exp(-(K + 1) * (K + 1) / (4 * M * M));
    double r = std::exp(-(2 * K + 3) / (4 * M * M));
    double smooth = g0 * a / std::max(1e-300, 1.0 - r);
    double floor = gaussian_wrap_floor(M) / std::max(1.0, K);
    return 2.0 * (smooth + floor);
}

double laplace_axis_tail(double M, double K) {
    // sum_{|k|>K} M(1 -+ e^{-pi M})/(pi(M^2+k^2)) <= (2M(1+e)/pi) Int_K dk/(M^2+k^2)
    return 2.0 * (1.0 + std::exp(-M_PI * M)) / M_PI * (M_PI / 2 - std::atan(K / M));
}

// Signed alias sums from the circulant structure: sampling the profile on the
// N-grid and transforming gives sum_m G[mN+l] exactly (the quadrature fold
// telescopes onto the coarse grid), with far less round-off than summing a
// long fold. The -pi grid offset contributes the (-1)^l sign.
std::vector<double> profile_class_sums(const KernelSpec& kernel, int N) {
    int d = kernel.dim();
    long long n = ipow(N, d);
    std::vector<std::complex<double>> w(n);
    std::vector<double> theta(d);
    std::vector<int> idx(d, 0);
    for (long long flat = 0; flat < n; ++flat) {
        for (int a = 0; a < d; ++a) theta[a] = -M_PI + 2.0 * M_PI * idx[a] / N;
        w[flat] = kernel.value(theta);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < N) break;
            idx[a] = 0;
        }
    }
    detail::fft(w, std::vector<int>(d, N), -1);
    std::vector<double> sg(n);
    std::vector<int> l(d, 0);
    for (long long flat = 0; flat < n; ++flat) {
        int parity = 0;
        for (int a = 0; a < d; ++a) parity += l[a];
        double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        sg[flat] = sign * w[flat].real() / static_cast<double>(n);
        for (int a = d - 1; a >= 0; --a) {
            if (++l[a] < N) break;
            l[a] = 0;
        }
    }
    return sg;
}

// Exact lattice sums for the Laplace d=1 spectrum:
//   sum_m 1/(M^2 + (mN+l)^2) = (pi/(MN)) sinh(2 pi M/N) / (cosh(2 pi M/N) - cos(2 pi l/N))
double laplace_lattice_S(double M, int N, int l) {
    double c = 2.0 * M_PI * M / N, g = 2.0 * M_PI * l / N;
    return (M_PI / (M * N)) * std::sinh(c) / (std::cosh(c) - std::cos(g));
}

double laplace_signed_hop_sum(double M, int N, int l) {
    double e = std::exp(-M_PI * M);
    if (N % 2 == 0) {
        double fl = 1.0 - ((l % 2 == 0) ? 1.0 : -1.0) * e;
        return (M / M_PI) * fl * laplace_lattice_S(M, N, l);
    }
    // odd N: the (-1)^k factor alternates over the class; split even/odd m
    double A = laplace_lattice_S(M, 2 * N, l) - laplace_lattice_S(M, 2 * N, (l + N) % (2 * N));
    double sgn = (l % 2 == 0) ? 1.0 : -1.0;
    return (M / M_PI) * (laplace_lattice_S(M, N, l) - sgn * e * A);
}

}  // namespace

double closed_form_coeff(const KernelSpec& kernel, long long k) {
    double M = kernel.bandwidth();
    switch (kernel.family()) {
        case KernelFamily::gaussian:
            return gaussian_g0_quad(M) * std::exp(-static_cast<double>(k) * k / (4 * M * M));
        case KernelFamily::laplace: {
            double par = (k % 2 == 0) ? 1.0 : -1.0;
            return M * (1.0 - par * std::exp(-M_PI * M)) / (M_PI * (M * M + static_cast<double>(k) * k));
        }
        case KernelFamily::dirichlet:
            return (std::llabs(k) <= static_cast<long long>(M + 0.5)) ? 1.0 : 0.0;
        case KernelFamily::tabulated:
            throw std::invalid_argument("closed_form_coeff: tabulated kernels have no closed form");
    }
    return 0.0;
}

double quadrature_coeff(const KernelSpec& kernel, std::span<const int> k, int nodes_per_axis) {
    int d = kernel.dim();
    if (static_cast<int>(k.size()) != d)
        throw std::invalid_argument("quadrature_coeff: index dimension mismatch");
    int kinf = 0;
    for (int ki : k) kinf = std::max(kinf, std::abs(ki));
    if (nodes_per_axis < 4 * (kinf + 1))
        throw std::invalid_argument("quadrature_coeff: nodes_per_axis must be >= 4(|k|_inf + 1)");
    if (kernel.separable()) {
        double prod = 1.0;
        for (int ki : k) {
            auto c = axis_quad(kernel, std::abs(ki), nodes_per_axis);
            prod *= c[std::abs(ki) + std::abs(ki)];
        }
        return prod;
    }
    long long total = ipow(nodes_per_axis, d);
    if (total > (1LL << 26)) throw std::invalid_argument("quadrature_coeff: grid too large");
    // direct trapezoid sum
    std::vector<int> idx(d, 0);
    std::vector<double> theta(d);
    double re = 0.0;
    for (long long flat = 0; flat < total; ++flat) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a) {
            theta[a] = -M_PI + 2.0 * M_PI * idx[a] / nodes_per_axis;
            phase += k[a] * theta[a];
        }
        re += kernel.value(theta) * std::cos(phase);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < nodes_per_axis) break;
            idx[a] = 0;
        }
    }
    return re / static_cast<double>(total);
}

double quadrature_coeff_checked(const KernelSpec& kernel, std::span<const int> k,
                                int nodes_per_axis, double tol) {
    double v1 = quadrature_coeff(kernel, k, nodes_per_axis);
    double v2 = quadrature_coeff(kernel, k, 2 * nodes_per_axis);
    if (std::abs(v2 - v1) > tol)
        throw ConvergenceError("quadrature did not converge: doubling nodes moved the value by " +
                               std::to_string(std::abs(v2 - v1)));
    return v2;
}

int default_cutoff(const KernelSpec& kernel, int N) {
    int c = std::max<int>(8 * static_cast<int>(std::ceil(kernel.bandwidth())), 4 * N);
    if (kernel.family() == KernelFamily::laplace && kernel.dim() == 2)
        c = std::max(c, 128);  // keeps the windowed alias-energy tail below 1e-8
    if (kernel.dim() == 3) c = std::min(c, 24);
    return c;
}

Spectrum build_spectrum(const KernelSpec& kernel, int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("build_spectrum: cutoff must be >= 1");
    int d = kernel.dim();
    double M = kernel.bandwidth();
    if (kernel.family() == KernelFamily::laplace && d > 3)
        throw std::invalid_argument("build_spectrum: laplace quadrature supported for d <= 3 only");
    if (d == 3 && cutoff > 24)
        throw std::invalid_argument("build_spectrum: d = 3 windows limited to cutoff <= 24");

    Spectrum s;
    s.kernel_ = kernel;
    s.cutoff_ = cutoff;
    s.separable_ = kernel.separable();

    switch (kernel.family()) {
        case KernelFamily::dirichlet: {
            int order = static_cast<int>(M + 0.5);
            s.axis_.assign(2 * cutoff + 1, 0.0);
            for (int k = -cutoff; k <= cutoff; ++k)
                if (std::abs(k) <= order) s.axis_[k + cutoff] = 1.0;
            double stored = 2 * std::min(cutoff, order) + 1;
            s.trunc_ = std::max(0.0, std::pow(2.0 * order + 1.0, d) - std::pow(stored, d));
            break;
        }
        case KernelFamily::laplace: {
            if (d == 1) {
                s.axis_.assign(2 * cutoff + 1, 0.0);
                for (int k = -cutoff; k <= cutoff; ++k) s.axis_[k + cutoff] = closed_form_coeff(kernel, k);
                s.trunc_ = laplace_axis_tail(M, cutoff);
            } else {
                long long need = std::max<long long>(
                    {4LL * (cutoff + 1), static_cast<long long>(16 * std::ceil(M)), d == 2 ? 3072 : 96});
                s.build_nodes_ = d == 2 ? round_nodes(need) : std::min(round_nodes(need), 192);
                s.full_ = full_quad(kernel, cutoff, s.build_nodes_);
                // d-dim tail estimate from the separable upper envelope at
                // bandwidth M/sqrt(d) (norm equivalence), 1.2 margin
                double Mh = M / std::sqrt(static_cast<double>(d));
                double t1 = laplace_axis_tail(Mh, cutoff);
                s.trunc_ = 1.2 * d * t1;
            }
            break;
        }
        case KernelFamily::gaussian:
        case KernelFamily::tabulated: {
            // 16x oversampling keeps the relative alias error of the small
            // wrap-floor coefficients near 1e-9 (absolute error floor/(nodes-k)^2)
            long long need = std::max<long long>(
                {16LL * (cutoff + 1), static_cast<long long>(16 * std::ceil(M)), 3072});
            s.build_nodes_ = round_nodes(need);
            s.axis_ = axis_quad(kernel, cutoff, s.build_nodes_);
            if (kernel.family() == KernelFamily::gaussian) {
                double t1 = gaussian_axis_tail(M, cutoff);
                double total1 = 1.0 + 4.0 * gaussian_wrap_floor(M);
                s.trunc_ = d * t1 * std::pow(total1, d - 1);
            }
            // tabulated: no analytic tail; truncation_bound stays absent
            break;
        }
    }

    double mx = 0.0;
    if (s.separable_) {
        double axmax = 0.0;
        for (double v : s.axis_) axmax = std::max(axmax, std::abs(v));
        mx = std::pow(axmax, d);
    } else {
        for (double v : s.full_) mx = std::max(mx, std::abs(v));
    }
    s.max_abs_ = mx;

    // positive-definiteness of the named families, up to the periodization floor
    if (kernel.family() != KernelFamily::tabulated) {
        double tol = 1e-12 * std::max(1.0, mx);
        if (kernel.family() == KernelFamily::gaussian) tol += 1.5 * gaussian_wrap_floor(M);
        if (kernel.family() == KernelFamily::laplace && d >= 2)
            tol += 0.01 * M * std::exp(-M_PI * M);  // radial wrap seam across the faces
        const auto& tab = s.separable_ ? s.axis_ : s.full_;
        for (double v : tab)
            if (v < -tol)
                throw std::runtime_error("build_spectrum: named-family coefficient below -tol");
    }
    return s;
}

double Spectrum::coeff(std::span<const int> k) const {
    int d = dim();
    if (static_cast<int>(k.size()) != d)
        throw std::invalid_argument("Spectrum::coeff: index dimension mismatch");
    for (int ki : k)
        if (std::abs(ki) > cutoff_) throw std::out_of_range("Spectrum::coeff: index beyond cutoff");
    if (separable_) {
        double p = 1.0;
        for (int ki : k) p *= axis_[ki + cutoff_];
        return p;
    }
    long long w = 2 * cutoff_ + 1, flat = 0;
    for (int ki : k) flat = flat * w + (ki + cutoff_);
    return full_[flat];
}

double Spectrum::coeff1(long long k) const {
    int ik = static_cast<int>(k);
    return coeff(std::span<const int>(&ik, 1));
}

// Per-axis hop sums with exact tail treatment. The trapezoid rule at `nodes`
// points aliases G_true[k + m*nodes] onto k; when N divides nodes, summing
// one full period per residue class folds the entire tail into the sum, so
// the class sums (and hence the circulant eigenvalues) are exact up to
// round-off. Laplace d=1 uses the closed lattice identity instead.
void Spectrum::axis_hop_sums(int N, std::vector<double>& sg, std::vector<double>& l1,
                             std::vector<double>& l2, double& interval) const {
    sg.assign(N, 0.0);
    l1.assign(N, 0.0);
    l2.assign(N, 0.0);
    const KernelSpec& k = kernel_;
    double M = k.bandwidth();
    switch (k.family()) {
        case KernelFamily::dirichlet: {
            int order = static_cast<int>(M + 0.5);
            for (int kk = -order; kk <= order; ++kk) {
                int cls = ((kk % N) + N) % N;
                sg[cls] += 1.0;
                l1[cls] += 1.0;
                l2[cls] += 1.0;
            }
            interval = 0.0;
            return;
        }
        case KernelFamily::laplace: {
            for (int l = 0; l < N; ++l) {
                double s = laplace_signed_hop_sum(M, N, l);
                sg[l] = s;
                l1[l] = s;  // terms are positive: 1 - (-1)^k e^{-pi M} > 0
            }
            // alias energy: direct closed-form sum, quartic tail corrected by
            // its midpoint integral
            const int mstop = 3000;
            double e = std::exp(-M_PI * M);
            double c2 = (M / M_PI) * (M / M_PI) * (1.0 + e * e);
            for (int l = 0; l < N; ++l) {
                double acc = 0.0;
                for (int m = -mstop; m <= mstop; ++m) {
                    double v = closed_form_coeff(k, static_cast<long long>(m) * N + l);
                    acc += v * v;
                }
                for (int side = 0; side < 2; ++side) {
                    double a = (mstop + 0.5) * N + (side == 0 ? l : -l);
                    acc += c2 / N *
                           (M_PI / (4 * M * M * M) - a / (2 * M * M * (M * M + a * a)) -
                            std::atan(a / M) / (2 * M * M * M));
                }
                l2[l] = acc;
            }
            interval = 1e-12 * std::max(1.0, k.value_at_zero());
            return;
        }
        case KernelFamily::gaussian:
        case KernelFamily::tabulated: {
            // oversampled like the window table so the alias-energy sums of
            // the wrap-floor classes stay accurate in relative terms
            long long need = std::max<long long>(
                {16LL * (cutoff_ + 1), static_cast<long long>(16 * std::ceil(M)), 3072});
            int nodes = round_to_multiple(need, N);
            auto c = axis_quad(k, nodes / 2, nodes);
            // signed sums from the exact N-point identity; absolute and
            // squared sums folded over one full period [-nodes/2, nodes/2)
            KernelSpec axis1 = k.dim() == 1 ? k : axis_kernel(k);
            sg = profile_class_sums(axis1, N);
            std::vector<long double> al1(N, 0.0L), al2(N, 0.0L);
            for (int kk = -nodes / 2; kk < nodes / 2; ++kk) {
                int cls = ((kk % N) + N) % N;
                long double v = c[kk + nodes / 2];
                al1[cls] += std::abs(v);
                al2[cls] += v * v;
            }
            for (int cls = 0; cls < N; ++cls) {
                l1[cls] = static_cast<double>(al1[cls]);
                l2[cls] = static_cast<double>(al2[cls]);
            }
            interval = 1e-12 * std::max(1.0, k.value_at_zero());
            if (k.family() == KernelFamily::gaussian)
                interval += gaussian_axis_tail(M, nodes / 2.0);
            return;
        }
    }
}

HopTable Spectrum::hop_table(int N) const {
    if (N < 1) throw std::invalid_argument("hop_table: N must be >= 1");
    if (cutoff_ < N) throw std::invalid_argument("hop_table: spectrum cutoff must be >= N");
    {
        std::lock_guard<std::mutex> lock(hop_cache_->mu);
        auto it = hop_cache_->tables.find(N);
        if (it != hop_cache_->tables.end()) return *it->second;
    }
    auto table = std::make_shared<const HopTable>(compute_hop_table(N));
    std::lock_guard<std::mutex> lock(hop_cache_->mu);
    hop_cache_->tables.emplace(N, table);
    return *table;
}

HopTable Spectrum::compute_hop_table(int N) const {
    int d = dim();
    HopTable t;
    t.N_ = N;
    t.d_ = d;
    long long n = ipow(N, d);
    if (separable_) {
        std::vector<double> sg1, l11, l21;
        double iv = 0.0;
        axis_hop_sums(N, sg1, l11, l21, iv);
        t.sg_.assign(n, 1.0);
        t.l1_.assign(n, 1.0);
        t.l2_.assign(n, 1.0);
        for (long long flat = 0; flat < n; ++flat) {
            long long rem = flat;
            double sg = 1, l1 = 1, l2 = 1;
            for (int a = 0; a < d; ++a) {
                int cls = static_cast<int>(rem % N);
                rem /= N;
                sg *= sg1[cls];
                l1 *= l11[cls];
                l2 *= l21[cls];
            }
            t.sg_[flat] = sg;
            t.l1_[flat] = l1;
            t.l2_[flat] = l2;
        }
        double scale = std::pow(std::max(1.0, kernel_.value_at_zero()), d - 1);
        t.interval_ = d * iv * scale + 1e-13;
        return t;
    }

    // non-separable (laplace d in {2,3}): fresh quadrature at N-divisible
    // nodes; fold signed/abs sums over the full period, window the squares
    long long need = std::max<long long>(
        {4LL * (cutoff_ + 1), static_cast<long long>(16 * std::ceil(kernel_.bandwidth())),
         d == 2 ? 3072 : 96});
    int nodes = round_to_multiple(need, N);
    if (d == 3) nodes = round_to_multiple(std::min<long long>(need, 192), N);
    long long total = ipow(nodes, d);
    if (total > (1LL << 25)) throw std::invalid_argument("hop_table: quadrature grid too large");
    std::vector<std::complex<double>> f(total);
    std::vector<double> theta(d);
    std::vector<int> idx(d, 0);
    for (long long flat = 0; flat < total; ++flat) {
        for (int a = 0; a < d; ++a) theta[a] = -M_PI + 2.0 * M_PI * idx[a] / nodes;
        f[flat] = kernel_.value(theta);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < nodes) break;
            idx[a] = 0;
        }
    }
    detail::fft(f, std::vector<int>(d, nodes), -1);

    t.sg_.assign(n, 0.0);
    t.l1_.assign(n, 0.0);
    t.l2_.assign(n, 0.0);
    std::vector<int> kk(d, -nodes / 2);
    long long wtotal = ipow(nodes, d);
    for (long long c = 0; c < wtotal; ++c) {
        long long src = 0, cls = 0;
        int parity = 0, kinf = 0;
        for (int a = 0; a < d; ++a) {
            src = src * nodes + ((kk[a] % nodes) + nodes) % nodes;
            cls = cls * N + ((kk[a] % N) + N) % N;
            parity += kk[a];
            kinf = std::max(kinf, std::abs(kk[a]));
        }
        double v = f[src].real() / static_cast<double>(total);
        if (parity % 2 != 0) v = -v;
        t.sg_[cls] += v;
        t.l1_[cls] += std::abs(v);
        if (kinf <= cutoff_) t.l2_[cls] += v * v;  // squares windowed: alias
                                                   // cross-terms would pollute
        for (int a = d - 1; a >= 0; --a) {
            if (++kk[a] < nodes / 2) break;
            kk[a] = -nodes / 2;
        }
    }
    double Mh = kernel_.bandwidth() / std::sqrt(static_cast<double>(d));
    double t1 = laplace_axis_tail(Mh, cutoff_);
    t.interval_ = 1.2 * d * t1 * t1 + 1e-12;  // neglected alias energy + fold round-off
    return t;
}

HopStats Spectrum::hop_stats(int N, std::span<const int> cls) const {
    int d = dim();
    if (static_cast<int>(cls.size()) != d)
        throw std::invalid_argument("hop_stats: class index dimension mismatch");
    HopTable t = hop_table(N);
    long long flat = 0;
    for (int c : cls) {
        if (c < 0 || c >= N) throw std::invalid_argument("hop_stats: class index outside [N]^d");
        flat = flat * N + c;
    }
    return t.stats(flat);
}

}  // namespace gridkr
