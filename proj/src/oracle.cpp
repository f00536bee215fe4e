#include "gridkr/oracle.hpp"

#include <cmath>
#include <random>

#include "fft.hpp"
#include "gridkr/errors.hpp"
#include "gridkr/model.hpp"

namespace gridkr {

namespace {

// forward DFT bins of a real grid vector: bins[l] = alpha^T u_l
std::vector<std::complex<double>> alpha_bins(const Grid& g, const Eigen::VectorXd& alpha) {
    std::vector<std::complex<double>> z(g.n);
    for (long long p = 0; p < g.n; ++p) z[p] = alpha(p);
    detail::fft(z, std::vector<int>(g.d, g.N), -1);
    double norm = std::pow(static_cast<double>(g.N), -0.5 * g.d);
    for (auto& v : z) v *= norm;
    return z;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

InterpolantCoeffs InterpolantCoeffs::from_alpha(const Grid& grid, Eigen::VectorXd alpha,
                                                double residual_inf) {
    InterpolantCoeffs c;
    c.grid_ = grid;
    c.alpha_ = std::move(alpha);
    c.residual_inf_ = residual_inf;
    c.bins_ = alpha_bins(grid, c.alpha_);
    return c;
}

std::complex<double> InterpolantCoeffs::span_coeff(const Spectrum& spectrum,
                                                   std::span<const int> k) const {
    long long flat = 0, parity = 0;
    int N = grid_.N;
    for (int ka : k) {
        flat = flat * N + ((ka % N) + N) % N;
        parity += ka;
    }
    double g = spectrum.coeff(k);
    double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    double scale = std::pow(static_cast<double>(N), 0.5 * grid_.d);
    return sign * scale * g * bins_[flat];
}

InterpolantCoeffs solve_dense(const KernelSpec& kernel, const Grid& grid,
                              const Eigen::VectorXd& y, long long dense_limit) {
    if (y.size() != grid.n) throw std::invalid_argument("solve_dense: y has wrong length");
    Eigen::MatrixXd K = kernel_matrix(kernel, grid, dense_limit);  // throws on singular
    // LDLT handles the (rare) indefinite wrapped-Gaussian case; one step of
    // iterative refinement removes the pivot-growth residual near singularity
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    Eigen::VectorXd alpha = ldlt.solve(y);
    alpha += ldlt.solve(y - K * alpha);
    double resid = (K * alpha - y).lpNorm<Eigen::Infinity>();
    double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
    if (!(resid <= 1e-8 * scale))
        throw SingularKernelError("solve_dense: interpolation residual " + std::to_string(resid) +
                                  " exceeds tolerance");
    return InterpolantCoeffs::from_alpha(grid, std::move(alpha), resid);
}

InterpolantCoeffs solve_fft(const Spectrum& spectrum, int N, const Eigen::VectorXd& y) {
    Grid grid = Grid::make(N, spectrum.dim());
    if (y.size() != grid.n) throw std::invalid_argument("solve_fft: y has wrong length");
    EigenStructure es = eigenstructure(spectrum, N);
    double lmax = 0.0;
    for (double l : es.lambdas()) lmax = std::max(lmax, std::abs(l));
    for (double l : es.lambdas())
        if (std::abs(l) <= 1e-12 * lmax)
            throw DegenerateClassError("solve_fft: zero eigenvalue class, kernel matrix singular");

    // alpha = U diag(1/lambda) U^H y; U^H y is the backward transform, U the
    // forward one, jointly scaled by 1/n
    std::vector<std::complex<double>> z(grid.n);
    for (long long p = 0; p < grid.n; ++p) z[p] = y(p);
    detail::fft(z, std::vector<int>(grid.d, grid.N), +1);
    for (long long c = 0; c < grid.n; ++c) z[c] /= es.lambda(c);
    detail::fft(z, std::vector<int>(grid.d, grid.N), -1);
    Eigen::VectorXd alpha(grid.n);
    for (long long p = 0; p < grid.n; ++p) alpha(p) = z[p].real() / static_cast<double>(grid.n);
    return InterpolantCoeffs::from_alpha(grid, std::move(alpha), 0.0);
}

NoiselessMse mse_noiseless(const InterpolantCoeffs& coeffs, const Spectrum& spectrum,
                           const TargetSpec& target, int probe_cutoff) {
    const Grid& g = coeffs.grid();
    if (target.dim() != g.d) throw std::invalid_argument("mse_noiseless: dimension mismatch");
    int probe = probe_cutoff > 0 ? probe_cutoff : spectrum.cutoff();
    if (probe > spectrum.cutoff())
        throw std::invalid_argument("mse_noiseless: probe_cutoff beyond the spectrum window");

    // sum over the probe window of |B[k] - V[k]|^2
    double total = 0.0;
    std::vector<int> k(g.d, -probe);
    while (true) {
        std::complex<double> b = coeffs.span_coeff(spectrum, k);
        auto it = target.coeffs().find(k);
        if (it != target.coeffs().end()) b -= it->second;
        total += std::norm(b);
        int a = g.d - 1;
        for (; a >= 0; --a) {
            if (++k[a] <= probe) break;
            k[a] = -probe;
        }
        if (a < 0) break;
    }
    // target mass outside the probe window (finitely supported)
    for (const auto& [kk, v] : target.coeffs()) {
        int kinf = 0;
        for (int ka : kk) kinf = std::max(kinf, std::abs(ka));
        if (kinf > probe) total += std::norm(v);
    }

    NoiselessMse r;
    r.value = total;
    // |B[k]| <= N^{d/2} max|bin| |G[k]|: the neglected span energy is bounded
    // by the squared spectral tail
    double maxbin = 0.0;
    for (long long c = 0; c < g.n; ++c) maxbin = std::max(maxbin, std::abs(coeffs.dft_bin(c)));
    double amp = std::pow(static_cast<double>(g.N), 0.5 * g.d) * maxbin;
    double tail1 = spectrum.truncation_bound().value_or(0.0);
    r.tail_bound = amp * amp * tail1 * spectrum.max_abs_coeff() + 1e-15;
    return r;
}

double noisy_error_deterministic(const Spectrum& spectrum, int N, double sigma2,
                                 long long dense_limit) {
    if (sigma2 < 0) throw std::invalid_argument("noisy_error_deterministic: sigma2 >= 0");
    if (sigma2 == 0) return 0.0;
    Grid grid = Grid::make(N, spectrum.dim());
    Eigen::MatrixXd K = kernel_matrix(spectrum.kernel(), grid, dense_limit);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    HopTable hop = spectrum.hop_table(N);
    EigenStructure es = eigenstructure(spectrum, N);
    double nd = std::pow(static_cast<double>(N), grid.d);
    double total = 0.0;
    for (long long c = 0; c < grid.n; ++c) {
        Eigen::VectorXcd u = es.dft_vector(c);
        // u^H K^{-2} u = ||K^{-1} u||^2
        Eigen::VectorXcd w = lu.solve(u);
        total += hop.l2sq(c) * w.squaredNorm() * nd;
    }
    return sigma2 * total;
}

MonteCarloResult mse_monte_carlo(const Spectrum& spectrum, int N, const TargetSpec& target,
                                 double sigma2, int trials, std::uint64_t seed, NoiseKind noise,
                                 int probe_cutoff) {
    if (trials < 100) throw std::invalid_argument("mse_monte_carlo: trials must be >= 100");
    Grid grid = Grid::make(N, spectrum.dim());
    Eigen::MatrixXd K = kernel_matrix(spectrum.kernel(), grid);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    std::vector<double> y0 = evaluate_on_grid(target, grid);
    double sd = std::sqrt(sigma2);

    // compensated accumulation keeps the reduction order-independent in
    // spirit; trials are sequential and seeded individually
    double mean_acc = 0.0, comp = 0.0, sq_acc = 0.0;
    std::vector<double> vals(trials);
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(splitmix64(seed ^ (0x51ed2701ULL + static_cast<std::uint64_t>(t))));
        Eigen::VectorXd y(grid.n);
        if (sigma2 == 0) {
            for (long long p = 0; p < grid.n; ++p) y(p) = y0[p];
        } else if (noise == NoiseKind::gaussian) {
            std::normal_distribution<double> dist(0.0, sd);
            for (long long p = 0; p < grid.n; ++p) y(p) = y0[p] + dist(rng);
        } else {
            std::bernoulli_distribution dist(0.5);
            for (long long p = 0; p < grid.n; ++p) y(p) = y0[p] + (dist(rng) ? sd : -sd);
        }
        Eigen::VectorXd alpha = ldlt.solve(y);
        auto coeffs = InterpolantCoeffs::from_alpha(grid, std::move(alpha), 0.0);
        double v = mse_noiseless(coeffs, spectrum, target, probe_cutoff).value;
        vals[t] = v;
        double u = v - comp;
        double s = mean_acc + u;
        comp = (s - mean_acc) - u;
        mean_acc = s;
    }
    MonteCarloResult r;
    r.trials = trials;
    r.mean = mean_acc / trials;
    for (double v : vals) sq_acc += (v - r.mean) * (v - r.mean);
    r.std_error = trials > 1 ? std::sqrt(sq_acc / (static_cast<double>(trials) - 1) / trials) : 0.0;
    return r;
}

}  // namespace gridkr
