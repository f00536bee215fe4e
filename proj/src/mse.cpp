#include "gridkr/mse.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include "gridkr/errors.hpp"

namespace gridkr {

namespace {

// Per-class target data: A = sum |V|^2, T = sum twist G V, SV = sum twist V,
// where twist = ((-1)^N)^(sum m) accounts for the -pi grid offset.
struct ClassData {
    double A = 0.0;
    std::complex<double> T{0.0};
    std::complex<double> SV{0.0};
};

std::map<long long, ClassData> class_data(const Spectrum& spectrum, int N,
                                          const TargetSpec& target) {
    int d = spectrum.dim();
    if (target.dim() != d) throw std::invalid_argument("mse: target dimension mismatch");
    double s = (N % 2 == 0) ? 1.0 : -1.0;
    std::map<long long, ClassData> out;
    for (const auto& [k, v] : target.coeffs()) {
        long long flat = 0, msum = 0;
        for (int a = 0; a < d; ++a) {
            int cl = ((k[a] % N) + N) % N;
            flat = flat * N + cl;
            msum += (static_cast<long long>(k[a]) - cl) / N;
        }
        double twist = (s > 0 || msum % 2 == 0) ? 1.0 : -1.0;
        double g = spectrum.coeff(k);  // throws out_of_range beyond window
        ClassData& cd = out[flat];
        cd.A += std::norm(v);
        cd.T += twist * g * v;
        cd.SV += twist * v;
    }
    return out;
}

double degeneracy_floor(const Spectrum& spectrum) {
    return 1e-13 * std::max(1.0, spectrum.max_abs_coeff());
}

void require_invertible(const HopTable& hop, double floor) {
    for (long long c = 0; c < hop.size(); ++c)
        if (std::abs(hop.signed_sum(c)) <= floor)
            throw DegenerateClassError(
                "kernel matrix singular: hop class " + std::to_string(c) +
                " has zero aliased spectral mass (no interpolation possible)");
}

}  // namespace

PerClassError approximation_error(const Spectrum& spectrum, int N, const TargetSpec& target) {
    HopTable hop = spectrum.hop_table(N);
    auto data = class_data(spectrum, N, target);
    double floor = degeneracy_floor(spectrum);
    PerClassError r;
    r.per_class.assign(hop.size(), 0.0);
    for (const auto& [cls, cd] : data) {
        double l2 = hop.l2sq(cls);
        if (l2 <= floor * floor)
            throw DegenerateClassError("approximation_error: target touches class " +
                                       std::to_string(cls) + " with ||G_l|| = 0");
        r.per_class[cls] = cd.A - std::norm(cd.T) / l2;
        r.total += r.per_class[cls];
    }
    return r;
}

PerClassError noise_free_error(const Spectrum& spectrum, int N, const TargetSpec& target) {
    HopTable hop = spectrum.hop_table(N);
    double floor = degeneracy_floor(spectrum);
    require_invertible(hop, floor);
    auto data = class_data(spectrum, N, target);
    PerClassError r;
    r.per_class.assign(hop.size(), 0.0);
    for (const auto& [cls, cd] : data) {
        double l2 = hop.l2sq(cls), sg = hop.signed_sum(cls);
        std::complex<double> w = cd.T / l2;
        r.per_class[cls] = l2 * std::norm(cd.SV / sg - w);
        r.total += r.per_class[cls];
    }
    return r;
}

PerClassError noisy_error(const Spectrum& spectrum, int N, double sigma2) {
    if (sigma2 < 0) throw std::invalid_argument("noisy_error: sigma2 must be >= 0");
    HopTable hop = spectrum.hop_table(N);
    double floor = degeneracy_floor(spectrum);
    require_invertible(hop, floor);
    double nd = std::pow(static_cast<double>(N), spectrum.dim());
    PerClassError r;
    r.per_class.assign(hop.size(), 0.0);
    for (long long c = 0; c < hop.size(); ++c) {
        double sg = hop.signed_sum(c);
        r.per_class[c] = sigma2 * hop.l2sq(c) / (nd * sg * sg);
        r.total += r.per_class[c];
    }
    return r;
}

MseReport full_mse(const Spectrum& spectrum, const HopTable& hop, const TargetSpec& target,
                   double sigma2, const std::string& target_id) {
    if (sigma2 < 0) throw std::invalid_argument("full_mse: sigma2 must be >= 0");
    int N = hop.resolution();
    double floor = degeneracy_floor(spectrum);
    require_invertible(hop, floor);
    auto data = class_data(spectrum, N, target);
    double nd = std::pow(static_cast<double>(N), spectrum.dim());

    MseReport rep;
    rep.family = spectrum.kernel().family();
    rep.bandwidth = spectrum.kernel().bandwidth();
    rep.d = spectrum.dim();
    rep.N = N;
    rep.sigma2 = sigma2;
    rep.target_id = target_id;
    rep.apx.assign(hop.size(), 0.0);
    rep.free.assign(hop.size(), 0.0);
    rep.noisy.assign(hop.size(), 0.0);

    for (const auto& [cls, cd] : data) {
        double l2 = hop.l2sq(cls), sg = hop.signed_sum(cls);
        std::complex<double> w = cd.T / l2;
        rep.apx[cls] = cd.A - std::norm(cd.T) / l2;
        rep.free[cls] = l2 * std::norm(cd.SV / sg - w);
    }
    double lmax = 0.0, lmin = std::numeric_limits<double>::infinity();
    for (long long c = 0; c < hop.size(); ++c) {
        double sg = hop.signed_sum(c);
        rep.noisy[c] = sigma2 * hop.l2sq(c) / (nd * sg * sg);
        lmax = std::max(lmax, std::abs(sg));
        lmin = std::min(lmin, std::abs(sg));
    }
    for (long long c = 0; c < hop.size(); ++c) {
        rep.apx_total += rep.apx[c];
        rep.free_total += rep.free[c];
        rep.noisy_total += rep.noisy[c];
    }
    rep.total = rep.apx_total + rep.free_total + rep.noisy_total;
    rep.cond_estimate = lmax / lmin;
    rep.trunc_interval = hop.interval();
    rep.tolerance = rep.cond_estimate * std::max(rep.trunc_interval, 1e-15) * 10.0;
    return rep;
}

MseReport full_mse(const Spectrum& spectrum, int N, const TargetSpec& target, double sigma2,
                   const std::string& target_id) {
    HopTable hop = spectrum.hop_table(N);
    return full_mse(spectrum, hop, target, sigma2, target_id);
}

}  // namespace gridkr
