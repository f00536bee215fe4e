#include "gridkr/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridkr/grid.hpp"

namespace gridkr {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::satisfied: return "SATISFIED";
        case Verdict::violated: return "VIOLATED";
        case Verdict::inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

bool AssumptionReport::all_satisfied() const {
    return scale.verdict == Verdict::satisfied && tail.verdict == Verdict::satisfied &&
           head.verdict == Verdict::satisfied;
}

namespace {

double window_abs_sum(const Spectrum& s) {
    int d = s.dim(), c = s.cutoff();
    if (d == 1) {
        double acc = 0;
        for (int k = -c; k <= c; ++k) acc += std::abs(s.coeff1(k));
        return acc;
    }
    std::vector<int> k(d, -c);
    double acc = 0;
    while (true) {
        acc += std::abs(s.coeff(k));
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++k[a] <= c) break;
            k[a] = -c;
        }
        if (a < 0) break;
    }
    return acc;
}

double percentile95(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t rank = static_cast<size_t>(std::ceil(0.95 * v.size()));
    return v[std::min(v.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace

ScaleSection check_scale(const Spectrum& spectrum) {
    ScaleSection s;
    s.window_sum = window_abs_sum(spectrum);
    s.tail_bound = spectrum.truncation_bound();
    if (!s.tail_bound) {
        s.verdict = Verdict::inconclusive;
        return s;
    }
    bool finite = std::isfinite(s.window_sum) && std::isfinite(*s.tail_bound);
    s.verdict = (finite && *s.tail_bound < 0.01 * s.window_sum) ? Verdict::satisfied
                                                                : Verdict::violated;
    return s;
}

TailSection check_tail(const KernelSpec& kernel, const std::vector<int>& ladder, int k_max) {
    if (k_max < 3) throw std::invalid_argument("check_tail: k_max must be >= 3");
    if (ladder.empty()) throw std::invalid_argument("check_tail: empty ladder");
    double M = kernel.bandwidth();
    for (int mp : ladder)
        if (mp < M || mp > 8 * M + 1e-9)
            throw std::invalid_argument("check_tail: ladder must lie within [M, 8M]");
    int d = kernel.dim();
    int top = *std::max_element(ladder.begin(), ladder.end());
    int cutoff = top * (k_max + 1) + top + 2;
    Spectrum spec = build_spectrum(kernel, cutoff);
    double zf = 1e-12 * std::max(1e-300, spec.max_abs_coeff());

    // nonzero k >= 0 with |k|_inf <= k_max
    std::vector<std::vector<int>> kvecs;
    {
        std::vector<int> k(d, 0);
        while (true) {
            if (*std::max_element(k.begin(), k.end()) >= 1) kvecs.push_back(k);
            int a = d - 1;
            for (; a >= 0; --a) {
                if (++k[a] <= k_max) break;
                k[a] = 0;
            }
            if (a < 0) break;
        }
    }

    TailSection t;
    t.k_max = k_max;
    t.noise_floor = zf;
    std::vector<int> sorted_ladder = ladder;
    std::sort(sorted_ladder.begin(), sorted_ladder.end());
    double envelope = 0.0;
    for (int mp : sorted_ladder) {
        std::vector<double> cs;
        long long hard = 0, total = 0;
        std::vector<int> p(d, 0), idx(d);
        while (true) {
            ++total;
            double gp = std::abs(spec.coeff(p));
            double c = 0.0;
            bool is_hard = false;
            for (const auto& k : kvecs) {
                double prod = 1.0;
                bool in_window = true;
                for (int a = 0; a < d; ++a) {
                    idx[a] = mp * k[a] + p[a];
                    if (idx[a] > cutoff) in_window = false;
                    prod *= 1.0 + static_cast<double>(k[a]) * k[a];
                }
                if (!in_window) continue;
                double gn = std::abs(spec.coeff(idx));
                if (gn <= zf && gp <= zf) continue;  // vacuous
                if (gp <= zf) {
                    is_hard = true;  // alias alive above a dead base index
                    break;
                }
                c = std::max(c, gn * prod / gp);
            }
            if (is_hard)
                ++hard;
            else
                cs.push_back(c);
            int a = d - 1;
            for (; a >= 0; --a) {
                if (++p[a] <= mp) break;
                p[a] = 0;
            }
            if (a < 0) break;
        }
        TailRung rung;
        rung.m_prime = mp;
        rung.c95 = percentile95(cs);
        rung.cmax = cs.empty() ? 0.0 : *std::max_element(cs.begin(), cs.end());
        rung.exception_fraction = static_cast<double>(hard) / static_cast<double>(total);
        envelope = std::max(envelope, rung.cmax);
        t.rungs.push_back(rung);
    }

    t.c1_fitted = std::max(t.rungs.back().c95, 1e-12);
    t.c1_envelope = envelope;

    // SATISFIED: exception fractions non-increasing along the ladder, or below
    // 5% at the top rung
    bool monotone = true;
    for (size_t i = 1; i < t.rungs.size(); ++i)
        if (t.rungs[i].exception_fraction > t.rungs[i - 1].exception_fraction + 1e-12)
            monotone = false;
    double top_frac = t.rungs.back().exception_fraction;
    t.verdict = (top_frac <= 0.05 && (monotone || top_frac <= 0.05)) ? Verdict::satisfied
                                                                     : Verdict::violated;
    if (top_frac > 0.05) t.verdict = Verdict::violated;
    return t;
}

HeadSection check_head(KernelFamily family, int d, const std::vector<int>& bandwidth_ladder) {
    if (bandwidth_ladder.size() < 4)
        throw std::invalid_argument("check_head: ladder must cover at least 4 bandwidths");
    HeadSection best;
    best.verdict = Verdict::violated;
    const double c3_cap = 1e6;

    // spectra per ladder bandwidth (witness indexes stay small)
    std::vector<Spectrum> specs;
    int maxM = *std::max_element(bandwidth_ladder.begin(), bandwidth_ladder.end());
    for (int M : bandwidth_ladder) {
        KernelSpec k = family == KernelFamily::dirichlet ? KernelSpec::dirichlet(M, d)
                       : family == KernelFamily::gaussian
                           ? KernelSpec::gaussian(static_cast<double>(M), d)
                           : KernelSpec::laplace(static_cast<double>(M), d);
        specs.push_back(build_spectrum(k, 9 + maxM + 2));
    }
    KernelSpec base = family == KernelFamily::dirichlet ? KernelSpec::dirichlet(1, d)
                      : family == KernelFamily::gaussian ? KernelSpec::gaussian(1.0, d)
                                                         : KernelSpec::laplace(1.0, d);
    Spectrum base_spec = build_spectrum(base, 16);

    std::vector<std::vector<int>> masks;
    {
        std::vector<int> m(d, 0);
        while (true) {
            if (std::any_of(m.begin(), m.end(), [](int x) { return x != 0; })) masks.push_back(m);
            int a = d - 1;
            for (; a >= 0; --a) {
                if (++m[a] <= 1) break;
                m[a] = 0;
            }
            if (a < 0) break;
        }
    }

    for (int istar = 0; istar <= 8; ++istar) {
        std::vector<int> pstar(d, 0);
        pstar[0] = istar;
        if (std::abs(base_spec.coeff(pstar)) <= 1e-14) continue;  // need |G0[i*]| > 0
        for (const auto& mask : masks) {
            double c3 = 0.0, c3s = 0.0;
            bool ok = true;
            for (size_t mi = 0; mi < specs.size() && ok; ++mi) {
                int M = bandwidth_ladder[mi];
                double gp = std::abs(specs[mi].coeff(pstar));
                if (gp <= 1e-300) {
                    ok = false;
                    break;
                }
                std::vector<int> idx(d);
                for (int mp = 1; mp <= M; ++mp) {
                    for (int a = 0; a < d; ++a) idx[a] = pstar[a] + mp * mask[a];
                    double gd = std::abs(specs[mi].coeff(idx));
                    if (gd <= 1e-300 || gp / gd > c3_cap) {
                        ok = false;
                        break;
                    }
                    c3 = std::max(c3, gp / gd);
                    if (mp < M) c3s = std::max(c3s, gp / gd);
                }
            }
            if (ok && (best.verdict == Verdict::violated || c3 < best.c3_fitted)) {
                best.c3_fitted = c3;
                best.c3_strict = c3s;
                best.istar = istar;
                best.mask = mask;
                best.c2 = *std::min_element(bandwidth_ladder.begin(), bandwidth_ladder.end());
                best.verdict = Verdict::satisfied;
            }
        }
    }
    return best;
}

AssumptionReport certify(const KernelSpec& kernel) {
    AssumptionReport r;
    r.family = kernel.family();
    r.bandwidth = kernel.bandwidth();
    r.d = kernel.dim();
    int M = std::max(1, static_cast<int>(std::ceil(kernel.bandwidth())));
    // the 1% tail rule needs K ~ 100 M for quadratically decaying spectra
    Spectrum s = build_spectrum(kernel, std::max(default_cutoff(kernel, 1), 128 * M));
    r.scale = check_scale(s);
    if (kernel.family() == KernelFamily::tabulated) {
        // no closed family to scan across bandwidths
        r.tail.verdict = Verdict::inconclusive;
        r.head.verdict = Verdict::inconclusive;
        return r;
    }
    r.tail = check_tail(kernel, {M, 2 * M, 4 * M, 8 * M}, 4);
    r.head = check_head(kernel.family(), kernel.dim(), {4, 8, 16, 32});
    return r;
}

LowerBounds lower_bounds(const AssumptionReport& report, const Spectrum& spectrum, int N,
                         double sigma2) {
    LowerBounds b;
    b.apx_bound = 1.0 / (2.0 * M_PI * (1.0 + report.head.c3_fitted));
    if (sigma2 <= 0) return b;
    HopTable hop = spectrum.hop_table(N);
    double c1 = report.tail.c1_fitted;
    double fourd = std::pow(4.0, spectrum.dim());
    long long qualifying = 0;
    Grid g = Grid::make(N, spectrum.dim());
    for (long long cls = 0; cls < hop.size(); ++cls) {
        // Delta_p = ||G_p||_1 - |G[p]| with p the class representative
        auto p = g.unflatten(cls);
        double gp = std::abs(spectrum.coeff(p));
        double delta = hop.l1(cls) - gp;
        if (delta <= fourd * c1 * gp + 1e-15) ++qualifying;
    }
    b.qualifying_fraction = static_cast<double>(qualifying) / static_cast<double>(hop.size());
    b.noisy_bound = sigma2 * b.qualifying_fraction / (2.0 * (1.0 + fourd * c1));
    return b;
}

}  // namespace gridkr
