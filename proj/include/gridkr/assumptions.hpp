#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridkr/spectrum.hpp"

namespace gridkr {

enum class Verdict { satisfied, violated, inconclusive };
std::string verdict_name(Verdict v);

/// One rung of the spectral-tail ladder: the 95th-percentile and maximal
/// per-index constants, and the fraction of indices where no finite constant
/// exists (hard violations: G[p] = 0 with a nonzero alias).
struct TailRung {
    int m_prime = 0;
    double c95 = 0.0;
    double cmax = 0.0;
    double exception_fraction = 0.0;
};

struct ScaleSection {
    double window_sum = 0.0;
    std::optional<double> tail_bound;
    Verdict verdict = Verdict::inconclusive;
};

struct TailSection {
    std::vector<TailRung> rungs;
    int k_max = 0;
    /// 95th-percentile constant at the top of the ladder (the asymptotic
    /// proxy), clamped to >= 1e-12.
    double c1_fitted = 0.0;
    /// Max per-index constant over the whole scan (the uniform envelope).
    double c1_envelope = 0.0;
    double noise_floor = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

struct HeadSection {
    double c3_fitted = 0.0;      // closed range M' <= M
    double c3_strict = 0.0;      // strict range M' < M
    int istar = -1;
    std::vector<int> mask;       // m* (all ones pattern of the witness shift)
    double c2 = 0.0;             // smallest ladder bandwidth at which the bound holds
    Verdict verdict = Verdict::inconclusive;
};

struct AssumptionReport {
    KernelFamily family{};
    double bandwidth = 0.0;
    int d = 0;
    ScaleSection scale;
    TailSection tail;
    HeadSection head;
    bool all_satisfied() const;
};

/// Summability of the spectrum: window sum plus analytic tail; SATISFIED when
/// the tail is below 1% of the window sum, INCONCLUSIVE without a tail bound
/// (tabulated profiles).
ScaleSection check_scale(const Spectrum& spectrum);

/// Fits the quadratic-decay aliasing constants |G[M'k + p]| <= C1 |G[p]| /
/// prod(1 + k_i^2) over the ladder of resolutions M'. Indices with G[p] = 0
/// and a nonzero alias admit no constant and count as exceptions.
TailSection check_tail(const KernelSpec& kernel, const std::vector<int>& ladder, int k_max);

/// Fits the head comparability constant |G[p*]| <= C3 |G[p* + M' m*]| across
/// a bandwidth ladder, searching the witness p* in {0..8} e1 and the shift
/// mask m* over nonzero binary vectors.
HeadSection check_head(KernelFamily family, int d, const std::vector<int>& bandwidth_ladder);

/// Full certification with default ladders: tail over {M, 2M, 4M, 8M},
/// head over {4, 8, 16, 32}.
AssumptionReport certify(const KernelSpec& kernel);

struct LowerBounds {
    double noisy_bound = 0.0;       // sigma^2 qfrac / (2 (1 + 4^d C1))
    double apx_bound = 0.0;         // 1 / (2 pi (1 + C3))
    double qualifying_fraction = 0.0;
};

/// Theorem-style floors. The noisy bound sums the per-class guarantee over
/// classes whose alias surplus Delta_p = ||G_p||_1 - |G[p]| stays within
/// 4^d C1 |G[p]|; the approximation bound is the Case-1 constant from the
/// fitted head constant.
LowerBounds lower_bounds(const AssumptionReport& report, const Spectrum& spectrum, int N,
                         double sigma2);

}  // namespace gridkr
