#include <doctest.h>

#include <cmath>

#include "gridkr/errors.hpp"
#include "gridkr/mse.hpp"
#include "gridkr/oracle.hpp"

using namespace gridkr;

namespace {

Spectrum spec_for(const KernelSpec& k, int N, int min_cutoff = 0) {
    return build_spectrum(k, std::max(default_cutoff(k, N), min_cutoff));
}

double noiseless_oracle(const KernelSpec& kernel, const Spectrum& s, int N,
                        const TargetSpec& target) {
    Grid g = Grid::make(N, kernel.dim());
    auto yv = evaluate_on_grid(target, g);
    Eigen::VectorXd y(g.n);
    for (long long p = 0; p < g.n; ++p) y(p) = yv[p];
    auto coeffs = solve_dense(kernel, g, y);
    return mse_noiseless(coeffs, s, target).value;
}

}  // namespace

TEST_CASE("dirichlet exact point M=3 N=4 sigma2=1") {
    auto s = spec_for(KernelSpec::dirichlet(3, 1), 4);
    auto r = noisy_error(s, 4, 1.0);
    // class 0 holds the lone alias {0}; classes 1..3 hold two unit aliases
    CHECK(r.per_class[0] == doctest::Approx(0.25).epsilon(1e-12));
    for (int c : {1, 2, 3}) CHECK(r.per_class[c] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(r.total ==
          doctest::Approx(noisy_error_deterministic(s, 4, 1.0)).epsilon(1e-11));
}

TEST_CASE("in-span targets have zero approximation and noise-free error") {
    auto s = spec_for(KernelSpec::dirichlet(1, 1), 8);
    auto t = TargetSpec::battery("cosn", 1);
    CHECK(approximation_error(s, 8, t).total == doctest::Approx(0.0));
    // the matrix is singular here (dead classes), so interpolation-dependent
    // terms must refuse
    CHECK_THROWS_AS(noise_free_error(s, 8, t), DegenerateClassError);
    auto s2 = spec_for(KernelSpec::dirichlet(4, 1), 8);
    CHECK(noise_free_error(s2, 8, t).total == doctest::Approx(0.0));
}

TEST_CASE("single frequency with no alias in band: zero noise-free error") {
    auto s = spec_for(KernelSpec::dirichlet(4, 1), 8);
    TargetSpec t(1);
    t.add_conjugate_pair({1}, 0.5);
    CHECK(noise_free_error(s, 8, t).total == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("approximation error ignores sigma and scales quadratically") {
    auto s = spec_for(KernelSpec::laplace(1.0, 1), 8);
    auto t = TargetSpec::battery("mixed", 1);
    auto a = approximation_error(s, 8, t);
    TargetSpec t2(1);
    for (const auto& [k, v] : t.coeffs()) t2.set(k, 3.0 * v);
    auto a2 = approximation_error(s, 8, t2);
    CHECK(a2.total == doctest::Approx(9.0 * a.total).epsilon(1e-12));
    auto f = noise_free_error(s, 8, t);
    auto f2 = noise_free_error(s, 8, t2);
    CHECK(f2.total == doctest::Approx(9.0 * f.total).epsilon(1e-12));
}

TEST_CASE("noisy error is linear in sigma2 and target-free") {
    auto s = spec_for(KernelSpec::laplace(1.0, 1), 8);
    CHECK(noisy_error(s, 8, 0.0).total == 0.0);
    auto r1 = noisy_error(s, 8, 1.0);
    auto r2 = noisy_error(s, 8, 2.0);
    CHECK(r2.total == doctest::Approx(2.0 * r1.total).epsilon(1e-14));
}

TEST_CASE("per-class locality: touching one class leaves others unchanged") {
    auto s = spec_for(KernelSpec::laplace(1.0, 1), 8);
    TargetSpec t(1);
    t.add_conjugate_pair({1}, 0.5);
    auto base = full_mse(s, 8, t, 0.0);
    TargetSpec t2 = t;
    t2.add_conjugate_pair({2}, 0.25);  // classes 2 and 6
    auto mod = full_mse(s, 8, t2, 0.0);
    for (int c : {0, 1, 3, 4, 5, 7}) {
        CHECK(mod.apx[c] == doctest::Approx(base.apx[c]).epsilon(1e-14));
        CHECK(mod.free[c] == doctest::Approx(base.free[c]).epsilon(1e-14));
    }
    CHECK(mod.apx[2] != base.apx[2]);
}

TEST_CASE("report assembly: totals match the component operations") {
    auto s = spec_for(KernelSpec::gaussian(2.0, 1), 8);
    auto t = TargetSpec::battery("pair", 1);
    auto rep = full_mse(s, 8, t, 1.5, "pair");
    CHECK(rep.apx_total == doctest::Approx(approximation_error(s, 8, t).total).epsilon(1e-13));
    CHECK(rep.free_total == doctest::Approx(noise_free_error(s, 8, t).total).epsilon(1e-13));
    CHECK(rep.noisy_total == doctest::Approx(noisy_error(s, 8, 1.5).total).epsilon(1e-13));
    CHECK(rep.total == doctest::Approx(rep.apx_total + rep.free_total + rep.noisy_total));
    for (long long c = 0; c < 8; ++c) {
        CHECK(rep.apx[c] >= -1e-12);
        CHECK(rep.free[c] >= -1e-12);
        CHECK(rep.noisy[c] >= -1e-12);
    }
    CHECK(rep.tolerance > 0.0);
    CHECK(rep.cond_estimate >= 1.0);
}

TEST_CASE("zero target zero noise: all-zero report") {
    auto s = spec_for(KernelSpec::laplace(1.0, 1), 8);
    auto rep = full_mse(s, 8, TargetSpec::battery("zero", 1), 0.0, "zero");
    CHECK(rep.total == 0.0);
    for (long long c = 0; c < 8; ++c) {
        CHECK(rep.apx[c] == 0.0);
        CHECK(rep.free[c] == 0.0);
        CHECK(rep.noisy[c] == 0.0);
    }
}

TEST_CASE("closed form matches the noiseless oracle across parities") {
    for (auto kernel : {KernelSpec::laplace(1.0, 1), KernelSpec::gaussian(2.0, 1),
                        KernelSpec::gaussian(1.0, 1), KernelSpec::dirichlet(3, 1)}) {
        for (int N : {4, 5, 7, 8}) {
            if (kernel.family() == KernelFamily::dirichlet && N > 7) continue;
            auto s = spec_for(kernel, N, 1024);
            for (const auto& id : {"cos1", "pair", "mixed"}) {
                auto t = TargetSpec::battery(id, 1);
                auto rep = full_mse(s, N, t, 0.0, id);
                double oracle = noiseless_oracle(kernel, s, N, t);
                CAPTURE(family_name(kernel.family()));
                CAPTURE(N);
                CAPTURE(id);
                CHECK(std::abs(rep.apx_total + rep.free_total - oracle) < 1e-8);
            }
        }
    }
}

TEST_CASE("closed form matches the noiseless oracle at d=2") {
    struct Cfg {
        KernelSpec kernel;
        int N;
        double tol;
    };
    std::vector<Cfg> cfgs = {{KernelSpec::gaussian(2.0, 2), 4, 1e-8},
                             {KernelSpec::gaussian(2.0, 2), 3, 1e-8},
                             {KernelSpec::laplace(1.0, 2), 4, 1e-7},
                             {KernelSpec::dirichlet(2, 2), 4, 1e-9}};
    for (const auto& cfg : cfgs) {
        auto s = spec_for(cfg.kernel, cfg.N);
        for (const auto& id : {"cos1", "mixed"}) {
            auto t = TargetSpec::battery(id, 2);
            auto rep = full_mse(s, cfg.N, t, 0.0, id);
            double oracle = noiseless_oracle(cfg.kernel, s, cfg.N, t);
            CAPTURE(family_name(cfg.kernel.family()));
            CAPTURE(cfg.N);
            CAPTURE(id);
            CHECK(std::abs(rep.apx_total + rep.free_total - oracle) < cfg.tol);
        }
    }
}

TEST_CASE("noisy closed form matches the K^-2 oracle") {
    for (auto kernel : {KernelSpec::laplace(1.0, 1), KernelSpec::gaussian(2.0, 1)}) {
        for (int N : {5, 8, 16}) {
            auto s = spec_for(kernel, N);
            CHECK(std::abs(noisy_error(s, N, 1.0).total -
                           noisy_error_deterministic(s, N, 1.0)) < 1e-9);
        }
    }
    auto s2 = spec_for(KernelSpec::laplace(1.0, 2), 4);
    CHECK(std::abs(noisy_error(s2, 4, 1.0).total - noisy_error_deterministic(s2, 4, 1.0)) <
          1e-8);
}

TEST_CASE("large-bandwidth witness keeps constant approximation error") {
    // M = 2N: the dc witness target stays far from the span
    auto s = spec_for(KernelSpec::gaussian(8.0, 1), 4);
    TargetSpec t(1);
    t.set({0}, 1.0 / std::sqrt(2.0));
    double apx = approximation_error(s, 4, t).total;
    CHECK(apx >= 1.0 / (2.0 * M_PI * (1.0 + 1.2841)));  // fitted head constant envelope
    CHECK(apx == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("degenerate classes are typed errors") {
    auto s = spec_for(KernelSpec::dirichlet(1, 1), 8);
    TargetSpec t(1);
    t.add_conjugate_pair({3}, 0.5);  // class with no band alias
    CHECK_THROWS_AS(approximation_error(s, 8, t), DegenerateClassError);
    CHECK_THROWS_AS(noisy_error(s, 8, 1.0), DegenerateClassError);
    CHECK_THROWS_AS(full_mse(s, 8, TargetSpec::battery("zero", 1), 1.0), DegenerateClassError);
}
