#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "gridkr/errors.hpp"
#include "gridkr/spectrum.hpp"

using namespace gridkr;

namespace {
double q1(const KernelSpec& k, int freq, int nodes) {
    return quadrature_coeff(k, std::vector<int>{freq}, nodes);
}
}  // namespace

TEST_CASE("dirichlet closed form is the band indicator") {
    auto k = KernelSpec::dirichlet(3, 1);
    CHECK(closed_form_coeff(k, 2) == 1.0);
    CHECK(closed_form_coeff(k, 5) == 0.0);
    CHECK(closed_form_coeff(k, -3) == 1.0);
    CHECK(closed_form_coeff(k, 4) == 0.0);
}

TEST_CASE("laplace dc coefficient matches (1 - e^-pi)/pi") {
    auto k = KernelSpec::laplace(1.0, 1);
    double expect = (1.0 - std::exp(-M_PI)) / M_PI;  // 0.30455446877969367
    CHECK(closed_form_coeff(k, 0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(std::abs(q1(k, 0, 1 << 16) - expect) < 1e-8);
}

TEST_CASE("closed form vs quadrature battery") {
    for (double M : {0.5, 1.0, 2.0, 8.0}) {
        auto k = KernelSpec::laplace(M, 1);
        int kmax = 4 * static_cast<int>(std::ceil(M)) + 8;
        for (int f = -kmax; f <= kmax; ++f) {
            double cf = closed_form_coeff(k, f);
            double tol = 1e-8 * std::max(1.0, std::abs(cf));
            CHECK(std::abs(cf - q1(k, f, 1 << 16)) < tol);
        }
    }
    for (int M : {1, 2, 8}) {
        auto k = KernelSpec::dirichlet(M, 1);
        int kmax = 4 * M + 8;
        for (int f = -kmax; f <= kmax; ++f)
            CHECK(std::abs(closed_form_coeff(k, f) - q1(k, f, 1 << 14)) < 1e-8);
    }
}

TEST_CASE("gaussian ratio law against quadrature, wrap-around documented") {
    for (double M : {1.0, 2.0, 4.0}) {
        auto k = KernelSpec::gaussian(M, 1);
        double g0 = q1(k, 0, 1 << 15);
        // closed_form_coeff anchors at the quadrature G[0]
        CHECK(closed_form_coeff(k, 0) == doctest::Approx(g0).epsilon(1e-9));
        double worst = 0.0;
        for (int f = 1; f <= 4 * static_cast<int>(M) + 8; ++f) {
            double ratio = q1(k, f, 1 << 15) / g0;
            worst = std::max(worst, std::abs(ratio - std::exp(-f * f / (4 * M * M))));
        }
        // the periodization leaves a boundary term of order e^{-M^2 pi^2}
        double floor = 2 * M * M * std::exp(-M * M * M_PI * M_PI) * (2 + 1 / (M * M * M_PI * M_PI));
        CHECK(worst <= 4 * floor + 1e-12);
        if (M >= 2) CHECK(worst < 1e-12);
        if (M == 1.0) CHECK(worst > 1e-6);  // the wrap error is real, not round-off
    }
}

TEST_CASE("quadrature preconditions and convergence check") {
    auto k = KernelSpec::laplace(1.0, 1);
    CHECK_THROWS_AS(q1(k, 10, 16), std::invalid_argument);  // nodes < 4(|k|+1)
    CHECK_THROWS_AS(quadrature_coeff_checked(k, std::vector<int>{0}, 64, 1e-18), ConvergenceError);
    CHECK(quadrature_coeff_checked(k, std::vector<int>{0}, 1 << 12, 1e-6) ==
          doctest::Approx(closed_form_coeff(k, 0)).epsilon(1e-6));
}

TEST_CASE("dirichlet quadrature hits the indicator exactly") {
    auto k = KernelSpec::dirichlet(2, 1);
    CHECK(std::abs(q1(k, 1, 4096) - 1.0) < 1e-9);
    CHECK(std::abs(q1(k, 3, 4096)) < 1e-9);
}

TEST_CASE("laplace d=2 dc coefficient sandwiched by the separable bounds") {
    auto k2 = KernelSpec::laplace(2.0, 2);
    auto k1 = KernelSpec::laplace(2.0, 1);
    double g2 = quadrature_coeff(k2, std::vector<int>{0, 0}, 512);
    double g1 = closed_form_coeff(k1, 0);
    CHECK(g2 >= g1 * g1 - 1e-9);  // product lower bound
    CHECK(g2 <= 1.0);             // dc coefficient of a profile <= 1
}

TEST_CASE("build_spectrum: dirichlet window counts") {
    auto s = build_spectrum(KernelSpec::dirichlet(3, 1), 10);
    int ones = 0, zeros = 0;
    for (int f = -10; f <= 10; ++f) {
        double v = s.coeff1(f);
        if (v == 1.0) ++ones;
        if (v == 0.0) ++zeros;
    }
    CHECK(ones == 7);
    CHECK(zeros == 14);
    CHECK(s.truncation_bound().value() == 0.0);
}

TEST_CASE("build_spectrum: separable gaussian d=2 products") {
    auto s2 = build_spectrum(KernelSpec::gaussian(1.0, 2), 4);
    auto s1 = build_spectrum(KernelSpec::gaussian(1.0, 1), 4);
    double g11 = s2.coeff(std::vector<int>{1, 1});
    CHECK(g11 == doctest::Approx(s1.coeff1(1) * s1.coeff1(1)).epsilon(1e-12));
    // separability against the full 2-d quadrature
    auto kq = KernelSpec::gaussian(1.0, 2);
    double q = quadrature_coeff(kq, std::vector<int>{1, 1}, 1024);
    CHECK(std::abs(q - g11) < 1e-7);
}

TEST_CASE("extension consistency: doubling the cutoff keeps stored coefficients") {
    for (auto kernel : {KernelSpec::laplace(1.0, 1), KernelSpec::gaussian(2.0, 1)}) {
        auto a = build_spectrum(kernel, 8);
        auto b = build_spectrum(kernel, 16);
        for (int f = -8; f <= 8; ++f) CHECK(std::abs(a.coeff1(f) - b.coeff1(f)) < 1e-9);
        CHECK(b.truncation_bound().value() <= a.truncation_bound().value() + 1e-15);
    }
}

TEST_CASE("evenness of stored windows") {
    for (auto kernel : {KernelSpec::gaussian(1.0, 1), KernelSpec::laplace(2.0, 1)}) {
        auto s = build_spectrum(kernel, 20);
        for (int f = 1; f <= 20; ++f) CHECK(std::abs(s.coeff1(f) - s.coeff1(-f)) <= 1e-12);
    }
    auto s2 = build_spectrum(KernelSpec::laplace(1.0, 2), 6);
    for (int a = -6; a <= 6; ++a)
        for (int b = -6; b <= 6; ++b) {
            double x = s2.coeff(std::vector<int>{a, b});
            double y = s2.coeff(std::vector<int>{-a, -b});
            CHECK(std::abs(x - y) <= 1e-12);
        }
}

TEST_CASE("hop statistics: dirichlet enumerations") {
    auto s = build_spectrum(KernelSpec::dirichlet(3, 1), 12);
    auto h1 = s.hop_stats(4, std::vector<int>{1});  // aliases {-3, 1}
    CHECK(h1.l1 == doctest::Approx(2.0));
    CHECK(h1.l2sq == doctest::Approx(2.0));
    auto h0 = s.hop_stats(8, std::vector<int>{0});  // only k = 0 survives
    CHECK(h0.l1 == doctest::Approx(1.0));
    CHECK(h0.l2sq == doctest::Approx(1.0));
}

TEST_CASE("hop class N=1 collects the whole spectral mass g(0)") {
    auto lap = build_spectrum(KernelSpec::laplace(1.0, 1), 8);
    auto h = lap.hop_stats(1, std::vector<int>{0});
    CHECK(h.l1 == doctest::Approx(1.0).epsilon(1e-10));  // sum G[k] = g(0) = 1
    auto dir = build_spectrum(KernelSpec::dirichlet(2, 1), 8);
    CHECK(dir.hop_stats(1, std::vector<int>{0}).l1 == doctest::Approx(5.0));
}

TEST_CASE("hop partition: classes split the full spectral mass") {
    for (int N : {4, 5, 8}) {
        auto s = build_spectrum(KernelSpec::laplace(1.0, 1), std::max(8, N));
        auto t = s.hop_table(N);
        double acc = 0;
        for (long long c = 0; c < t.size(); ++c) acc += t.signed_sum(c);
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-10));  // g(0) = 1
    }
}

TEST_CASE("hop sums match the independent circulant row transform") {
    // independent oracle: lambda_l / N^d = (1/N^d) sum_p g(M x_p) e^{-j 2pi <l,p>/N}
    auto row_dft = [](const KernelSpec& k, int N, int l) {
        double re = 0;
        for (int p = 0; p < N; ++p) {
            double th = wrap_angle(2.0 * M_PI * p / N);
            std::vector<double> d(k.dim(), 0.0);
            d[0] = th;
            re += k.value(d) * std::cos(2.0 * M_PI * l * p / N);
        }
        return re / N;
    };
    for (auto kernel : {KernelSpec::laplace(1.0, 1), KernelSpec::laplace(2.0, 1),
                        KernelSpec::gaussian(1.0, 1), KernelSpec::gaussian(2.0, 1)}) {
        for (int N : {4, 5, 8, 9}) {
            auto s = build_spectrum(kernel, default_cutoff(kernel, N));
            auto t = s.hop_table(N);
            for (int l = 0; l < N; ++l)
                CHECK(t.signed_sum(l) == doctest::Approx(row_dft(kernel, N, l)).epsilon(1e-11));
        }
    }
}

TEST_CASE("hop invariants: cauchy-schwarz and l1 dominance") {
    for (auto kernel : {KernelSpec::laplace(1.0, 1), KernelSpec::gaussian(1.0, 1)}) {
        auto s = build_spectrum(kernel, 32);
        auto t = s.hop_table(8);
        for (long long c = 0; c < t.size(); ++c) {
            CHECK(t.l1(c) >= 0.0);
            CHECK(t.l2sq(c) <= t.l1(c) * t.l1(c) + 1e-12);
            CHECK(t.l1(c) >= std::abs(s.coeff1(static_cast<int>(c))) - 1e-12);
            CHECK(t.l1(c) >= std::abs(t.signed_sum(c)) - 1e-12);
        }
    }
}

TEST_CASE("hop preconditions") {
    auto s = build_spectrum(KernelSpec::laplace(1.0, 1), 8);
    CHECK_THROWS_AS(s.hop_table(16), std::invalid_argument);  // cutoff < N
}

TEST_CASE("laplace d=2 spectrum: window and hop sums agree with dense structure") {
    auto s = build_spectrum(KernelSpec::laplace(1.0, 2), default_cutoff(KernelSpec::laplace(1.0, 2), 4));
    auto t = s.hop_table(4);
    // trace identity: sum over classes of signed sums = g(0) = 1
    double acc = 0;
    for (long long c = 0; c < t.size(); ++c) acc += t.signed_sum(c);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tabulated profiles: spline quadrature and symmetry rejection") {
    // g(t) = 1 + 0.5 cos t has G[0] = 1, G[1] = 0.25
    std::vector<double> th, va;
    for (int i = 0; i <= 400; ++i) {
        double t = M_PI * i / 400.0;
        th.push_back(t);
        va.push_back(1.0 + 0.5 * std::cos(t));
    }
    auto k = KernelSpec::tabulated(th, va);
    auto s = build_spectrum(k, 4);
    CHECK(s.coeff1(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.coeff1(1) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(!s.truncation_bound().has_value());
    CHECK_THROWS_AS(closed_form_coeff(k, 0), std::invalid_argument);

    std::string path = "tab_asym_test.txt";
    {
        std::ofstream f(path);
        f << "# test profile\n0 1.0\n0.5 0.8\n1.0 0.5\n2.0 0.2\n3.0 0.1\n-0.5 0.75\n";
    }
    CHECK_THROWS_WITH_AS(KernelSpec::tabulated_from_file(path),
                         doctest::Contains("evenness"), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("truncation bound dominates the measured remainder") {
    for (auto kernel : {KernelSpec::laplace(1.0, 1), KernelSpec::gaussian(1.0, 1)}) {
        auto narrow = build_spectrum(kernel, 16);
        auto wide = build_spectrum(kernel, 64);
        double outside = 0;
        for (int f = 17; f <= 64; ++f) outside += std::abs(wide.coeff1(f)) + std::abs(wide.coeff1(-f));
        CHECK(outside <= narrow.truncation_bound().value());
    }
}

TEST_CASE("invalid kernels are rejected") {
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::gaussian(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::dirichlet(-1, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_spectrum(KernelSpec::laplace(1.0, 4), 4), std::invalid_argument);
    CHECK_THROWS_AS(build_spectrum(KernelSpec::laplace(1.0, 1), 0), std::invalid_argument);
}
