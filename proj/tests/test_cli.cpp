#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridkr/cli.hpp"

using namespace gridkr::cli;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("spectrum dump: dirichlet window and laplace hop partition") {
    SpectrumArgs a;
    a.family = "dirichlet";
    a.M = 3;
    a.cutoff = 10;
    std::ostringstream out, err;
    CHECK(cmd_spectrum(a, out, err) == exit_ok);
    int ones = 0;
    for (const auto& l : lines_of(out.str()))
        if (l.size() > 2 && l.substr(l.find(',') + 1) == "1") ++ones;
    CHECK(ones == 7);

    SpectrumArgs b;
    b.family = "laplace";
    b.M = 1;
    b.N = 8;
    std::ostringstream out2, err2;
    CHECK(cmd_spectrum(b, out2, err2) == exit_ok);
    double l1sum = 0;
    bool in_hops = false;
    for (const auto& l : lines_of(out2.str())) {
        if (l.rfind("class,", 0) == 0) {
            in_hops = true;
            continue;
        }
        if (!in_hops || l.empty() || l[0] == '#') continue;
        auto p1 = l.find(','), p2 = l.find(',', p1 + 1);
        l1sum += std::stod(l.substr(p1 + 1, p2 - p1 - 1));
    }
    CHECK(l1sum == doctest::Approx(1.0).epsilon(1e-9));  // classes split g(0)
}

TEST_CASE("spectrum: asymmetric tabulated profile exits with usage code") {
    std::string path = "cli_tab_asym.txt";
    {
        std::ofstream f(path);
        f << "0 1.0\n0.4 0.9\n0.8 0.6\n1.4 0.3\n2.2 0.1\n-0.4 0.7\n";
    }
    SpectrumArgs a;
    a.family = "tabulated";
    a.profile_path = path;
    std::ostringstream out, err;
    CHECK(cmd_spectrum(a, out, err) == exit_usage);
    CHECK(err.str().find("evenness") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("mse command: schema, dirichlet exact point, zero rows") {
    MseArgs a;
    a.family = "dirichlet";
    a.M = 3;
    a.N = 4;
    a.sigma2 = 1.0;
    a.target = "zero";
    std::ostringstream out, err;
    CHECK(cmd_mse(a, out, err) == exit_ok);
    auto ls = lines_of(out.str());
    CHECK(ls[0] == "family,d,N,M,sigma2,target,class,apx,free,noisy,total");
    // totals row: class 0 carries 0.25, classes 1..3 carry 0.125: total 0.625
    bool found_total = false;
    for (const auto& l : ls)
        if (l.find(",total,") != std::string::npos) {
            found_total = true;
            CHECK(l.find(",0.625") != std::string::npos);
        }
    CHECK(found_total);

    MseArgs z = a;
    z.sigma2 = 0.0;
    std::ostringstream out2, err2;
    CHECK(cmd_mse(z, out2, err2) == exit_ok);
    // every numeric cell of the zero-target zero-noise report is zero
    for (const auto& l : lines_of(out2.str())) {
        if (l.empty() || l[0] == '#' || l.rfind("family", 0) == 0) continue;
        std::istringstream cells(l);
        std::string cell;
        int idx = 0;
        while (std::getline(cells, cell, ',')) {
            if (idx >= 7) CHECK(std::stod(cell) == 0.0);
            ++idx;
        }
    }
}

TEST_CASE("mse --verify appends oracle columns with small discrepancy") {
    MseArgs a;
    a.family = "laplace";
    a.M = 1;
    a.N = 8;
    a.sigma2 = 1.0;
    a.target = "cos1";
    a.verify = true;
    std::ostringstream out, err;
    CHECK(cmd_mse(a, out, err) == exit_ok);
    CHECK(out.str().find(",oracle,discrepancy") != std::string::npos);
    auto pos = out.str().find("max_discrepancy=");
    REQUIRE(pos != std::string::npos);
    double disc = std::stod(out.str().substr(pos + 16));
    CHECK(disc <= 1e-7);
}

TEST_CASE("mse command maps degenerate classes to the numerical exit code") {
    MseArgs a;
    a.family = "dirichlet";
    a.M = 1;
    a.N = 8;
    a.sigma2 = 1.0;
    std::ostringstream out, err;
    CHECK(cmd_mse(a, out, err) == exit_numeric);
    CHECK(err.str().find("singular") != std::string::npos);
}

TEST_CASE("sweep config grammar and validation") {
    std::istringstream cfg(
        "# demo\n"
        "family = laplace\n"
        "d = 1\n"
        "N = 8\nN = 16\n"
        "M = 1\nM = sqrt_n\n"
        "sigma2 = 1.0\n"
        "target = zero\n"
        "output = out.csv\n");
    auto c = parse_sweep_config(cfg);
    CHECK(c.families.size() == 1);
    CHECK(c.resolutions.size() == 2);
    CHECK(c.bandwidths.size() == 2);
    CHECK(c.bandwidths[1].str() == "sqrt_n");
    CHECK(c.bandwidths[1].evaluate(16) == doctest::Approx(4.0));
    c.validate();

    std::istringstream bad("family = laplace\nwhat = 3\n");
    CHECK_THROWS_AS(parse_sweep_config(bad), std::invalid_argument);

    SweepConfig empty_n;
    empty_n.families = {"laplace"};
    empty_n.dims = {1};
    empty_n.bandwidths = {BandwidthRule::parse("1")};
    empty_n.sigma2s = {1.0};
    empty_n.targets = {"zero"};
    empty_n.output = "x.csv";
    CHECK_THROWS_AS(empty_n.validate(), std::invalid_argument);
}

TEST_CASE("bandwidth rules evaluate the documented schedules") {
    CHECK(BandwidthRule::parse("2.5").evaluate(64) == doctest::Approx(2.5));
    CHECK(BandwidthRule::parse("sqrt_n").evaluate(64) == doctest::Approx(8.0));
    CHECK(BandwidthRule::parse("n").evaluate(64) == doctest::Approx(64.0));
    CHECK(BandwidthRule::parse("n^1.5").evaluate(64) == doctest::Approx(512.0));
    CHECK_THROWS_AS(BandwidthRule::parse("frog"), std::invalid_argument);
    CHECK_THROWS_AS(BandwidthRule::parse("-1"), std::invalid_argument);
}

TEST_CASE("sweep runs, reports the plateau, and is byte-reproducible") {
    SweepConfig c;
    c.families = {"laplace"};
    c.dims = {1};
    c.resolutions = {8, 16, 32, 64};
    c.bandwidths = {BandwidthRule::parse("1")};
    c.sigma2s = {1.0};
    c.targets = {"zero"};
    c.output = "sweep_test_a.csv";
    {
        std::ostringstream out, err;
        CHECK(cmd_sweep(c, out, err) == exit_ok);
        auto pos = out.str().find("min_total=");
        REQUIRE(pos != std::string::npos);
        CHECK(std::stod(out.str().substr(pos + 10)) >= 0.05);  // inconsistency plateau
    }
    c.output = "sweep_test_b.csv";
    {
        std::ostringstream out, err;
        CHECK(cmd_sweep(c, out, err) == exit_ok);
    }
    auto a = read_file("sweep_test_a.csv");
    auto b = read_file("sweep_test_b.csv");
    CHECK(a == b);
    CHECK(lines_of(a)[0] == "family,d,N,M_rule,M,sigma2,target,apx,free,noisy,total,verdict");
    std::remove("sweep_test_a.csv");
    std::remove("sweep_test_b.csv");
}

TEST_CASE("sweep keeps going after partial failures") {
    SweepConfig c;
    c.families = {"dirichlet"};
    c.dims = {1};
    c.resolutions = {4, 16};  // N=16 with M=1 is singular
    c.bandwidths = {BandwidthRule::parse("2")};
    c.sigma2s = {1.0};
    c.targets = {"zero"};
    c.output = "sweep_partial.csv";
    std::ostringstream out, err;
    CHECK(cmd_sweep(c, out, err) == exit_ok);
    auto text = read_file("sweep_partial.csv");
    CHECK(text.find("ERROR") != std::string::npos);
    CHECK(text.find("OK") != std::string::npos);
    std::remove("sweep_partial.csv");
}

TEST_CASE("assume: named families satisfied, tabulated inconclusive") {
    AssumeArgs a;
    a.M = 2;
    a.d = 1;
    std::ostringstream out, err;
    CHECK(cmd_assume(a, out, err) == exit_ok);
    CHECK(out.str().find("SATISFIED") != std::string::npos);
    CHECK(out.str().find("VIOLATED") == std::string::npos);

    std::string path = "cli_tab_ok.txt";
    {
        std::ofstream f(path);
        f << "0 1.0\n0.5 0.9\n1.0 0.7\n1.6 0.4\n2.2 0.2\n2.8 0.1\n3.14159265 0.05\n";
    }
    AssumeArgs t;
    t.families = {"tabulated"};
    t.profile_path = path;
    std::ostringstream out2, err2;
    CHECK(cmd_assume(t, out2, err2) == exit_inconclusive);
    std::remove(path.c_str());
}

TEST_CASE("verify command cross-checks the oracles") {
    VerifyArgs v;
    v.family = "laplace";
    v.M = 1;
    v.N = 8;
    v.sigma2 = 1.0;
    std::ostringstream out, err;
    CHECK(cmd_verify(v, out, err) == exit_ok);
    CHECK(out.str().find("FAIL") == std::string::npos);
}
