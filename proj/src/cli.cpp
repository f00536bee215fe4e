#include "gridkr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "gridkr/assumptions.hpp"
#include "gridkr/errors.hpp"
#include "gridkr/model.hpp"
#include "gridkr/mse.hpp"
#include "gridkr/oracle.hpp"

namespace gridkr::cli {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

KernelSpec make_kernel(const std::string& family, double M, int d,
                       const std::string& profile_path) {
    KernelFamily f = family_from_name(family);
    switch (f) {
        case KernelFamily::gaussian: return KernelSpec::gaussian(M, d);
        case KernelFamily::laplace: return KernelSpec::laplace(M, d);
        case KernelFamily::dirichlet: {
            double r = std::round(M);
            if (std::abs(M - r) > 1e-9)
                throw std::invalid_argument("dirichlet bandwidth must be a non-negative integer");
            return KernelSpec::dirichlet(static_cast<int>(r), d);
        }
        case KernelFamily::tabulated:
            if (profile_path.empty())
                throw std::invalid_argument("tabulated kernel requires --profile <file>");
            if (d != 1) throw std::invalid_argument("tabulated kernels support d = 1 only");
            return KernelSpec::tabulated_from_file(profile_path, M);
    }
    throw std::invalid_argument("bad family");
}

std::string class_string(const Grid& g, long long flat) {
    auto p = g.unflatten(flat);
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) s += (i ? ":" : "") + std::to_string(p[i]);
    return s;
}

int map_exception(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return exit_usage;
    return exit_numeric;
}

}  // namespace

// ---------------------------------------------------------------------------
// bandwidth rules and sweep config

double BandwidthRule::evaluate(int N) const {
    switch (kind) {
        case Kind::fixed: return value;
        case Kind::sqrt_n: return std::sqrt(static_cast<double>(N));
        case Kind::linear_n: return static_cast<double>(N);
        case Kind::n_pow_15: return std::pow(static_cast<double>(N), 1.5);
    }
    return value;
}

std::string BandwidthRule::str() const {
    switch (kind) {
        case Kind::fixed: return fmt17(value);
        case Kind::sqrt_n: return "sqrt_n";
        case Kind::linear_n: return "n";
        case Kind::n_pow_15: return "n^1.5";
    }
    return "?";
}

BandwidthRule BandwidthRule::parse(const std::string& text) {
    BandwidthRule r;
    if (text == "sqrt_n" || text == "sqrt(n)") {
        r.kind = Kind::sqrt_n;
    } else if (text == "n") {
        r.kind = Kind::linear_n;
    } else if (text == "n^1.5" || text == "n1.5") {
        r.kind = Kind::n_pow_15;
    } else {
        size_t pos = 0;
        r.value = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("bad bandwidth rule: " + text);
        if (!(r.value > 0)) throw std::invalid_argument("bandwidth must be positive: " + text);
    }
    return r;
}

void SweepConfig::validate() const {
    if (families.empty()) throw std::invalid_argument("sweep config: no `family` entries");
    if (resolutions.empty()) throw std::invalid_argument("sweep config: empty N list");
    if (dims.empty()) throw std::invalid_argument("sweep config: no `d` entries");
    if (bandwidths.empty()) throw std::invalid_argument("sweep config: no `M` entries");
    if (sigma2s.empty()) throw std::invalid_argument("sweep config: no `sigma2` entries");
    if (targets.empty()) throw std::invalid_argument("sweep config: no `target` entries");
    if (output.empty()) throw std::invalid_argument("sweep config: no `output` path");
    for (int n : resolutions)
        if (n < 2) throw std::invalid_argument("sweep config: all N must be >= 2");
    for (double s : sigma2s)
        if (s < 0) throw std::invalid_argument("sweep config: sigma2 must be >= 0");
    for (const auto& f : families) family_from_name(f);
    for (const auto& t : targets) TargetSpec::battery(t, 1);
    if (verify != "none" && verify != "oracle" && verify != "mc")
        throw std::invalid_argument("sweep config: verify must be none|oracle|mc");
    if (verify == "mc" && trials < 100)
        throw std::invalid_argument("sweep config: verify = mc needs trials >= 100");
    if (threads < 1) throw std::invalid_argument("sweep config: threads must be >= 1");
}

SweepConfig parse_sweep_config(std::istream& in) {
    SweepConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r\n");
            if (a == std::string::npos) return std::string();
            size_t b = s.find_last_not_of(" \t\r\n");
            return s.substr(a, b - a + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("sweep config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key == "family")
            c.families.push_back(value);
        else if (key == "d")
            c.dims.push_back(std::stoi(value));
        else if (key == "N")
            c.resolutions.push_back(std::stoi(value));
        else if (key == "M")
            c.bandwidths.push_back(BandwidthRule::parse(value));
        else if (key == "sigma2")
            c.sigma2s.push_back(std::stod(value));
        else if (key == "target")
            c.targets.push_back(value);
        else if (key == "trials")
            c.trials = std::stoi(value);
        else if (key == "seed")
            c.seed = std::stoull(value);
        else if (key == "verify")
            c.verify = value;
        else if (key == "output")
            c.output = value;
        else if (key == "threads")
            c.threads = std::stoi(value);
        else
            throw std::invalid_argument("sweep config line " + std::to_string(lineno) +
                                        ": unknown key `" + key + "`");
    }
    return c;
}

SweepConfig parse_sweep_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open sweep config: " + path);
    return parse_sweep_config(in);
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const SpectrumArgs& args, std::ostream& out, std::ostream& err) {
    try {
        KernelSpec kernel = make_kernel(args.family, args.M, args.d, args.profile_path);
        int cutoff = args.cutoff > 0 ? args.cutoff : default_cutoff(kernel, args.N.value_or(1));
        if (args.N && cutoff < *args.N) cutoff = default_cutoff(kernel, *args.N);
        Spectrum s = build_spectrum(kernel, cutoff);
        out << "# family=" << family_name(kernel.family()) << " M=" << fmt17(kernel.bandwidth())
            << " d=" << kernel.dim() << " cutoff=" << s.cutoff();
        if (s.truncation_bound())
            out << " truncation_bound=" << fmt17(*s.truncation_bound());
        else
            out << " truncation_bound=unavailable";
        out << "\n";
        if (kernel.dim() == 1) {
            out << "k,G\n";
            for (int k = -s.cutoff(); k <= s.cutoff(); ++k)
                out << k << "," << fmt17(s.coeff1(k)) << "\n";
        } else {
            out << "k,G\n";
            int c = s.cutoff();
            std::vector<int> k(kernel.dim(), -c);
            while (true) {
                std::string ks;
                for (size_t i = 0; i < k.size(); ++i) ks += (i ? ":" : "") + std::to_string(k[i]);
                out << ks << "," << fmt17(s.coeff(k)) << "\n";
                int a = kernel.dim() - 1;
                for (; a >= 0; --a) {
                    if (++k[a] <= c) break;
                    k[a] = -c;
                }
                if (a < 0) break;
            }
        }
        if (args.N) {
            HopTable hop = s.hop_table(*args.N);
            Grid g = Grid::make(*args.N, kernel.dim());
            out << "class,l1,l2sq,signed_sum,interval\n";
            for (long long cls = 0; cls < hop.size(); ++cls)
                out << class_string(g, cls) << "," << fmt17(hop.l1(cls)) << ","
                    << fmt17(hop.l2sq(cls)) << "," << fmt17(hop.signed_sum(cls)) << ","
                    << fmt17(hop.interval()) << "\n";
        }
        return exit_ok;
    } catch (const std::exception& e) {
        return map_exception(e, err);
    }
}

// ---------------------------------------------------------------------------
// mse

int cmd_mse(const MseArgs& args, std::ostream& out, std::ostream& err) {
    try {
        KernelSpec kernel = make_kernel(args.family, args.M, args.d, args.profile_path);
        TargetSpec target = TargetSpec::battery(args.target, args.d);
        int cutoff = default_cutoff(kernel, args.N);
        if (args.verify && args.d == 1) cutoff = std::max(cutoff, 1024);  // oracle probe window
        Spectrum s = build_spectrum(kernel, cutoff);
        MseReport rep = full_mse(s, args.N, target, args.sigma2, args.target);
        Grid g = Grid::make(args.N, args.d);

        double oracle_free_apx = 0.0, oracle_noisy = 0.0;
        std::vector<double> oracle_noisy_cls;
        if (args.verify) {
            Eigen::MatrixXd K = kernel_matrix(kernel, g);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
            HopTable hop = s.hop_table(args.N);
            EigenStructure es = eigenstructure(s, args.N);
            double nd = std::pow(static_cast<double>(args.N), args.d);
            oracle_noisy_cls.assign(g.n, 0.0);
            for (long long c = 0; c < g.n; ++c) {
                Eigen::VectorXcd u = es.dft_vector(c);
                Eigen::VectorXcd w = lu.solve(u);
                oracle_noisy_cls[c] = args.sigma2 * hop.l2sq(c) * w.squaredNorm() * nd;
                oracle_noisy += oracle_noisy_cls[c];
            }
            std::vector<double> yv = evaluate_on_grid(target, g);
            Eigen::VectorXd y2(g.n);
            for (long long p = 0; p < g.n; ++p) y2(p) = yv[p];
            auto coeffs = solve_dense(kernel, g, y2);
            oracle_free_apx = mse_noiseless(coeffs, s, target).value;
        }

        out << "family,d,N,M,sigma2,target,class,apx,free,noisy,total";
        if (args.verify) out << ",oracle,discrepancy";
        out << "\n";
        auto row_prefix = [&](const std::string& cls) {
            out << family_name(kernel.family()) << "," << args.d << "," << args.N << ","
                << fmt17(kernel.bandwidth()) << "," << fmt17(args.sigma2) << "," << args.target
                << "," << cls << ",";
        };
        for (long long c = 0; c < g.n; ++c) {
            row_prefix(class_string(g, c));
            double tot = rep.apx[c] + rep.free[c] + rep.noisy[c];
            out << fmt17(rep.apx[c]) << "," << fmt17(rep.free[c]) << "," << fmt17(rep.noisy[c])
                << "," << fmt17(tot);
            if (args.verify)
                out << "," << fmt17(oracle_noisy_cls[c]) << ","
                    << fmt17(std::abs(rep.noisy[c] - oracle_noisy_cls[c]));
            out << "\n";
        }
        row_prefix("total");
        out << fmt17(rep.apx_total) << "," << fmt17(rep.free_total) << ","
            << fmt17(rep.noisy_total) << "," << fmt17(rep.total);
        if (args.verify) {
            double d1 = std::abs(rep.apx_total + rep.free_total - oracle_free_apx);
            double d2 = std::abs(rep.noisy_total - oracle_noisy);
            out << "," << fmt17(oracle_free_apx + oracle_noisy) << "," << fmt17(std::max(d1, d2));
            out << "\n# oracle_noiseless=" << fmt17(oracle_free_apx)
                << " oracle_noisy=" << fmt17(oracle_noisy)
                << " max_discrepancy=" << fmt17(std::max(d1, d2));
        }
        out << "\n# tolerance=" << fmt17(rep.tolerance) << " cond=" << fmt17(rep.cond_estimate)
            << " interval=" << fmt17(rep.trunc_interval) << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        return map_exception(e, err);
    }
}

// ---------------------------------------------------------------------------
// sweep

namespace {

struct SweepPoint {
    std::string family;
    int d, N;
    BandwidthRule rule;
    double sigma2;
    std::string target;
};

struct SweepRow {
    SweepPoint pt;
    double M = 0;
    double apx = 0, free = 0, noisy = 0, total = 0;
    bool ok = false;
    std::string error;
};

SweepRow run_point(const SweepPoint& pt) {
    SweepRow row;
    row.pt = pt;
    row.M = pt.rule.evaluate(pt.N);
    try {
        KernelSpec kernel = make_kernel(pt.family, row.M, pt.d, "");
        if (kernel.family() == KernelFamily::dirichlet) row.M = kernel.bandwidth();
        TargetSpec target = TargetSpec::battery(pt.target, pt.d);
        Spectrum s = build_spectrum(kernel, default_cutoff(kernel, pt.N));
        MseReport rep = full_mse(s, pt.N, target, pt.sigma2, pt.target);
        row.apx = rep.apx_total;
        row.free = rep.free_total;
        row.noisy = rep.noisy_total;
        row.total = rep.total;
        row.ok = true;
    } catch (const std::invalid_argument& e) {
        // dirichlet with a non-integer rule value: retry on the rounded order
        try {
            double rM = std::round(row.M);
            KernelSpec kernel = make_kernel(pt.family, rM, pt.d, "");
            row.M = rM;
            TargetSpec target = TargetSpec::battery(pt.target, pt.d);
            Spectrum s = build_spectrum(kernel, default_cutoff(kernel, pt.N));
            MseReport rep = full_mse(s, pt.N, target, pt.sigma2, pt.target);
            row.apx = rep.apx_total;
            row.free = rep.free_total;
            row.noisy = rep.noisy_total;
            row.total = rep.total;
            row.ok = true;
        } catch (const std::exception& e2) {
            row.error = e2.what();
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace

int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();

        std::string path = config.output;
        if (const char* dir = std::getenv("GRIDKR_OUT_DIR");
            dir && *dir && !path.empty() && path[0] != '/')
            path = std::string(dir) + "/" + path;

        std::vector<SweepPoint> points;
        for (const auto& fam : config.families)
            for (int d : config.dims)
                for (const auto& rule : config.bandwidths)
                    for (double s2 : config.sigma2s)
                        for (const auto& tg : config.targets)
                            for (int N : config.resolutions)
                                points.push_back({fam, d, N, rule, s2, tg});

        std::vector<SweepRow> rows(points.size());
        if (config.threads <= 1) {
            for (size_t i = 0; i < points.size(); ++i) rows[i] = run_point(points[i]);
        } else {
            // worker pool over grid points; rows land in config order
            std::atomic<size_t> next{0};
            auto work = [&]() {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= points.size()) return;
                    rows[i] = run_point(points[i]);
                }
            };
            std::vector<std::future<void>> pool;
            for (int t = 0; t < config.threads; ++t)
                pool.push_back(std::async(std::launch::async, work));
            for (auto& f : pool) f.get();
        }

        std::ofstream file(path);
        if (!file) throw std::invalid_argument("cannot open output file: " + path);
        file << "family,d,N,M_rule,M,sigma2,target,apx,free,noisy,total,verdict\n";
        for (const auto& r : rows) {
            file << r.pt.family << "," << r.pt.d << "," << r.pt.N << "," << r.pt.rule.str() << ","
                 << fmt17(r.M) << "," << fmt17(r.pt.sigma2) << "," << r.pt.target << ",";
            if (r.ok)
                file << fmt17(r.apx) << "," << fmt17(r.free) << "," << fmt17(r.noisy) << ","
                     << fmt17(r.total) << ",OK\n";
            else
                file << ",,,,ERROR: " << sanitize_csv(r.error) << "\n";
        }
        file.close();

        // inconsistency summary: min over N of the total per configuration
        std::map<std::string, double> plateau;
        for (const auto& r : rows) {
            if (!r.ok) continue;
            std::string key = r.pt.family + " d=" + std::to_string(r.pt.d) +
                              " M=" + r.pt.rule.str() + " sigma2=" + fmt17(r.pt.sigma2) +
                              " target=" + r.pt.target;
            auto it = plateau.find(key);
            if (it == plateau.end() || r.total < it->second) plateau[key] = r.total;
        }
        out << "# sweep: " << rows.size() << " grid points -> " << path << "\n";
        out << "# min-over-N of E_total per configuration:\n";
        for (const auto& [key, v] : plateau) out << key << " min_total=" << fmt17(v) << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        return map_exception(e, err);
    }
}

// ---------------------------------------------------------------------------
// assume

int cmd_assume(const AssumeArgs& args, std::ostream& out, std::ostream& err) {
    try {
        std::vector<std::string> fams = args.families;
        if (fams.empty()) fams = {"gaussian", "laplace", "dirichlet"};
        bool any_inconclusive = false, any_violated = false;
        std::ostringstream csv;
        csv << "family,d,M,assumption,verdict,constant,witness\n";
        for (const auto& fam : fams) {
            KernelSpec kernel = make_kernel(fam, args.M, args.d, args.profile_path);
            AssumptionReport rep = certify(kernel);
            out << "family=" << family_name(rep.family) << " d=" << rep.d
                << " M=" << fmt17(rep.bandwidth) << "\n";
            out << "  scale: " << verdict_name(rep.scale.verdict)
                << "  window_sum=" << fmt17(rep.scale.window_sum) << "  tail_bound="
                << (rep.scale.tail_bound ? fmt17(*rep.scale.tail_bound) : std::string("n/a"))
                << "\n";
            out << "  tail:  " << verdict_name(rep.tail.verdict)
                << "  C1_fitted=" << fmt17(rep.tail.c1_fitted)
                << "  C1_envelope=" << fmt17(rep.tail.c1_envelope) << "  k_max=" << rep.tail.k_max
                << "\n";
            for (const auto& rung : rep.tail.rungs)
                out << "    M'=" << rung.m_prime << " c95=" << fmt17(rung.c95)
                    << " cmax=" << fmt17(rung.cmax)
                    << " exception_fraction=" << fmt17(rung.exception_fraction) << "\n";
            out << "  head:  " << verdict_name(rep.head.verdict)
                << "  C3=" << fmt17(rep.head.c3_fitted)
                << "  C3_strict=" << fmt17(rep.head.c3_strict) << "  i*=" << rep.head.istar;
            if (rep.d > 1) {
                out << " m*=(";
                for (size_t i = 0; i < rep.head.mask.size(); ++i)
                    out << (i ? "," : "") << rep.head.mask[i];
                out << ")";
            }
            out << "  C2=" << fmt17(rep.head.c2) << "\n";

            auto status = [&](Verdict v) {
                if (v == Verdict::inconclusive) any_inconclusive = true;
                if (v == Verdict::violated) any_violated = true;
            };
            status(rep.scale.verdict);
            status(rep.tail.verdict);
            status(rep.head.verdict);

            std::string pre = family_name(rep.family) + "," + std::to_string(rep.d) + "," +
                              fmt17(rep.bandwidth) + ",";
            csv << pre << "scale," << verdict_name(rep.scale.verdict) << ","
                << fmt17(rep.scale.window_sum) << ",\n";
            csv << pre << "tail," << verdict_name(rep.tail.verdict) << ","
                << fmt17(rep.tail.c1_fitted) << ",\n";
            csv << pre << "head," << verdict_name(rep.head.verdict) << ","
                << fmt17(rep.head.c3_fitted) << ",i*=" << rep.head.istar << "\n";
        }
        if (!args.csv_path.empty()) {
            std::ofstream f(args.csv_path);
            if (!f) throw std::invalid_argument("cannot open csv output: " + args.csv_path);
            f << csv.str();
        }
        if (any_inconclusive) return exit_inconclusive;
        if (any_violated) return exit_numeric;
        return exit_ok;
    } catch (const std::exception& e) {
        return map_exception(e, err);
    }
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
    try {
        KernelSpec kernel = make_kernel(args.family, args.M, args.d, "");
        Grid g = Grid::make(args.N, args.d);
        int cutoff = default_cutoff(kernel, args.N);
        if (args.d == 1) cutoff = std::max(cutoff, 1024);  // oracle probe window
        Spectrum s = build_spectrum(kernel, cutoff);
        HopTable hop = s.hop_table(args.N);
        bool ok = true;

        // dense vs fft solves on the seeded random battery
        std::mt19937_64 rng(args.seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            Eigen::VectorXd y(g.n);
            for (long long p = 0; p < g.n; ++p) y(p) = dist(rng);
            auto a1 = solve_dense(kernel, g, y);
            auto a2 = solve_fft(s, args.N, y);
            double rel = (a1.alpha() - a2.alpha()).norm() / std::max(1e-300, a1.alpha().norm());
            worst = std::max(worst, rel);
        }
        out << "dense_vs_fft max_rel=" << fmt17(worst) << (worst <= 1e-10 ? " OK" : " FAIL")
            << "\n";
        ok = ok && worst <= 1e-10;

        // closed form vs oracles on the battery; the gate widens by the
        // oracle's own reported probe tail
        double worst_free = 0.0, worst_noisy = 0.0, tail = 0.0;
        double oracle_noisy = noisy_error_deterministic(s, args.N, args.sigma2);
        for (const auto& id : TargetSpec::battery_ids()) {
            TargetSpec target = TargetSpec::battery(id, args.d);
            MseReport rep = full_mse(s, hop, target, args.sigma2, id);
            auto yv = evaluate_on_grid(target, g);
            Eigen::VectorXd y(g.n);
            for (long long p = 0; p < g.n; ++p) y(p) = yv[p];
            auto coeffs = solve_dense(kernel, g, y);
            auto noiseless = mse_noiseless(coeffs, s, target);
            tail = std::max(tail, noiseless.tail_bound);
            worst_free =
                std::max(worst_free, std::abs(rep.apx_total + rep.free_total - noiseless.value));
            worst_noisy = std::max(worst_noisy, std::abs(rep.noisy_total - oracle_noisy));
        }
        double free_gate = 1e-7 + tail;
        out << "closed_vs_noiseless_oracle max_abs=" << fmt17(worst_free)
            << " gate=" << fmt17(free_gate) << (worst_free <= free_gate ? " OK" : " FAIL") << "\n";
        out << "closed_vs_kinv2_oracle max_abs=" << fmt17(worst_noisy)
            << (worst_noisy <= 1e-7 ? " OK" : " FAIL") << "\n";
        ok = ok && worst_free <= free_gate && worst_noisy <= 1e-7;

        if (args.trials >= 100) {
            TargetSpec target = TargetSpec::battery("cos1", args.d);
            MseReport rep = full_mse(s, hop, target, args.sigma2, "cos1");
            auto mc = mse_monte_carlo(s, args.N, target, args.sigma2, args.trials, args.seed);
            double dev = std::abs(mc.mean - rep.total);
            bool mc_ok = dev <= 3.0 * std::max(mc.std_error, 1e-12) || dev <= 1e-9;
            out << "monte_carlo mean=" << fmt17(mc.mean) << " se=" << fmt17(mc.std_error)
                << " closed=" << fmt17(rep.total) << (mc_ok ? " OK" : " FAIL") << "\n";
            ok = ok && mc_ok;
        }
        return ok ? exit_ok : exit_numeric;
    } catch (const std::exception& e) {
        return map_exception(e, err);
    }
}

}  // namespace gridkr::cli
