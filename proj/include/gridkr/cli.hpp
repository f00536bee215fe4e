#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridkr/kernels.hpp"

namespace gridkr::cli {

// exit codes shared by all subcommands
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_inconclusive = 3;
inline constexpr int exit_numeric = 4;

/// Bandwidth schedule: a fixed value or a closed-form rule of N.
struct BandwidthRule {
    enum class Kind { fixed, sqrt_n, linear_n, n_pow_15 } kind = Kind::fixed;
    double value = 1.0;  // for fixed
    double evaluate(int N) const;
    std::string str() const;
    static BandwidthRule parse(const std::string& text);
};

struct SweepConfig {
    std::vector<std::string> families;
    std::vector<int> dims;
    std::vector<int> resolutions;       // N list
    std::vector<BandwidthRule> bandwidths;
    std::vector<double> sigma2s;
    std::vector<std::string> targets;
    int trials = 0;
    std::uint64_t seed = 1;
    std::string verify = "none";        // none | oracle | mc
    std::string output;
    int threads = 1;
    void validate() const;              // throws std::invalid_argument
};

/// Flat `key = value` text; repeated keys form lists; `#` starts a comment.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig parse_sweep_config_file(const std::string& path);

struct SpectrumArgs {
    std::string family;
    double M = 1.0;
    int d = 1;
    int cutoff = 0;                     // 0: default
    std::optional<int> N;               // hop statistics when given
    std::string profile_path;           // tabulated
};
int cmd_spectrum(const SpectrumArgs& args, std::ostream& out, std::ostream& err);

struct MseArgs {
    std::string family;
    double M = 1.0;
    int d = 1;
    int N = 8;
    double sigma2 = 0.0;
    std::string target = "zero";
    bool verify = false;
    std::string profile_path;
};
int cmd_mse(const MseArgs& args, std::ostream& out, std::ostream& err);

int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err);

struct AssumeArgs {
    std::vector<std::string> families;  // empty: all three named
    double M = 2.0;
    int d = 1;
    std::string csv_path;
    std::string profile_path;
};
int cmd_assume(const AssumeArgs& args, std::ostream& out, std::ostream& err);

struct VerifyArgs {
    std::string family;
    double M = 1.0;
    int d = 1;
    int N = 8;
    double sigma2 = 1.0;
    int trials = 0;                     // 0: skip Monte Carlo
    std::uint64_t seed = 20240817;
};
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

/// 17-significant-digit decimal formatting used in all CSV output.
std::string fmt17(double v);

}  // namespace gridkr::cli
