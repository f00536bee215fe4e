#include <CLI11.hpp>
#include <iostream>

#include "gridkr/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gridkr: exact MSE of kernel ridgeless interpolation on torus grids"};
    app.require_subcommand(1);

    using namespace gridkr::cli;

    SpectrumArgs sp;
    auto* spectrum = app.add_subcommand("spectrum", "dump Fourier coefficients and hop statistics");
    spectrum->add_option("--family", sp.family, "gaussian|laplace|dirichlet|tabulated")->required();
    spectrum->add_option("--M", sp.M, "bandwidth (Dirichlet: integer order)");
    spectrum->add_option("--d", sp.d, "dimension");
    spectrum->add_option("--cutoff", sp.cutoff, "window cutoff (0: default)");
    int sp_N = 0;
    spectrum->add_option("--N", sp_N, "emit hop statistics for this resolution");
    spectrum->add_option("--profile", sp.profile_path, "tabulated profile file");

    MseArgs ms;
    auto* mse = app.add_subcommand("mse", "closed-form MSE report as CSV");
    mse->add_option("--family", ms.family)->required();
    mse->add_option("--M", ms.M);
    mse->add_option("--d", ms.d);
    mse->add_option("--N", ms.N)->required();
    mse->add_option("--sigma2", ms.sigma2);
    mse->add_option("--target", ms.target, "battery id: zero|dc|cos1|cosn|pair|mixed");
    mse->add_flag("--verify", ms.verify, "append oracle columns and a max-discrepancy line");
    mse->add_option("--profile", ms.profile_path);

    std::string sweep_config_path;
    auto* sweep = app.add_subcommand("sweep", "batch experiment runner from a config file");
    sweep->add_option("config", sweep_config_path, "key = value config file")->required();

    AssumeArgs as;
    auto* assume = app.add_subcommand("assume", "certify the spectral assumptions");
    assume->add_option("--family", as.families, "repeatable; default: all three named families");
    assume->add_option("--M", as.M);
    assume->add_option("--d", as.d);
    assume->add_option("--csv", as.csv_path, "also write CSV rows here");
    assume->add_option("--profile", as.profile_path);

    VerifyArgs vf;
    auto* verify = app.add_subcommand("verify", "cross-check closed forms against the oracles");
    verify->add_option("--family", vf.family)->required();
    verify->add_option("--M", vf.M);
    verify->add_option("--d", vf.d);
    verify->add_option("--N", vf.N);
    verify->add_option("--sigma2", vf.sigma2);
    verify->add_option("--trials", vf.trials, "Monte Carlo trials (0: skip)");
    verify->add_option("--seed", vf.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    if (spectrum->parsed()) {
        if (sp_N > 0) sp.N = sp_N;
        return cmd_spectrum(sp, std::cout, std::cerr);
    }
    if (mse->parsed()) return cmd_mse(ms, std::cout, std::cerr);
    if (sweep->parsed()) {
        try {
            auto cfg = parse_sweep_config_file(sweep_config_path);
            return cmd_sweep(cfg, std::cout, std::cerr);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_usage;
        }
    }
    if (assume->parsed()) return cmd_assume(as, std::cout, std::cerr);
    if (verify->parsed()) return cmd_verify(vf, std::cout, std::cerr);
    return exit_usage;
}
