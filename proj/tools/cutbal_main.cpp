// Command-line front end: run scenarios, check matrices, drive the property
// suites, list the catalogue. Exit codes: 0 success, 1 operational error,
// 2 theory-violation (or failed balance check / failed suite).

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cutbal/cutbal.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cut-balanced consensus simulator and verifier"};
    app.require_subcommand(1);

    cutbal::RunOptions run_opt;
    std::string config_flag;
    CLI::App* run = app.add_subcommand("run", "integrate a scenario and write its analysis");
    run->add_option("ref", run_opt.ref, "config file path or catalogue entry name");
    run->add_option("--config", config_flag, "config file path (alternative to the positional)");
    run->add_option("--out", run_opt.out_dir, "output directory (default .)");
    int stride_flag = 0;
    double tol_flag = 0.0;
    CLI::Option* stride_opt = run->add_option("--stride", stride_flag, "sampling stride override");
    CLI::Option* tol_opt = run->add_option("--tol", tol_flag, "tolerance override");

    std::string matrix_path;
    double k_flag = 0.0;
    CLI::App* check = app.add_subcommand("check", "verify cut-balance of a matrix file");
    check->add_option("matrix", matrix_path, "whitespace-separated square matrix file")
        ->required();
    CLI::Option* k_opt = check->add_option("--k", k_flag, "verify at this bound (default: minimal)");

    std::string suite_name;
    long long trials = -1;
    std::uint64_t seed = 20260814ULL;
    CLI::App* suite = app.add_subcommand("suite", "run a property suite");
    suite->add_option("name", suite_name, "lemma1, theorem1, theorem2, or appendix")->required();
    suite->add_option("--trials", trials, "trial count (suite default)")
        ->check(CLI::NonNegativeNumber);
    suite->add_option("--seed", seed, "base seed (each trial derives its own stream)");

    CLI::App* catalog = app.add_subcommand("catalog", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            if (run_opt.ref.empty()) run_opt.ref = config_flag;
            if (run_opt.ref.empty())
                throw cutbal::SchemaError("run: pass a config path or catalogue name");
            if (*stride_opt) run_opt.stride = stride_flag;
            if (*tol_opt) run_opt.tol = tol_flag;
            return cutbal::cmd_run(run_opt);
        }
        if (check->parsed()) {
            std::optional<double> k;
            if (*k_opt) k = k_flag;
            return cutbal::cmd_check(matrix_path, k);
        }
        if (suite->parsed()) {
            if (trials < 0) {
                if (suite_name == "lemma1") trials = 10000;
                else if (suite_name == "appendix") trials = 100000;
                else trials = 100;
            }
            return cutbal::cmd_suite(suite_name, trials, seed);
        }
        if (catalog->parsed()) return cutbal::cmd_catalog();
    } catch (const cutbal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
