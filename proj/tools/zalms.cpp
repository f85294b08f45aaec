// Command-line front end: experiment orchestration and the closed-form
// verification suite.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 compute error,
// 3 verification failure.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zalms/zalms.hpp"

namespace {

struct RunArgs {
    std::string config_path;
    std::string out_dir = "zalms_out";
    std::uint64_t seed = 0;
    std::uint64_t runs = 0;
    std::uint64_t iters = 0;
    std::string models;
    bool no_mc = false;
    bool quiet = false;
    unsigned threads = 1;
    bool seed_set = false, runs_set = false, iters_set = false;
};

int do_run(const RunArgs& args) {
    zalms::ExperimentConfig cfg =
        args.config_path.empty() ? zalms::default_config() : zalms::load_config(args.config_path);

    if (args.seed_set) cfg.master_seed = args.seed;
    if (args.runs_set) {
        if (args.runs < 1) throw zalms::config_error("config: --runs must be >= 1");
        cfg.runs = args.runs;
    }
    if (args.iters_set) {
        if (args.iters < 1) throw zalms::config_error("config: --iters must be >= 1");
        cfg.iters = args.iters;
        for (const zalms::JointDumpSpec& d : cfg.joint_dumps)
            if (d.at_iter > cfg.iters)
                throw zalms::config_error("config: --iters " + std::to_string(cfg.iters) +
                                          " is below a joint dump at_iter of " +
                                          std::to_string(d.at_iter));
    }
    if (!args.models.empty()) {
        cfg.run_exact = args.models == "exact" || args.models == "both";
        cfg.run_baseline = args.models == "baseline" || args.models == "both";
    }
    if (args.no_mc) cfg.mc = false;

    const zalms::ExperimentOutcome outcome =
        zalms::run_experiment(cfg, args.out_dir, args.threads, args.quiet ? nullptr : &std::cout);
    if (!args.quiet)
        std::cout << "[zalms] " << outcome.files.size() << " files in " << args.out_dir
                  << " (" << zalms::format_double(outcome.wall_seconds) << " s)\n";
    return 0;
}

int do_verify(const zalms::VerifyOptions& opt, bool quiet) {
    const zalms::VerifyReport rep = zalms::verify_lemmas(opt);
    if (!quiet) {
        std::cout << "[verify] grid tuples: " << rep.total_tuples() << " (sign-mean "
                  << rep.sign_mean_tuples << ", pairs " << rep.pair_tuples << ", near-singular "
                  << rep.relaxed_tuples << ")\n";
        std::cout << "[verify] max |closed - quadrature|: sign-mean "
                  << zalms::format_double(rep.max_dev_sign_mean) << ", sign-product "
                  << zalms::format_double(rep.max_dev_sign_product) << ", cross-moment "
                  << zalms::format_double(rep.max_dev_cross) << "\n";
        std::cout << "[verify] near-singular correlations max deviation: "
                  << zalms::format_double(rep.max_dev_relaxed) << "\n";
        std::cout << "[verify] assembled vs simplified cross moment: "
                  << zalms::format_double(rep.max_dev_equivalence) << "\n";
        std::cout << "[verify] Monte Carlo checks: " << rep.mc_checks
                  << ", worst deviation: " << zalms::format_double(rep.worst_mc_sigma)
                  << " standard errors\n";
    }
    for (const std::string& failure : rep.failures) std::cerr << "[verify] " << failure << "\n";
    if (!quiet)
        std::cout << "[verify] " << (rep.passed() ? "PASS" : "FAIL") << " ("
                  << rep.failures.size() << " breaches)\n";
    return rep.passed() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-attracting LMS: exact transient model, baseline model, and seeded "
                 "Monte Carlo validation"};
    app.set_version_flag("--version", std::string(zalms::version));
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run the experiment and write CSV outputs");
    run->add_option("--config", run_args.config_path,
                    "JSON config file (or a manifest.json from a previous run)");
    run->add_option("--out", run_args.out_dir, "Output directory (default zalms_out)");
    run->add_option("--seed", run_args.seed, "Override run.master_seed")
        ->each([&](const std::string&) { run_args.seed_set = true; });
    run->add_option("--runs", run_args.runs, "Override run.runs")
        ->each([&](const std::string&) { run_args.runs_set = true; });
    run->add_option("--iters", run_args.iters, "Override run.iters")
        ->each([&](const std::string&) { run_args.iters_set = true; });
    run->add_option("--models", run_args.models, "Models to run: exact, baseline, or both")
        ->check(CLI::IsMember({"exact", "baseline", "both"}));
    run->add_flag("--no-mc", run_args.no_mc, "Skip the Monte Carlo ensemble");
    run->add_flag("--quiet", run_args.quiet, "Suppress progress output");
    run->add_option("--threads", run_args.threads,
                    "Worker threads for the ensemble (results are thread-count invariant)");

    zalms::VerifyOptions verify_opt;
    bool verify_quiet = false;
    CLI::App* verify =
        app.add_subcommand("verify-lemmas", "Check closed-form sign moments against oracles");
    verify->add_option("--mc-samples", verify_opt.mc_samples,
                       "Samples per Monte Carlo oracle check (default 1000000)");
    verify->add_option("--mc-stride", verify_opt.mc_stride,
                       "Check every k-th grid tuple against Monte Carlo (0 disables)");
    verify->add_option("--seed", verify_opt.master_seed, "Master seed for Monte Carlo oracles");
    verify->add_flag("--inject-sign-flip", verify_opt.inject_sign_flip,
                     "Fault injection: use the sign-flipped assembled cross moment "
                     "(the suite must fail)");
    verify->add_flag("--quiet", verify_quiet, "Print only failures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return do_run(run_args);
        return do_verify(verify_opt, verify_quiet);
    } catch (const zalms::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
