#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "zalms/config.hpp"
#include "zalms/csv.hpp"
#include "zalms/filter.hpp"
#include "zalms/harness.hpp"
#include "zalms/theory.hpp"
#include "zalms/version.hpp"

namespace zalms {

/**
 * End-to-end experiment orchestration: theoretical curves (exact and/or
 * baseline), the Monte Carlo ensemble, their comparison, joint dumps, and a
 * run manifest.
 *
 * Files written into out_dir (as requested by the configuration):
 *   theory_exact.csv / theory_baseline.csv -- n, mse, emse, m_0..m_{L-1}
 *   mc.csv                                 -- same schema, ensemble averages
 *   comparison.csv                         -- exact model vs ensemble
 *   comparison_baseline.csv                -- baseline model vs ensemble
 *   joint_<i>_<j>_<at_iter>.csv            -- run, werr_<i>, werr_<j>
 *   manifest.json                          -- config echo, version, wall
 *                                             time, files, joint summaries
 *
 * All CSV numbers use shortest round-trip serialization, and everything
 * except the manifest's wall time is a pure function of the configuration,
 * so repeated runs produce byte-identical CSV files for any thread count.
 * The manifest itself can be passed back to load_config to reproduce the
 * run.
 */
struct ExperimentOutcome {
    std::vector<std::string> files;
    double wall_seconds = 0.0;
};

namespace detail {

inline std::vector<std::string> curve_header(std::size_t L) {
    std::vector<std::string> header = {"n", "mse", "emse"};
    for (std::size_t i = 0; i < L; ++i) header.push_back("m_" + std::to_string(i));
    return header;
}

inline void write_theory_csv(const std::string& path, const std::vector<CurvePoint>& curve,
                             std::size_t L) {
    CsvWriter out(path, curve_header(L));
    std::vector<std::string> cells;
    for (const CurvePoint& p : curve) {
        cells.clear();
        cells.push_back(format_unsigned(p.n));
        cells.push_back(format_double(p.mse));
        cells.push_back(format_double(p.emse));
        for (double m : p.m) cells.push_back(format_double(m));
        out.write_row(cells);
    }
    out.close();
}

inline void write_mc_csv(const std::string& path, const std::vector<McCurvePoint>& curve,
                         std::size_t L) {
    CsvWriter out(path, curve_header(L));
    std::vector<std::string> cells;
    for (const McCurvePoint& p : curve) {
        cells.clear();
        cells.push_back(format_unsigned(p.n));
        cells.push_back(format_double(p.mse));
        cells.push_back(format_double(p.emse));
        for (double m : p.mean_error) cells.push_back(format_double(m));
        out.write_row(cells);
    }
    out.close();
}

inline void write_comparison_csv(const std::string& path, const ComparisonReport& report) {
    CsvWriter out(path, {"n", "mse_theory", "mse_mc", "mse_mc_stderr", "emse_theory",
                         "emse_mc", "emse_mc_stderr", "emse_in_band"});
    for (const ComparisonRow& row : report.rows)
        out.write_row({format_unsigned(row.n), format_double(row.mse_theory),
                       format_double(row.mse_mc), format_double(row.mse_mc_stderr),
                       format_double(row.emse_theory), format_double(row.emse_mc),
                       format_double(row.emse_mc_stderr), row.emse_in_band ? "1" : "0"});
    out.close();
}

inline std::string joint_file_name(const PairDump& spec) {
    return "joint_" + std::to_string(spec.i) + "_" + std::to_string(spec.j) + "_" +
           std::to_string(spec.at_iter) + ".csv";
}

inline void write_joint_csv(const std::string& path, const JointSampleSet& set,
                            std::size_t count) {
    CsvWriter out(path, {"run", "werr_" + std::to_string(set.spec.i),
                         "werr_" + std::to_string(set.spec.j)});
    for (std::size_t r = 0; r < count; ++r)
        out.write_row({format_unsigned(r), format_double(set.samples[r][0]),
                       format_double(set.samples[r][1])});
    out.close();
}

} // namespace detail

inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                        const std::string& out_dir, unsigned threads = 1,
                                        std::ostream* log = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    cfg.plant.validate();
    cfg.input.validate();
    const AlgoParams p = make_algo_params(cfg.mu, cfg.lambda);
    const std::size_t L = cfg.plant.length();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw compute_error("run_experiment: cannot create '" + out_dir + "': " +
                                ec.message());
    const std::filesystem::path base(out_dir);

    ExperimentOutcome outcome;
    auto note = [&](const std::string& name) {
        outcome.files.push_back(name);
        if (log) *log << "[zalms] wrote " << (base / name).string() << '\n';
    };

    std::vector<CurvePoint> exact_curve, baseline_curve;
    if (cfg.run_exact) {
        exact_curve = run_model(cfg.plant, cfg.input, p, ModelKind::exact, cfg.iters);
        detail::write_theory_csv((base / "theory_exact.csv").string(), exact_curve, L);
        note("theory_exact.csv");
    }
    if (cfg.run_baseline) {
        baseline_curve = run_model(cfg.plant, cfg.input, p, ModelKind::baseline, cfg.iters);
        detail::write_theory_csv((base / "theory_baseline.csv").string(), baseline_curve, L);
        note("theory_baseline.csv");
    }

    nlohmann::ordered_json joint_summaries = nlohmann::ordered_json::array();
    if (cfg.mc) {
        EnsembleConfig ecfg;
        ecfg.runs = cfg.runs;
        ecfg.iters = cfg.iters;
        ecfg.master_seed = cfg.master_seed;
        for (const JointDumpSpec& d : cfg.joint_dumps)
            ecfg.record_pairs.push_back({d.i, d.j, d.at_iter});

        const EnsembleResult mc = run_ensemble(cfg.plant, cfg.input, p, ecfg, threads);
        detail::write_mc_csv((base / "mc.csv").string(), mc.curve, L);
        note("mc.csv");

        if (cfg.run_exact) {
            detail::write_comparison_csv((base / "comparison.csv").string(),
                                         compare_curves(exact_curve, mc.curve));
            note("comparison.csv");
        }
        if (cfg.run_baseline) {
            detail::write_comparison_csv((base / "comparison_baseline.csv").string(),
                                         compare_curves(baseline_curve, mc.curve));
            note("comparison_baseline.csv");
        }

        for (std::size_t k = 0; k < cfg.joint_dumps.size(); ++k) {
            const JointDumpSpec& d = cfg.joint_dumps[k];
            const JointSampleSet& set = mc.joints[k];
            const std::uint64_t requested = d.samples == 0 ? cfg.runs : d.samples;
            const std::uint64_t actual = std::min<std::uint64_t>(requested, cfg.runs);
            const std::string name = detail::joint_file_name(set.spec);
            detail::write_joint_csv((base / name).string(), set,
                                    static_cast<std::size_t>(actual));
            note(name);

            JointSampleSet subset{set.spec,
                                  {set.samples.begin(),
                                   set.samples.begin() + static_cast<std::ptrdiff_t>(actual)}};
            const JointSummary s = summarize_joint(subset);
            nlohmann::ordered_json entry;
            entry["file"] = name;
            entry["i"] = d.i;
            entry["j"] = d.j;
            entry["at_iter"] = d.at_iter;
            entry["samples_requested"] = requested;
            entry["samples"] = actual;
            entry["mean"] = {s.mean_i, s.mean_j};
            entry["cov"] = {{s.var_i, s.cov}, {s.cov, s.var_j}};
            entry["skewness"] = {s.skew_i, s.skew_j};
            entry["excess_kurtosis"] = {s.ex_kurt_i, s.ex_kurt_j};
            joint_summaries.push_back(std::move(entry));
        }
    }

    const auto stop = std::chrono::steady_clock::now();
    outcome.wall_seconds = std::chrono::duration<double>(stop - start).count();

    nlohmann::ordered_json manifest;
    manifest["version"] = version;
    manifest["wall_time_seconds"] = outcome.wall_seconds;
    manifest["threads"] = threads;
    manifest["files"] = outcome.files;
    manifest["joint_summaries"] = std::move(joint_summaries);
    manifest["config"] = config_to_json(cfg);
    {
        const std::string path = (base / "manifest.json").string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw compute_error("run_experiment: cannot open '" + path + "'");
        out << manifest.dump(2) << '\n';
        out.close();
        if (out.fail()) throw compute_error("run_experiment: write to '" + path + "' failed");
    }
    note("manifest.json");
    return outcome;
}

} // namespace zalms
