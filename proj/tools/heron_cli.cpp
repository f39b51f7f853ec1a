#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "heron/errors.hpp"
#include "heron/experiment.hpp"

namespace {

int cmd_validate(const std::string& path) {
    heron::ExperimentConfig cfg = heron::parse_experiment_config(path);
    std::vector<heron::Violation> violations = heron::validate_experiment_config(cfg);
    if (violations.empty()) {
        std::printf("ok: %s\n", path.c_str());
        return 0;
    }
    for (const heron::Violation& v : violations)
        std::fprintf(stderr, "violation: %s: %s\n", v.key.c_str(), v.message.c_str());
    return 2;
}

int cmd_run(const std::string& path, bool has_seed, std::uint64_t seed,
            const std::string& output_dir) {
    heron::ExperimentConfig cfg = heron::parse_experiment_config(path);
    if (has_seed) cfg.seed = seed;
    if (!output_dir.empty()) cfg.output_dir = output_dir;

    heron::ExperimentResult result = heron::run_experiment(cfg);
    bool all_reconciled = true;
    for (const heron::ArmResult& arm : result.arms) {
        const heron::RoundMetrics* last =
            arm.training.rounds.empty() ? nullptr : &arm.training.rounds.back();
        std::printf("arm %s: %zu rounds, final eval_acc %.4f, metrics %s\n",
                    heron::algorithm_name(arm.algorithm).c_str(), arm.training.rounds.size(),
                    last ? last->eval_acc : 0.0, arm.metrics_path.c_str());
        if (!arm.reconciled) {
            all_reconciled = false;
            std::fprintf(stderr, "arm %s: ledger mismatch: %s\n",
                         heron::algorithm_name(arm.algorithm).c_str(),
                         arm.reconcile_detail.c_str());
        }
    }
    if (!all_reconciled) return 3;
    return 0;
}

int cmd_spectrum(const std::string& path, bool has_seed, std::uint64_t seed,
                 const std::string& output_dir) {
    heron::ExperimentConfig cfg = heron::parse_experiment_config(path);
    if (has_seed) cfg.seed = seed;
    if (!output_dir.empty()) cfg.output_dir = output_dir;

    heron::SpectrumRun run = heron::run_spectrum(cfg);
    std::printf("dim %d, probes %zu, lanczos steps %d\n", run.dim, run.estimate.probes.size(),
                run.estimate.m);
    std::printf("trace %.6g, top eigenvalue %.6g, effective rank %.6g\n", run.report.trace,
                run.report.top_eigenvalue, run.report.kappa);
    std::printf("spectrum written to %s\n", run.spectrum_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"split federated learning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;

    CLI::App* run = app.add_subcommand("run", "run every configured arm and write outputs");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        has_seed = true;
    });
    run->add_option("--output-dir", output_dir, "override the config output directory");

    CLI::App* validate = app.add_subcommand("validate", "check a config and list violations");
    validate->add_option("config", config_path, "experiment config file")->required();

    CLI::App* spectrum =
        app.add_subcommand("spectrum", "curvature diagnostics of the initial local loss");
    spectrum->add_option("config", config_path, "experiment config file")->required();
    spectrum->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        has_seed = true;
    });
    spectrum->add_option("--output-dir", output_dir, "override the config output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, has_seed, seed, output_dir);
        if (validate->parsed()) return cmd_validate(config_path);
        if (spectrum->parsed()) return cmd_spectrum(config_path, has_seed, seed, output_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
