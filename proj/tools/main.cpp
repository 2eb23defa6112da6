// syco: sycophancy-aware multi-agent discussion harness.
//
// Stages run in order: probe -> score -> discuss -> analyze -> report. Every
// stage reads the same config file and writes into the run directory named by
// its "out" key; artifacts carry the config hash so stages refuse mismatched
// inputs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "syco/analysis.hpp"
#include "syco/config.hpp"
#include "syco/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitIncomplete = 4;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> max_in_flight;
    std::vector<std::string> modes;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Override the global seed");
    cmd->add_option("--out", args.out_dir, "Override the output directory");
    cmd->add_option("--max-in-flight", args.max_in_flight,
                    "Cap concurrent requests per remote backend");
    cmd->add_option("--mode", args.modes, "Restrict to these experiment modes (repeatable)");
}

syco::RunConfig load(const CommonArgs& args) {
    syco::CliOverrides overrides;
    overrides.seed = args.seed;
    if (args.out_dir) overrides.out_dir = *args.out_dir;
    overrides.max_in_flight = args.max_in_flight;
    overrides.modes = args.modes;
    return syco::load_run_config(args.config_path, overrides);
}

bool has_partial_state(const syco::RunConfig& cfg) {
    namespace fs = std::filesystem;
    if (!fs::exists(cfg.out_dir)) return false;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.ends_with(".ckpt.jsonl")) return true;
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sycophancy-aware multi-agent discussion harness"};
    app.require_subcommand(1);

    CommonArgs args;
    std::optional<std::size_t> stop_after;
    bool resume = false;
    bool allow_mixed = false;

    CLI::App* probe = app.add_subcommand("probe", "Collect neutral knowledge probes");
    add_common(probe, args);

    CLI::App* score = app.add_subcommand("score", "Run pilot discussions and compute score tables");
    add_common(score, args);
    score->add_option("--stop-after", stop_after,
                      "Stop after completing this many pilot trials (resume later)");
    score->add_flag("--resume", resume, "Continue a previously interrupted stage");

    CLI::App* discuss = app.add_subcommand("discuss", "Run test-set discussions for every mode");
    add_common(discuss, args);
    discuss->add_option("--stop-after", stop_after,
                        "Stop after completing this many new trials (resume later)");
    discuss->add_flag("--resume", resume, "Continue a previously interrupted stage");

    CLI::App* analyze = app.add_subcommand("analyze", "Emit report CSVs and the summary");
    add_common(analyze, args);
    analyze->add_flag("--allow-mixed", allow_mixed,
                      "Accept transcript files written by a different config hash");

    CLI::App* report = app.add_subcommand("report", "Print the stored summary");
    add_common(report, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;  // bad flags are config errors
    }

    try {
        syco::RunConfig cfg = load(args);
        if (probe->parsed()) {
            syco::cmd_probe(cfg);
        } else if (score->parsed()) {
            if (!resume && has_partial_state(cfg))
                throw syco::IncompleteInputsError(
                    "found checkpoints from an interrupted run; pass --resume to continue");
            if (!syco::cmd_score(cfg, stop_after))
                std::fprintf(stderr, "score stopped early; rerun with --resume to finish\n");
        } else if (discuss->parsed()) {
            if (!resume && has_partial_state(cfg))
                throw syco::IncompleteInputsError(
                    "found checkpoints from an interrupted run; pass --resume to continue");
            syco::DiscussStatus status = syco::cmd_discuss(cfg, stop_after);
            if (!status.complete)
                std::fprintf(stderr, "discuss stopped early; rerun with --resume to finish\n");
            if (status.skipped > 0)
                std::fprintf(stderr, "discuss finished with %zu skipped trials\n", status.skipped);
        } else if (analyze->parsed()) {
            syco::cmd_analyze(cfg, allow_mixed);
        } else if (report->parsed()) {
            std::cout << syco::cmd_report(cfg);
        }
        return kExitOk;
    } catch (const syco::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const syco::BackendFailureError& e) {
        std::fprintf(stderr, "backend failure: %s\n", e.what());
        return kExitBackend;
    } catch (const syco::BackendUnavailableError& e) {
        std::fprintf(stderr, "backend failure: %s\n", e.what());
        return kExitBackend;
    } catch (const syco::IncompleteInputsError& e) {
        std::fprintf(stderr, "incomplete inputs: %s\n", e.what());
        return kExitIncomplete;
    } catch (const syco::UnpairedTrialsError& e) {
        std::fprintf(stderr, "incomplete inputs: %s\n", e.what());
        return kExitIncomplete;
    } catch (const syco::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
