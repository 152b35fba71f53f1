// tsact: generate synthetic timestamp-supervised datasets, train the
// plateau-refinement pipeline, evaluate checkpoints and run the benchmark.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "tsact/bench.hpp"
#include "tsact/config.hpp"
#include "tsact/evalreport.hpp"
#include "tsact/synthdata.hpp"
#include "tsact/trainer.hpp"
#include "tsact/version.hpp"

namespace fs = std::filesystem;
using namespace tsact;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;   // usage / configuration problems
constexpr int kExitFormat = 2;  // data format problems
constexpr int kExitBench = 3;   // acceptance criteria failed

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
    ConfigFile file = ConfigFile::parse(config_path);
    const SynthConfig cfg = read_synth_config(file);
    file.check_fully_consumed();

    fs::create_directories(out_dir);
    RunManifest manifest{"generate", snapshot(cfg)};
    manifest.entries.emplace_back("config_path", config_path);
    manifest.entries.emplace_back("out_dir", out_dir);
    manifest.write_started(fs::path(out_dir) / "manifest.txt");

    const Dataset dataset = generate_synthetic(cfg);
    save_dataset(dataset, fs::path(out_dir) / "dataset");
    manifest.append_finished(fs::path(out_dir) / "manifest.txt");
    std::cout << "dataset written to " << (fs::path(out_dir) / "dataset").string() << " ("
              << dataset.train_videos.size() << " train videos, " << dataset.test_videos.size()
              << " test instances)\n";
    return kExitOk;
}

int cmd_train(const std::string& dataset_dir, const std::string& config_path,
              const std::string& out_dir, const std::string& mode_text, int threads) {
    const SupervisionMode mode = supervision_mode_from_string(mode_text);
    TrainConfig cfg;
    if (!config_path.empty()) {
        ConfigFile file = ConfigFile::parse(config_path);
        cfg = read_train_config(file);
        file.check_fully_consumed();
    }
    cfg.threads = std::max(1, threads);

    fs::create_directories(out_dir);
    RunManifest manifest{"train", snapshot(cfg)};
    manifest.entries.emplace_back("timestamps", mode_text);
    manifest.entries.emplace_back("dataset_dir", dataset_dir);
    manifest.entries.emplace_back("config_path", config_path.empty() ? "<defaults>" : config_path);
    manifest.entries.emplace_back("out_dir", out_dir);
    manifest.write_started(fs::path(out_dir) / "manifest.txt");

    const Dataset dataset = load_dataset(dataset_dir);
    const TrainState state = bench::run_mode_pipeline(dataset, cfg, mode, out_dir);
    manifest.append_finished(fs::path(out_dir) / "manifest.txt");
    std::cout << "trained " << mode_text << " for " << state.epoch << " epochs, artifacts in "
              << out_dir << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_dir,
             const std::string& out_dir) {
    fs::create_directories(out_dir);
    RunManifest manifest{"eval", {}};
    manifest.entries.emplace_back("checkpoint", checkpoint_path);
    manifest.entries.emplace_back("dataset_dir", dataset_dir);
    manifest.entries.emplace_back("out_dir", out_dir);
    manifest.write_started(fs::path(out_dir) / "manifest.txt");

    const Dataset dataset = load_dataset(dataset_dir);
    const TrainState state = load_checkpoint(checkpoint_path);
    emit_report(state, dataset, out_dir);
    manifest.append_finished(fs::path(out_dir) / "manifest.txt");
    std::cout << "report written to " << (fs::path(out_dir) / "report.txt").string() << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& out_dir, int threads, bool disable_refine) {
    fs::create_directories(out_dir);
    RunManifest manifest{"bench", {}};
    manifest.entries.emplace_back("out_dir", out_dir);
    manifest.entries.emplace_back("threads", std::to_string(threads));
    manifest.write_started(fs::path(out_dir) / "manifest.txt");

    bench::BenchOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    options.refine_enabled = !disable_refine;
    const bench::BenchReport report = bench::run_bench(options);
    bench::print_report(report, std::cout);
    manifest.append_finished(fs::path(out_dir) / "manifest.txt");
    return report.all_passed() ? kExitOk : kExitBench;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-timestamp supervision simulator"};
    app.set_version_flag("--version", std::string("tsact ") + kVersion);
    app.require_subcommand(1);

    std::string config_path, dataset_dir, out_dir, checkpoint_path;
    std::string mode_text = "ts";
    int threads = 1;
    bool disable_refine = false;

    auto* generate = app.add_subcommand("generate", "generate a synthetic dataset");
    generate->add_option("--config", config_path, "config file with a [dataset] section")
        ->required();
    generate->add_option("--out", out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train", "train a classifier with timestamp supervision");
    train->add_option("--dataset", dataset_dir, "dataset directory")->required();
    train->add_option("--config", config_path, "config file ([train]/[refine] sections)");
    train->add_option("--out", out_dir, "output directory")->required();
    train->add_option("--timestamps", mode_text, "supervision mode: ts, ts-in-gt or full")
        ->required();
    train->add_option("--threads", threads, "worker threads for scoring (default 1)");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint and emit a report");
    eval->add_option("--checkpoint", checkpoint_path, "trainer checkpoint file")->required();
    eval->add_option("--dataset", dataset_dir, "dataset directory")->required();
    eval->add_option("--out", out_dir, "output directory")->required();

    auto* benchcmd = app.add_subcommand("bench", "run the full acceptance benchmark");
    benchcmd->add_option("--out", out_dir, "output directory")->required();
    benchcmd->add_option("--threads", threads, "worker threads for scoring (default 1)");
    benchcmd->add_flag("--disable-refine", disable_refine)->group("");  // negative control

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, out_dir);
        if (train->parsed())
            return cmd_train(dataset_dir, config_path, out_dir, mode_text, threads);
        if (eval->parsed()) return cmd_eval(checkpoint_path, dataset_dir, out_dir);
        if (benchcmd->parsed()) return cmd_bench(out_dir, threads, disable_refine);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
