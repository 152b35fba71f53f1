// Acceptance suite: runs the canonical benchmark end to end, checks every
// criterion at its stated tolerance and prints one PASS/FAIL line per
// criterion. Also exercises the CLI binary and the refinement negative
// control. Nonzero exit on any failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "tsact/bench.hpp"
#include "tsact/evalreport.hpp"
#include "tsact/synthdata.hpp"
#include "tsact/trainer.hpp"

namespace fs = std::filesystem;
using namespace tsact;

namespace {

int failures = 0;

void check(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    if (!ok) ++failures;
}

int run_cli(const std::string& args) {
#ifdef TSACT_CLI_PATH
    const std::string command = std::string(TSACT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    (void)args;
    return -1;
#endif
}

void cli_smoke_tests(const fs::path& root) {
    const fs::path cfg_path = root / "smoke.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[dataset]\n"
               "num_videos = 3\nvideo_length = 300\nnum_classes = 2\n"
               "instances_per_video = 2\nfeature_dim = 4\nmin_segment_len = 20\n"
               "max_segment_len = 40\nmin_gap = 5\nmax_gap = 20\nnum_test_instances = 4\n"
               "seed = 5\n"
               "[train]\nbase_epochs = 3\nupdate_epochs = 2\n"
               "[refine]\nupdate_period = 2\nmin_component = 5\n";
    }

    check(run_cli("generate --config " + cfg_path.string() + " --out " +
                  (root / "gen").string()) == 0,
          "cli-generate", "generate exits 0 on a valid config");
    check(run_cli("train --dataset " + (root / "gen" / "dataset").string() + " --config " +
                  cfg_path.string() + " --out " + (root / "train").string() +
                  " --timestamps ts") == 0,
          "cli-train", "train exits 0 under ts supervision");
    check(run_cli("eval --checkpoint " +
                  (root / "train" / "checkpoint_after_update.bin").string() + " --dataset " +
                  (root / "gen" / "dataset").string() + " --out " +
                  (root / "eval").string()) == 0,
          "cli-eval", "eval exits 0 on a fresh checkpoint");

    // Error paths: bad config -> 1, unknown mode -> 1, bad dataset -> 2.
    const fs::path bad_cfg = root / "bad.cfg";
    std::ofstream(bad_cfg) << "[dataset]\nnum_videos = 3\nvideo_length = 300\n"
                              "instances_per_video = 2\nfeature_dim = 4\n";
    check(run_cli("generate --config " + bad_cfg.string() + " --out " +
                  (root / "gen_bad").string()) == 1,
          "cli-config-error", "missing num_classes exits 1");
    check(run_cli("train --dataset " + (root / "gen" / "dataset").string() + " --out " +
                  (root / "train_bad").string() + " --timestamps sometimes") == 1,
          "cli-mode-error", "unknown timestamp mode exits 1");
    const fs::path not_a_dataset = root / "empty_dir";
    fs::create_directories(not_a_dataset);
    check(run_cli("train --dataset " + not_a_dataset.string() + " --out " +
                  (root / "train_bad2").string() + " --timestamps ts") == 2,
          "cli-format-error", "missing dataset meta exits 2");
}

} // namespace

int main() {
    const fs::path root = fs::current_path() / "acceptance_out";
    fs::remove_all(root);
    fs::create_directories(root);

    // Criteria 1-9 on the canonical benchmark.
    bench::BenchOptions options;
    options.out_dir = root / "bench";
    const bench::BenchReport report = bench::run_bench(options);
    bench::print_report(report, std::cout);
    for (const auto& criterion : report.criteria)
        if (!criterion.passed) ++failures;

    // Negative control: with refinement disabled the improvement criterion
    // must not hold.
    {
        const Dataset dataset = load_dataset(root / "bench" / "run" / "dataset");
        TrainConfig cfg = bench::canonical_train_config();
        cfg.refine.update_period = cfg.update_epochs + 1;  // no rounds ever fire
        const TrainState state = bench::run_mode_pipeline(
            dataset, cfg, SupervisionMode::kTimestamps, root / "no_refine");
        const double before = top1_accuracy(*state.base_model, dataset.test_videos);
        const double after = top1_accuracy(state.model, dataset.test_videos);
        check(after < before + 0.02, "negative-control",
              "without refinement the +0.02 improvement must vanish (before=" +
                  format_double(before) + ", after=" + format_double(after) + ")");
        check(state.confidence_history.empty() && state.update_trace.empty(),
              "negative-control-artifacts", "no update rounds were recorded");
    }

    cli_smoke_tests(root / "cli");

    if (failures == 0) {
        std::cout << "ACCEPTANCE OK\n";
        return 0;
    }
    std::cout << "ACCEPTANCE FAILED (" << failures << " checks)\n";
    return 1;
}
