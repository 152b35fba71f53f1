#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsact/synthdata.hpp"
#include "tsact/trainer.hpp"

namespace tsact::bench {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct BenchOptions {
    std::filesystem::path out_dir;
    bool refine_enabled = true;  // negative-control switch; disables update rounds
    int threads = 1;
    bool skip_determinism = false;  // skips the double-run check (criterion 9 fails)
};

struct BenchReport {
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;
    bool all_passed() const;
};

/// The canonical synthetic benchmark configuration.
SynthConfig canonical_synth_config();
TrainConfig canonical_train_config();

/// Generates the canonical benchmark, trains all three supervision modes,
/// evaluates them and checks every acceptance criterion. Artifacts land under
/// options.out_dir.
BenchReport run_bench(const BenchOptions& options);

/// Trains one supervision mode on the dataset and writes its artifacts
/// (checkpoints, model exports, CSVs, report) under out_dir. Returns the
/// final state.
TrainState run_mode_pipeline(const Dataset& dataset, const TrainConfig& cfg,
                             SupervisionMode mode, const std::filesystem::path& out_dir);

// Stand-alone acceptance suites (also runnable without the full pipeline).
CriterionResult exact_math_suite();    // closed-form identities and gradient check
CriterionResult oracle_suite();        // brute-force equivalence, 1000 random instances each
CriterionResult fit_recovery_suite();  // noiseless plateau recovery, 100 trials

void print_report(const BenchReport& report, std::ostream& out);

} // namespace tsact::bench
