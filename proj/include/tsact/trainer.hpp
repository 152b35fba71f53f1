#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsact/classifier.hpp"
#include "tsact/curriculum.hpp"
#include "tsact/refine.hpp"
#include "tsact/synthdata.hpp"

namespace tsact {

enum class SupervisionMode { kTimestamps, kTimestampsInGt, kFull };

std::string to_string(SupervisionMode mode);
SupervisionMode supervision_mode_from_string(const std::string& text);

struct TrainConfig {
    double init_half_width = 45.0;
    double init_steepness = 0.75;
    int base_epochs = 100;
    int update_epochs = 100;
    int frames_per_instance = 5;
    int batch_size = 256;
    double learning_rate = 0.25;
    double base_keep_fraction = 0.5;
    double ts_pad_seconds = 1.0;      // TS simulation when annotations are absent
    double ts_in_gt_std_seconds = 1.0;
    RefineConfig refine;
    std::uint64_t seed_data = 1;      // timestamp simulation
    std::uint64_t seed_sampling = 2;  // frame pools
    std::uint64_t seed_model = 3;     // minibatch shuffling
    int threads = 1;                  // scoring fan-out; results never depend on it

    CurriculumSchedule schedule() const {
        return make_default_schedule(base_keep_fraction, base_epochs, update_epochs);
    }
    int total_epochs(SupervisionMode mode) const {
        return mode == SupervisionMode::kFull ? base_epochs : base_epochs + update_epochs;
    }
    void validate() const;
};

struct ConfidencePoint {
    int epoch = 0;
    double mean_confidence = 0.0;
    int updates_applied = 0;
};

struct LossPoint {
    int epoch = 0;
    double loss = 0.0;
};

struct TrainState {
    SupervisionMode mode = SupervisionMode::kTimestamps;
    int epoch = 0;  // epochs completed
    LinearSoftmaxModel model;
    std::optional<LinearSoftmaxModel> base_model;  // snapshot at the end of the base phase
    std::vector<SamplingDistribution> distributions;
    std::vector<LossPoint> loss_history;
    std::vector<ConfidencePoint> confidence_history;
    // Distribution parameters per update round; entry 0 is the initial (and
    // therefore also before-update) state.
    std::vector<std::vector<PlateauParams>> distribution_snapshots;
    std::vector<UpdateRecord> update_trace;
    int inversion_count = 0;
};

/// One sampling distribution per annotation: centred on the timestamp
/// (clamped into the video) with the configured default width and steepness.
std::vector<SamplingDistribution> init_distributions(const Dataset& dataset,
                                                     const std::vector<std::vector<Annotation>>& annotations,
                                                     const TrainConfig& cfg);

/// Resolves the per-video annotations for the supervision mode: stored
/// dataset annotations for timestamp mode when present, otherwise simulated
/// from ground truth with the protocol matching the mode. Full supervision
/// needs no annotations.
std::vector<std::vector<Annotation>> resolve_annotations(const Dataset& dataset,
                                                         SupervisionMode mode,
                                                         const TrainConfig& cfg);

/// Fresh training state for the dataset and mode (distributions initialized,
/// model at zero).
TrainState init_state(const Dataset& dataset, SupervisionMode mode, const TrainConfig& cfg);

/// Advances the state by one epoch: pool sampling, scoring, curriculum
/// selection, minibatch SGD, and (in the update phase) the periodic
/// distribution update round. Derives all randomness from (seed, epoch), so
/// resuming from a checkpoint reproduces an uninterrupted run exactly.
void run_epoch(TrainState& state, const Dataset& dataset, const TrainConfig& cfg);

/// Runs epochs until the end of the base phase; snapshots the base model.
void run_base_phase(TrainState& state, const Dataset& dataset, const TrainConfig& cfg);

/// Continues through the update phase (no-op for full supervision).
void run_update_phase(TrainState& state, const Dataset& dataset, const TrainConfig& cfg);

/// Binary checkpoint with the full double-precision state: model, base-model
/// snapshot, distributions, histories, snapshots and update trace.
void save_checkpoint(const TrainState& state, const std::filesystem::path& path);
TrainState load_checkpoint(const std::filesystem::path& path);

// Scores every training video with the current model, in canonical order.
std::vector<ScoreMatrix> score_train_videos(const ClassifierInterface& model,
                                            const Dataset& dataset, int threads = 1);

} // namespace tsact
