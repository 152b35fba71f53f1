#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tsact/trainer.hpp"

using namespace tsact;
namespace fs = std::filesystem;

namespace {

Dataset tiny_dataset() {
    SynthConfig cfg;
    cfg.num_videos = 6;
    cfg.video_length = 300;
    cfg.num_classes = 3;
    cfg.instances_per_video = 3;
    cfg.feature_dim = 8;
    cfg.min_segment_len = 25;
    cfg.max_segment_len = 60;
    cfg.min_gap = 5;
    cfg.max_gap = 30;
    cfg.class_signal = 1.0;
    cfg.noise_std = 0.3;
    cfg.num_test_instances = 9;
    cfg.seed = 99;
    return generate_synthetic(cfg);
}

TrainConfig quick_config() {
    TrainConfig cfg;
    cfg.init_half_width = 20.0;
    cfg.base_epochs = 8;
    cfg.update_epochs = 8;
    cfg.refine.update_period = 4;
    cfg.refine.min_component = 8;
    cfg.batch_size = 64;
    cfg.learning_rate = 0.3;
    return cfg;
}

bool states_equal(const TrainState& a, const TrainState& b) {
    if (a.mode != b.mode || a.epoch != b.epoch) return false;
    if (!a.model.equals(b.model)) return false;
    if (a.base_model.has_value() != b.base_model.has_value()) return false;
    if (a.base_model && !a.base_model->equals(*b.base_model)) return false;
    if (a.distributions.size() != b.distributions.size()) return false;
    for (std::size_t i = 0; i < a.distributions.size(); ++i) {
        if (!(a.distributions[i].params == b.distributions[i].params)) return false;
        if (a.distributions[i].video_id != b.distributions[i].video_id) return false;
    }
    if (a.loss_history.size() != b.loss_history.size()) return false;
    for (std::size_t i = 0; i < a.loss_history.size(); ++i)
        if (a.loss_history[i].loss != b.loss_history[i].loss) return false;
    if (a.confidence_history.size() != b.confidence_history.size()) return false;
    for (std::size_t i = 0; i < a.confidence_history.size(); ++i)
        if (a.confidence_history[i].mean_confidence !=
            b.confidence_history[i].mean_confidence)
            return false;
    if (a.distribution_snapshots != b.distribution_snapshots) return false;
    return a.update_trace.size() == b.update_trace.size();
}

} // namespace

TEST_CASE("init_distributions centers plateaus on the timestamps") {
    Dataset dataset;
    dataset.num_classes = 2;
    dataset.feature_dim = 1;
    VideoStream video;
    video.video_id = "train_0";
    video.length = 600;
    video.feature_dim = 1;
    video.features.resize(600, 0.0f);
    video.annotations = {{"train_0", 100, 0, 0}, {"train_0", 120, 1, 1}, {"train_0", 500, 0, 2}};
    dataset.train_videos.push_back(video);

    TrainConfig cfg;
    const auto dists =
        init_distributions(dataset, {dataset.train_videos[0].annotations}, cfg);
    REQUIRE(dists.size() == 3);
    CHECK(dists[0].params.center == 100.0);
    CHECK(dists[1].params.center == 120.0);
    CHECK(dists[2].params.center == 500.0);
    for (const auto& d : dists) {
        CHECK(d.params.half_width == 45.0);
        CHECK(d.params.steepness == 0.75);
    }
    // Adjacent timestamps 100 and 120 with w=45: both retained with
    // overlapping supports.
    const FrameInterval s0 = plateau_support(dists[0].params, 0.5, 600);
    const FrameInterval s1 = plateau_support(dists[1].params, 0.5, 600);
    CHECK(s0.last >= s1.first);

    // Empty annotation list gives an empty distribution set.
    const auto none = init_distributions(dataset, {{}}, cfg);
    CHECK(none.empty());
}

TEST_CASE("base phase learns better than uniform prediction") {
    const Dataset dataset = tiny_dataset();
    const TrainConfig cfg = quick_config();
    TrainState state = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    run_base_phase(state, dataset, cfg);
    CHECK(state.epoch == cfg.base_epochs);
    REQUIRE(!state.loss_history.empty());
    CHECK(state.loss_history.back().loss < std::log(dataset.num_classes));
    CHECK(state.base_model.has_value());
    // Distributions untouched during the base phase.
    for (std::size_t i = 0; i < state.distributions.size(); ++i)
        CHECK(state.distributions[i].params == state.distribution_snapshots[0][i]);
}

TEST_CASE("update phase appends confidence history and snapshots") {
    const Dataset dataset = tiny_dataset();
    const TrainConfig cfg = quick_config();
    TrainState state = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    run_base_phase(state, dataset, cfg);
    run_update_phase(state, dataset, cfg);
    CHECK(state.epoch == cfg.base_epochs + cfg.update_epochs);
    CHECK(state.confidence_history.size() == 2);  // 8 epochs / period 4
    CHECK(state.distribution_snapshots.size() == 3);
    for (const auto& point : state.confidence_history) {
        if (point.updates_applied > 0) CHECK(point.mean_confidence > 0.0);
    }
    // Every applied update recorded a positive confidence.
    for (const auto& record : state.update_trace) CHECK(record.confidence > 0.0);
}

TEST_CASE("degenerate refine configuration is rejected") {
    TrainConfig cfg = quick_config();
    cfg.refine.update_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("full supervision trains on ground truth only") {
    const Dataset dataset = tiny_dataset();
    TrainConfig cfg = quick_config();
    TrainState state = init_state(dataset, SupervisionMode::kFull, cfg);
    CHECK(state.distributions.empty());
    run_base_phase(state, dataset, cfg);
    run_update_phase(state, dataset, cfg);  // no-op
    CHECK(state.epoch == cfg.base_epochs);
    CHECK(state.confidence_history.empty());
    CHECK(state.update_trace.empty());
}

TEST_CASE("identical seeds give identical runs") {
    const Dataset dataset = tiny_dataset();
    const TrainConfig cfg = quick_config();
    TrainState a = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    TrainState b = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    run_base_phase(a, dataset, cfg);
    run_update_phase(a, dataset, cfg);
    run_base_phase(b, dataset, cfg);
    run_update_phase(b, dataset, cfg);
    CHECK(states_equal(a, b));
}

TEST_CASE("threaded scoring matches serial scoring") {
    const Dataset dataset = tiny_dataset();
    TrainConfig cfg = quick_config();
    TrainState state = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    run_base_phase(state, dataset, cfg);
    const auto serial = score_train_videos(state.model, dataset, 1);
    const auto threaded = score_train_videos(state.model, dataset, 4);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t v = 0; v < serial.size(); ++v) CHECK(serial[v].scores == threaded[v].scores);
}

TEST_CASE("checkpoint round-trip and resume equivalence") {
    const Dataset dataset = tiny_dataset();
    const TrainConfig cfg = quick_config();
    const fs::path path = fs::temp_directory_path() / "tsact_ckpt_test.bin";

    // Straight run of 16 epochs.
    TrainState straight = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    for (int e = 0; e < 16; ++e) run_epoch(straight, dataset, cfg);

    // Run 10, checkpoint, restore, run 6 more.
    TrainState first = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    for (int e = 0; e < 10; ++e) run_epoch(first, dataset, cfg);
    save_checkpoint(first, path);
    TrainState resumed = load_checkpoint(path);
    CHECK(states_equal(first, resumed));
    for (int e = 0; e < 6; ++e) run_epoch(resumed, dataset, cfg);
    CHECK(states_equal(straight, resumed));

    // Truncated checkpoints are rejected.
    const auto size = fs::file_size(path);
    fs::resize_file(path, size / 2);
    CHECK_THROWS_AS(load_checkpoint(path), FormatError);
    fs::remove(path);
}

TEST_CASE("pool size with h=1 uses every sampled frame") {
    const Dataset dataset = tiny_dataset();
    TrainConfig cfg = quick_config();
    cfg.base_keep_fraction = 1.0;
    TrainState state = init_state(dataset, SupervisionMode::kTimestamps, cfg);
    Rng rng(mix_seed(cfg.seed_sampling, 0, 0));
    const auto pool = sample_pool(state.distributions, dataset, cfg.frames_per_instance, rng);
    CHECK(pool.size() == state.distributions.size() * 5);
    const auto scores = score_train_videos(state.model, dataset, 1);
    const auto split = select_top_h(pool, scores, 1.0);
    CHECK(split.selected.size() == pool.size());
}
