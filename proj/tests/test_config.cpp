#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsact/config.hpp"

using namespace tsact;
namespace fs = std::filesystem;

namespace {

const char* kDatasetConfig =
    "# benchmark dataset\n"
    "[dataset]\n"
    "num_videos = 4\n"
    "video_length = 400\n"
    "num_classes = 3\n"
    "instances_per_video = 3\n"
    "feature_dim = 5\n"
    "max_segment_len = 60\n"
    "max_gap = 40\n"
    "noise_std = 0.4\n"
    "seed = 123\n";

} // namespace

TEST_CASE("config parsing and typed getters") {
    ConfigFile file = ConfigFile::parse_text(kDatasetConfig, "test.cfg");
    CHECK(file.require_int("dataset", "num_videos") == 4);
    CHECK(file.get_double("dataset", "noise_std", 0.0) == doctest::Approx(0.4));
    CHECK(file.get_u64("dataset", "seed", 0) == 123);
    CHECK(file.get_int("dataset", "absent", 17) == 17);
}

TEST_CASE("unknown keys fail fast with the offending name") {
    ConfigFile file = ConfigFile::parse_text(std::string(kDatasetConfig) + "typo_key = 1\n",
                                             "test.cfg");
    read_synth_config(file);
    CHECK_THROWS_WITH_AS(file.check_fully_consumed(), doctest::Contains("typo_key"),
                         ConfigError);
}

TEST_CASE("missing required keys are named") {
    const char* text =
        "[dataset]\n"
        "num_videos = 4\n"
        "video_length = 400\n"
        "instances_per_video = 3\n"
        "feature_dim = 5\n";
    ConfigFile file = ConfigFile::parse_text(text, "test.cfg");
    CHECK_THROWS_WITH_AS(read_synth_config(file), doctest::Contains("num_classes"), ConfigError);
}

TEST_CASE("malformed lines and duplicates are rejected") {
    CHECK_THROWS_AS(ConfigFile::parse_text("[dataset]\nnum_videos 4\n", "t"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_text("key = 1\n", "t"), ConfigError);  // outside section
    CHECK_THROWS_AS(ConfigFile::parse_text("[dataset]\na = 1\na = 2\n", "t"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_text("[dataset\na = 1\n", "t"), ConfigError);
}

TEST_CASE("synth config round-trips through its snapshot defaults") {
    ConfigFile file = ConfigFile::parse_text(kDatasetConfig, "test.cfg");
    const SynthConfig cfg = read_synth_config(file);
    file.check_fully_consumed();
    CHECK(cfg.num_videos == 4);
    CHECK(cfg.noise_std == doctest::Approx(0.4));
    CHECK(cfg.frame_rate == 30.0);  // default materialized
    const auto entries = snapshot(cfg);
    bool found = false;
    for (const auto& [k, v] : entries)
        if (k == "dataset.frame_rate" && v == "30") found = true;
    CHECK(found);
}

TEST_CASE("train config reads refine section and thresholds list") {
    const char* text =
        "[train]\n"
        "base_epochs = 12\n"
        "learning_rate = 0.5\n"
        "[refine]\n"
        "thresholds = 0.2, 0.4, 0.6\n"
        "update_period = 3\n";
    ConfigFile file = ConfigFile::parse_text(text, "test.cfg");
    const TrainConfig cfg = read_train_config(file);
    file.check_fully_consumed();
    CHECK(cfg.base_epochs == 12);
    CHECK(cfg.learning_rate == doctest::Approx(0.5));
    CHECK(cfg.refine.threshold_grid == std::vector<double>{0.2, 0.4, 0.6});
    CHECK(cfg.refine.update_period == 3);
    CHECK(cfg.refine.min_component == 15);  // default
}

TEST_CASE("invalid values are rejected with diagnostics") {
    {
        ConfigFile file = ConfigFile::parse_text("[train]\nbase_epochs = soon\n", "t");
        CHECK_THROWS_WITH_AS(read_train_config(file), doctest::Contains("base_epochs"),
                             ConfigError);
    }
    {
        ConfigFile file = ConfigFile::parse_text("[refine]\nthresholds = 0.5, 1.5\n", "t");
        CHECK_THROWS_AS(read_train_config(file), ConfigError);  // threshold > 1
    }
}

TEST_CASE("manifest records configuration and lifecycle") {
    const fs::path path = fs::temp_directory_path() / "tsact_manifest_test.txt";
    RunManifest manifest{"generate", {{"dataset.seed", "42"}}};
    manifest.write_started(path);
    manifest.append_finished(path);

    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("tool = tsact") != std::string::npos);
    CHECK(text.str().find("version = ") != std::string::npos);
    CHECK(text.str().find("command = generate") != std::string::npos);
    CHECK(text.str().find("started_at = ") != std::string::npos);
    CHECK(text.str().find("dataset.seed = 42") != std::string::npos);
    CHECK(text.str().find("finished_at = ") != std::string::npos);
    fs::remove(path);
}
