#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "tsact/curriculum.hpp"

using namespace tsact;

namespace {

// A dataset of two tiny videos plus a score matrix the tests control.
Dataset two_video_dataset(int length = 50, int dim = 2) {
    Dataset d;
    d.num_classes = 2;
    d.feature_dim = dim;
    for (int v = 0; v < 2; ++v) {
        VideoStream video;
        video.video_id = "train_" + std::to_string(v);
        video.length = length;
        video.feature_dim = dim;
        video.features.resize(static_cast<std::size_t>(length) * dim, 0.0f);
        d.train_videos.push_back(std::move(video));
    }
    return d;
}

std::vector<SamplingDistribution> some_distributions(int per_video) {
    std::vector<SamplingDistribution> out;
    for (int v = 0; v < 2; ++v) {
        for (int i = 0; i < per_video; ++i) {
            SamplingDistribution dist;
            dist.params = {10.0 + 12.0 * i, 5.0, 1.0};
            dist.video_id = "train_" + std::to_string(v);
            dist.video_index = v;
            dist.class_label = i % 2;
            dist.instance_index = i;
            out.push_back(dist);
        }
    }
    return out;
}

ScoreMatrix constant_scores(const std::string& id, int length, double p0) {
    ScoreMatrix m;
    m.video_id = id;
    m.num_frames = length;
    m.num_classes = 2;
    m.scores.resize(static_cast<std::size_t>(length) * 2);
    for (int x = 0; x < length; ++x) {
        m.scores[static_cast<std::size_t>(x) * 2] = p0;
        m.scores[static_cast<std::size_t>(x) * 2 + 1] = 1.0 - p0;
    }
    return m;
}

} // namespace

TEST_CASE("sample_pool draws the exact per-instance count") {
    const Dataset dataset = two_video_dataset();
    const auto distributions = some_distributions(5);  // 10 total
    Rng rng(1);
    const auto pool = sample_pool(distributions, dataset, 5, rng);
    CHECK(pool.size() == 50);
    std::map<int, int> per_source;
    for (const auto& f : pool) {
        ++per_source[f.source_distribution];
        CHECK(f.frame >= 0);
        CHECK(f.frame < 50);
        CHECK(f.class_label == distributions[static_cast<std::size_t>(f.source_distribution)].class_label);
    }
    for (const auto& [src, count] : per_source) CHECK(count == 5);
}

TEST_CASE("sample_pool is deterministic and propagates degenerate plateaus") {
    const Dataset dataset = two_video_dataset();
    auto distributions = some_distributions(3);
    Rng a(9), b(9);
    const auto pool_a = sample_pool(distributions, dataset, 5, a);
    const auto pool_b = sample_pool(distributions, dataset, 5, b);
    REQUIRE(pool_a.size() == pool_b.size());
    for (std::size_t i = 0; i < pool_a.size(); ++i) {
        CHECK(pool_a[i].frame == pool_b[i].frame);
        CHECK(pool_a[i].source_distribution == pool_b[i].source_distribution);
    }

    // A concentrated plateau yields five identical draws.
    std::vector<SamplingDistribution> concentrated{distributions[0]};
    concentrated[0].params = {20.0, 0.4, 50.0};  // essentially one frame
    Rng c(11);
    const auto pool_c = sample_pool(concentrated, dataset, 5, c);
    for (const auto& f : pool_c) CHECK(f.frame == pool_c[0].frame);

    // Distributions whose plateau has left the video are reported by name.
    std::vector<SamplingDistribution> degenerate{distributions[0]};
    degenerate[0].params.center = -4000.0;
    degenerate[0].video_id = "train_0";
    Rng d(12);
    CHECK_THROWS_WITH_AS(sample_pool(degenerate, dataset, 5, d),
                         doctest::Contains("train_0"), DegenerateDistribution);
}

TEST_CASE("select_top_h keeps the per-class ceiling") {
    const Dataset dataset = two_video_dataset();
    std::vector<ScoreMatrix> scores;
    scores.push_back(constant_scores("train_0", 50, 0.8));
    scores.push_back(constant_scores("train_1", 50, 0.8));

    // 100 frames of class 0 at distinct positions.
    std::vector<SampledFrame> pool;
    for (int i = 0; i < 100; ++i)
        pool.push_back({"train_0", 0, i % 50, 0, 0, 0.0});

    const auto split = select_top_h(pool, scores, 0.5);
    CHECK(split.selected.size() == 50);
    CHECK(split.discarded.size() == 50);

    const auto tiny = select_top_h({pool.begin(), pool.begin() + 3}, scores, 0.34);
    CHECK(tiny.selected.size() == 2);  // ceil(0.34 * 3) = 2

    const auto all = select_top_h(pool, scores, 1.0);
    CHECK(all.selected.size() == 100);
    CHECK(all.discarded.empty());
}

TEST_CASE("selection keeps the highest-scored frames per class") {
    Dataset dataset = two_video_dataset(3);
    ScoreMatrix m;
    m.video_id = "train_0";
    m.num_frames = 3;
    m.num_classes = 2;
    m.scores = {0.9, 0.1, 0.5, 0.5, 0.1, 0.9};  // class-0 scores: 0.9, 0.5, 0.1
    std::vector<ScoreMatrix> scores{m, constant_scores("train_1", 3, 0.5)};

    std::vector<SampledFrame> pool;
    for (int frame = 0; frame < 3; ++frame)
        pool.push_back({"train_0", 0, frame, 0, 0, 0.0});

    // h = 1/3 keeps exactly the argmax frame.
    const auto split = select_top_h(pool, scores, 1.0 / 3.0);
    REQUIRE(split.selected.size() == 1);
    CHECK(split.selected[0].frame == 0);
    CHECK(split.selected[0].score == doctest::Approx(0.9));

    // Every kept frame scores at least as high as every discarded one.
    const auto half = select_top_h(pool, scores, 0.5);
    for (const auto& kept : half.selected)
        for (const auto& dropped : half.discarded)
            if (kept.class_label == dropped.class_label) CHECK(kept.score >= dropped.score);
}

TEST_CASE("per-class quota invariant holds on random pools") {
    const Dataset dataset = two_video_dataset(40);
    std::vector<ScoreMatrix> scores;
    Rng score_rng(71);
    for (int v = 0; v < 2; ++v) {
        ScoreMatrix m;
        m.video_id = "train_" + std::to_string(v);
        m.num_frames = 40;
        m.num_classes = 2;
        m.scores.resize(80);
        for (int x = 0; x < 40; ++x) {
            const double p = score_rng.next_double();
            m.scores[static_cast<std::size_t>(x) * 2] = p;
            m.scores[static_cast<std::size_t>(x) * 2 + 1] = 1.0 - p;
        }
        scores.push_back(std::move(m));
    }

    Rng rng(72);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SampledFrame> pool;
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 60));
        std::map<int, int> class_count;
        for (int i = 0; i < n; ++i) {
            SampledFrame f;
            f.video_index = static_cast<int>(rng.uniform_int(0, 1));
            f.video_id = "train_" + std::to_string(f.video_index);
            f.frame = static_cast<int>(rng.uniform_int(0, 39));
            f.class_label = static_cast<int>(rng.uniform_int(0, 1));
            f.source_distribution = i;
            ++class_count[f.class_label];
            pool.push_back(f);
        }
        const double h = 0.05 + 0.95 * rng.next_double();
        const auto split = select_top_h(pool, scores, h);
        std::map<int, int> kept;
        for (const auto& f : split.selected) ++kept[f.class_label];
        for (const auto& [label, total] : class_count) {
            CHECK(kept[label] == static_cast<int>(std::ceil(h * total - 1e-12)));
        }
        CHECK(split.selected.size() + split.discarded.size() == pool.size());
    }
}

TEST_CASE("missing scores are reported") {
    std::vector<SampledFrame> pool{{"train_9", 9, 0, 0, 0, 0.0}};
    const std::vector<ScoreMatrix> scores;  // nothing scored
    CHECK_THROWS_AS(select_top_h(pool, scores, 0.5), MissingScores);
}

TEST_CASE("curriculum schedule ramps to one") {
    const CurriculumSchedule schedule = make_default_schedule(0.5, 100, 100);
    CHECK(schedule.keep_fraction_at(0) == 0.5);
    CHECK(schedule.keep_fraction_at(99) == 0.5);
    CHECK(schedule.keep_fraction_at(125) == 0.75);
    CHECK(schedule.keep_fraction_at(150) == 1.0);
    CHECK(schedule.keep_fraction_at(500) == 1.0);
    schedule.validate();

    const CurriculumSchedule full = make_default_schedule(1.0, 50, 100);
    CHECK(full.keep_fraction_at(0) == 1.0);
    full.validate();

    CurriculumSchedule bad;
    bad.base_keep_fraction = 0.5;
    bad.ramp = {{10, 0.4}};  // decreasing
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CurriculumSchedule unfinished;
    unfinished.base_keep_fraction = 0.5;
    unfinished.ramp = {{10, 0.75}};  // never reaches 1
    CHECK_THROWS_AS(unfinished.validate(), ConfigError);
}
