#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tsact/refine.hpp"

using namespace tsact;

namespace {

ScoreMatrix single_class_matrix(std::vector<double> column) {
    ScoreMatrix m;
    m.video_id = "v";
    m.num_frames = static_cast<int>(column.size());
    m.num_classes = 1;
    m.scores = std::move(column);
    return m;
}

SamplingDistribution distribution_at(double center, double width = 10.0, double steep = 0.75) {
    SamplingDistribution d;
    d.params = {center, width, steep};
    d.video_id = "v";
    d.video_index = 0;
    d.class_label = 0;
    d.instance_index = 0;
    return d;
}

std::vector<double> plateau_column(int length, const PlateauParams& p) {
    std::vector<double> col(static_cast<std::size_t>(length));
    for (int x = 0; x < length; ++x) col[static_cast<std::size_t>(x)] = eval_plateau(x, p);
    return col;
}

} // namespace

TEST_CASE("connected_components enumerates runs above the threshold") {
    const std::vector<double> scores{0.2, 0.6, 0.7, 0.1, 0.8, 0.9, 0.85};
    const auto runs = connected_components(scores, 0.5, 2);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0] == FrameInterval{1, 2});
    CHECK(runs[1] == FrameInterval{4, 6});

    CHECK(connected_components(scores, 0.95, 1).empty());
    // A 10-frame run dies against the 15-frame minimum.
    std::vector<double> ten(30, 0.0);
    for (int x = 5; x < 15; ++x) ten[static_cast<std::size_t>(x)] = 0.9;
    CHECK(connected_components(ten, 0.5, 15).empty());
    CHECK(connected_components(ten, 0.5, 10).size() == 1);
}

TEST_CASE("fit_plateau recovers a clean plateau") {
    const PlateauParams truth{50.0, 10.0, 0.5};
    const auto column = plateau_column(200, truth);
    const FrameInterval support = plateau_support(truth, 0.5, 200);
    const FitResult fit = fit_plateau(column, support, 0.75);
    CHECK(!fit.used_fallback);
    CHECK(std::abs(fit.params.center - truth.center) <= 2.0);
    CHECK(std::abs(fit.params.half_width - truth.half_width) <= 0.1 * truth.half_width);
    CHECK(fit.residual < 1e-3);
}

TEST_CASE("fit_plateau centers a constant block") {
    std::vector<double> column(100, 0.0);
    for (int x = 20; x <= 40; ++x) column[static_cast<std::size_t>(x)] = 1.0;
    const FitResult fit = fit_plateau(column, {20, 40}, 0.75);
    CHECK(std::abs(fit.params.center - 30.0) <= 1.0);
}

TEST_CASE("fit_plateau falls back on degenerate intervals") {
    std::vector<double> column(50, 0.0);
    column[25] = 1.0;
    const FitResult fit = fit_plateau(column, {25, 25}, 0.75);
    CHECK(fit.used_fallback);
    CHECK(fit.params.center == doctest::Approx(25.0));
    CHECK(fit.params.half_width == doctest::Approx(1.0));  // floored init width
    CHECK(fit.params.steepness == doctest::Approx(0.75));

    CHECK_THROWS_AS(fit_plateau(column, {}, 0.75), EmptyInterval);
    CHECK_THROWS_AS(fit_plateau(column, {40, 60}, 0.75), EmptyInterval);
}

TEST_CASE("score_plateau averages the enclosed scores") {
    std::vector<double> column(100, 0.0);
    for (int x = 10; x <= 20; ++x) column[static_cast<std::size_t>(x)] = 0.4;
    CHECK(score_plateau({15.0, 4.0, 5.0}, column) == doctest::Approx(0.4).epsilon(1e-12));

    // Empty support scores zero by definition.
    CHECK(score_plateau({-500.0, 5.0, 1.0}, column) == 0.0);

    std::vector<double> three(50, 0.0);
    three[5] = 0.1;
    three[6] = 0.2;
    three[7] = 0.6;
    const double rho = score_plateau({6.0, 1.4, 8.0}, three);  // support {5,6,7}
    CHECK(rho == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("generate_proposals respects the ordering constraint") {
    RefineConfig cfg;
    cfg.min_component = 5;
    const PlateauParams planted{60.0, 12.0, 0.9};
    const auto matrix = single_class_matrix(plateau_column(200, planted));
    const auto dist = distribution_at(40.0);

    SUBCASE("a clean plateau inside the window yields proposals near it") {
        const auto proposals = generate_proposals(matrix, dist, 0, -1.0, 200.0, cfg);
        REQUIRE(!proposals.empty());
        const FrameInterval support = plateau_support(planted, 0.5, 200);
        for (const auto& p : proposals) {
            CHECK(p.candidate.center >= support.first - 1);
            CHECK(p.candidate.center <= support.last + 1);
        }
    }
    SUBCASE("responses beyond the next neighbour are discarded") {
        const auto proposals = generate_proposals(matrix, dist, 0, -1.0, 30.0, cfg);
        CHECK(proposals.empty());
    }
    SUBCASE("responses before the previous neighbour are discarded") {
        const auto proposals = generate_proposals(matrix, dist, 0, 100.0, 200.0, cfg);
        CHECK(proposals.empty());
    }
}

TEST_CASE("select_best picks the highest positive confidence") {
    std::vector<double> column(100, 0.0);
    for (int x = 10; x <= 30; ++x) column[static_cast<std::size_t>(x)] = 0.2;
    for (int x = 60; x <= 80; ++x) column[static_cast<std::size_t>(x)] = 0.9;
    const PlateauParams current{20.0, 8.0, 1.0};  // sits on the 0.2 block

    UpdateProposal weak;
    weak.candidate = {20.0, 9.0, 1.0};  // still on the 0.2 block
    UpdateProposal strong;
    strong.candidate = {70.0, 8.0, 1.0};  // on the 0.9 block

    const auto best = select_best({weak, strong}, current, column);
    REQUIRE(best.has_value());
    CHECK(best->candidate.center == 70.0);
    CHECK(best->confidence == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(best->confidence ==
          doctest::Approx(best->candidate_score - best->current_score).epsilon(1e-12));

    // All-nonpositive confidences yield no selection.
    UpdateProposal off;
    off.candidate = {45.0, 3.0, 1.0};  // support on zeros
    const auto none = select_best({off}, current, column);
    CHECK(!none.has_value());
}

TEST_CASE("global_top_fraction keeps the ceiling of the confident prefix") {
    std::vector<UpdateProposal> pool(8);
    for (int i = 0; i < 8; ++i) {
        pool[static_cast<std::size_t>(i)].confidence = 0.1 * (i + 1);
        pool[static_cast<std::size_t>(i)].video_id = "v";
        pool[static_cast<std::size_t>(i)].instance_index = i;
    }
    const auto kept = global_top_fraction(pool, 0.25);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].confidence == doctest::Approx(0.8));
    CHECK(kept[1].confidence == doctest::Approx(0.7));

    const auto whole = global_top_fraction(pool, 1.0);
    CHECK(whole.size() == 8);
    for (std::size_t i = 1; i < whole.size(); ++i)
        CHECK(whole[i - 1].confidence >= whole[i].confidence);
}

TEST_CASE("apply_update interpolates and clamps") {
    const PlateauParams updated =
        apply_update({100.0, 45.0, 0.75}, {120.0, 30.0, 1.0}, {0.5, 0.25, 0.25}, 1000);
    CHECK(updated.center == doctest::Approx(110.0).epsilon(1e-12));
    CHECK(updated.half_width == doctest::Approx(41.25).epsilon(1e-12));
    CHECK(updated.steepness == doctest::Approx(0.8125).epsilon(1e-12));

    const PlateauParams frozen =
        apply_update({100.0, 45.0, 0.75}, {120.0, 30.0, 1.0}, {0.0, 0.0, 0.0}, 1000);
    CHECK(frozen == PlateauParams{100.0, 45.0, 0.75});

    const PlateauParams jumped =
        apply_update({100.0, 45.0, 0.75}, {120.0, 30.0, 1.0}, {1.0, 1.0, 1.0}, 1000);
    CHECK(jumped == PlateauParams{120.0, 30.0, 1.0});

    // Clamping and floors.
    const PlateauParams clamped =
        apply_update({5.0, 2.0, 0.5}, {-50.0, 0.1, 1e-9}, {1.0, 1.0, 1.0}, 100);
    CHECK(clamped.center == 0.0);
    CHECK(clamped.half_width == 1.0);
    CHECK(clamped.steepness == 1e-3);
}

TEST_CASE("updated parameters stay inside the convex hull before clamping") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const PlateauParams current{rng.normal(100.0, 40.0), 2.0 + 40.0 * rng.next_double(),
                                    0.1 + rng.next_double()};
        const PlateauParams proposal{rng.normal(100.0, 40.0), 2.0 + 40.0 * rng.next_double(),
                                     0.1 + rng.next_double()};
        const UpdateRates rates{rng.next_double(), rng.next_double(), rng.next_double()};
        const PlateauParams next = apply_update(current, proposal, rates, 100000);
        CHECK(next.center >= std::min(current.center, proposal.center) - 1e-12);
        CHECK(next.center <= std::max(current.center, proposal.center) + 1e-12);
        CHECK(next.half_width >= std::min(current.half_width, proposal.half_width) - 1e-12);
        CHECK(next.half_width <= std::max(current.half_width, proposal.half_width) + 1e-12);
        CHECK(next.steepness >= std::min(current.steepness, proposal.steepness) - 1e-12);
        CHECK(next.steepness <= std::max(current.steepness, proposal.steepness) + 1e-12);
    }
}

TEST_CASE("run_update_round applies only confident winners and leaves the rest intact") {
    // Video with two instances of class 0: one sits on a weak response, the
    // other is already aligned with a strong response.
    const int length = 300;
    Dataset dataset;
    dataset.num_classes = 1;
    dataset.feature_dim = 1;
    VideoStream video;
    video.video_id = "train_0";
    video.length = length;
    video.feature_dim = 1;
    video.features.resize(static_cast<std::size_t>(length), 0.0f);
    dataset.train_videos.push_back(std::move(video));

    std::vector<double> column(static_cast<std::size_t>(length), 0.0);
    for (int x = 80; x <= 130; ++x) column[static_cast<std::size_t>(x)] = 0.95;

    std::vector<ScoreMatrix> scores{single_class_matrix(column)};

    std::vector<SamplingDistribution> dists;
    dists.push_back(distribution_at(40.0, 15.0, 0.75));   // left of the response
    dists.back().instance_index = 0;
    dists.push_back(distribution_at(200.0, 25.0, 0.75));  // right of the response
    dists.back().instance_index = 1;

    RefineConfig cfg;
    const auto before_second = dists[1].params;
    const UpdateRoundResult round = run_update_round(dists, scores, dataset, cfg);

    // Both instances propose the same response block with equal confidence;
    // the tie breaks to the lower instance index and ceil(0.25*2) = 1 applies.
    CHECK(round.num_selected == 2);
    CHECK(round.num_applied == 1);
    for (const auto& record : round.applied) CHECK(record.confidence > 0.0);
    CHECK(round.mean_confidence > 0.0);

    // The winner relaxed halfway toward the fitted center (~105).
    CHECK(dists[0].params.center > 60.0);
    CHECK(dists[0].params.center < 80.0);
    // The distribution without an applied update is bit-identical.
    CHECK(dists[1].params == before_second);
}
