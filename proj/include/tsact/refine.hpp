#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsact/classifier.hpp"
#include "tsact/plateau.hpp"

namespace tsact {

// Per-parameter update velocities for the relaxation step.
struct UpdateRates {
    double center = 0.5;
    double width = 0.25;
    double steepness = 0.25;
};

struct RefineConfig {
    std::vector<double> threshold_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int min_component = 15;       // connected components shorter than this are discarded
    double update_fraction = 0.25;  // share of selected proposals applied per round
    UpdateRates rates;
    int update_period = 20;       // epochs between update rounds
    double default_steepness = 0.75;  // fit initialisation / fallback

    void validate() const;
};

// A candidate replacement for one sampling distribution's parameters, with
// the confidence bookkeeping filled in by select_best.
struct UpdateProposal {
    PlateauParams candidate;
    int target = 0;  // index into the distribution list
    std::string video_id;
    int instance_index = 0;
    double confidence = 0.0;       // candidate_score - current_score
    double candidate_score = 0.0;  // mean enclosed softmax of the candidate
    double current_score = 0.0;    // mean enclosed softmax of the distribution
};

/// Maximal runs of consecutive frames with score strictly above the
/// threshold, filtered to length >= min_len, sorted by start.
std::vector<FrameInterval> connected_components(std::span<const double> class_scores,
                                                double threshold, int min_len);

struct FitResult {
    PlateauParams params;
    bool used_fallback = false;
    double residual = 0.0;  // final sum of squared errors over the fit window
};

/// Least-squares fit of the plateau shape to the score column over the
/// interval extended by 50% on each side (clamped to the video). Plain
/// gradient descent from (midpoint, half frame count, default steepness),
/// at most 200 iterations, step 1e-2 halved on non-decrease, stopping once
/// the objective improves by less than 1e-8. Falls back to the
/// initialisation triple (width floored at 1) when the fit yields
/// half_width <= 1 or steepness <= 1e-3.
FitResult fit_plateau(std::span<const double> class_scores, FrameInterval interval,
                      double default_steepness);

/// Mean class score over the frames enclosed by the plateau (support at
/// threshold 0.5); zero when the support is empty.
double score_plateau(const PlateauParams& params, std::span<const double> class_scores);

/// Sweeps the threshold grid over the distribution's class column, fits every
/// surviving connected component once (identical intervals reached at several
/// thresholds are fitted once) and keeps candidates whose center respects the
/// neighbour ordering center_prev < c < center_next.
std::vector<UpdateProposal> generate_proposals(const ScoreMatrix& scores,
                                               const SamplingDistribution& distribution,
                                               int target_index, double center_prev,
                                               double center_next, const RefineConfig& cfg);

/// Fills the confidence of each proposal against the current parameters,
/// drops nonpositive-confidence proposals and returns the most confident one
/// (ties: smaller center shift, then smaller center). Empty optional when no
/// proposal survives.
std::optional<UpdateProposal> select_best(std::vector<UpdateProposal> proposals,
                                          const PlateauParams& current,
                                          std::span<const double> class_scores);

/// Global curriculum over the selected proposals: sort by confidence
/// descending (ties by (video_id, instance_index) ascending) and keep the
/// first ceil(fraction * count).
std::vector<UpdateProposal> global_top_fraction(std::vector<UpdateProposal> selected,
                                                double fraction);

/// Componentwise relaxation toward the proposal, then clamp the center into
/// the video and floor width at 1 frame and steepness at 1e-3.
PlateauParams apply_update(const PlateauParams& current, const PlateauParams& proposal,
                           const UpdateRates& rates, int video_length);

// One applied update, as logged in the update trace.
struct UpdateRecord {
    int epoch = 0;
    std::string video_id;
    int instance_index = 0;
    PlateauParams before;
    PlateauParams proposal;
    double confidence = 0.0;
};

struct UpdateRoundResult {
    double mean_confidence = 0.0;  // over all selected proposals (before top-R)
    int num_selected = 0;
    int num_applied = 0;
    std::vector<UpdateRecord> applied;  // epoch left to the caller
    int num_inversions = 0;  // center-order inversions detected after the round
};

/// One full update round: per-distribution proposal generation under the
/// start-of-round neighbour centers, best-proposal selection, global top-R
/// and simultaneous application. Distributions are modified in place.
UpdateRoundResult run_update_round(std::vector<SamplingDistribution>& distributions,
                                   const std::vector<ScoreMatrix>& scores_by_video,
                                   const Dataset& dataset, const RefineConfig& cfg);

} // namespace tsact
