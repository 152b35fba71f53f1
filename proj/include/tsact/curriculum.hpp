#pragma once

#include <string>
#include <vector>

#include "tsact/classifier.hpp"
#include "tsact/plateau.hpp"
#include "tsact/synthdata.hpp"

namespace tsact {

// One candidate training frame drawn from a sampling distribution. The score
// field is filled at ranking time with P(class_label | frame).
struct SampledFrame {
    std::string video_id;
    int video_index = 0;
    int frame = 0;
    int class_label = 0;
    int source_distribution = 0;  // index into the distribution list
    double score = 0.0;
};

// Fraction of per-class candidates kept for training: base value during the
// base phase, then a nondecreasing ramp of (epoch, value) steps ending at 1.
struct CurriculumSchedule {
    double base_keep_fraction = 0.5;
    std::vector<std::pair<int, double>> ramp;  // applies from the given epoch on

    double keep_fraction_at(int epoch) const;
    void validate() const;
};

/// Default ramp: hold the base fraction through the base phase, then step by
/// +0.25 at each quarter of the update phase until reaching 1.
CurriculumSchedule make_default_schedule(double base_keep_fraction, int base_epochs,
                                         int update_epochs);

/// Draws frames_per_instance frames from every sampling distribution (via its
/// normalized plateau). Throws DegenerateDistribution naming the annotation
/// whose plateau has no mass on its video.
std::vector<SampledFrame> sample_pool(const std::vector<SamplingDistribution>& distributions,
                                      const Dataset& dataset, int frames_per_instance, Rng& rng);

struct SelectionSplit {
    std::vector<SampledFrame> selected;
    std::vector<SampledFrame> discarded;
};

/// Ranks the pool per class by the classifier score of the frame for that
/// class (descending, ties broken by (video_id, frame, source) ascending) and
/// keeps the top ceil(keep_fraction * per-class count). Scores are indexed by
/// video_index and must cover every pooled video.
SelectionSplit select_top_h(std::vector<SampledFrame> pool,
                            const std::vector<ScoreMatrix>& scores_by_video,
                            double keep_fraction);

} // namespace tsact
