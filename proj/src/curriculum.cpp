#include "tsact/curriculum.hpp"

#include <algorithm>
#include <cmath>

namespace tsact {

double CurriculumSchedule::keep_fraction_at(int epoch) const {
    double h = base_keep_fraction;
    for (const auto& [from_epoch, value] : ramp) {
        if (epoch >= from_epoch) h = value;
    }
    return h;
}

void CurriculumSchedule::validate() const {
    if (!(base_keep_fraction > 0.0 && base_keep_fraction <= 1.0))
        throw ConfigError("curriculum base fraction must be in (0, 1]");
    double prev = base_keep_fraction;
    int prev_epoch = -1;
    for (const auto& [epoch, value] : ramp) {
        if (epoch <= prev_epoch) throw ConfigError("curriculum ramp epochs must increase");
        if (value + 1e-12 < prev) throw ConfigError("curriculum ramp must be nondecreasing");
        if (value > 1.0) throw ConfigError("curriculum fraction cannot exceed 1");
        prev = value;
        prev_epoch = epoch;
    }
    if (std::abs(prev - 1.0) > 1e-12) throw ConfigError("curriculum ramp must end at 1");
}

CurriculumSchedule make_default_schedule(double base_keep_fraction, int base_epochs,
                                         int update_epochs) {
    CurriculumSchedule schedule;
    schedule.base_keep_fraction = base_keep_fraction;
    if (update_epochs <= 0) {
        if (base_keep_fraction < 1.0) schedule.ramp.push_back({base_epochs, 1.0});
        schedule.validate();
        return schedule;
    }
    const int quarter = std::max(1, update_epochs / 4);
    double h = base_keep_fraction;
    int step = 1;
    while (h < 1.0) {
        h = std::min(1.0, h + 0.25);
        schedule.ramp.push_back({base_epochs + step * quarter, h});
        ++step;
    }
    if (schedule.ramp.empty() || schedule.ramp.back().second < 1.0)
        schedule.ramp.push_back({base_epochs + step * quarter, 1.0});
    schedule.validate();
    return schedule;
}

std::vector<SampledFrame> sample_pool(const std::vector<SamplingDistribution>& distributions,
                                      const Dataset& dataset, int frames_per_instance, Rng& rng) {
    if (frames_per_instance < 1) throw Error("frames_per_instance must be >= 1");
    std::vector<SampledFrame> pool;
    pool.reserve(distributions.size() * static_cast<std::size_t>(frames_per_instance));
    for (std::size_t d = 0; d < distributions.size(); ++d) {
        const SamplingDistribution& dist = distributions[d];
        const VideoStream& video = dataset.train_videos.at(static_cast<std::size_t>(dist.video_index));
        std::vector<double> pmf;
        try {
            pmf = normalize_to_pmf(dist.params, video.length);
        } catch (const DegenerateDistribution& e) {
            throw DegenerateDistribution(std::string(e.what()) + " [video " + dist.video_id +
                                         ", instance " + std::to_string(dist.instance_index) + "]");
        }
        for (int frame : sample_frames(pmf, frames_per_instance, rng)) {
            pool.push_back({dist.video_id, dist.video_index, frame, dist.class_label,
                            static_cast<int>(d), 0.0});
        }
    }
    return pool;
}

SelectionSplit select_top_h(std::vector<SampledFrame> pool,
                            const std::vector<ScoreMatrix>& scores_by_video,
                            double keep_fraction) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw Error("keep_fraction must be in (0, 1]");
    for (SampledFrame& f : pool) {
        if (f.video_index < 0 || f.video_index >= static_cast<int>(scores_by_video.size()))
            throw MissingScores("no score matrix for video " + f.video_id);
        const ScoreMatrix& m = scores_by_video[static_cast<std::size_t>(f.video_index)];
        if (f.frame >= m.num_frames || f.class_label >= m.num_classes)
            throw MissingScores("score matrix for video " + f.video_id +
                                " does not cover frame " + std::to_string(f.frame));
        f.score = m.at(f.frame, f.class_label);
    }

    // Stable total order: score descending, then (video_id, frame, source).
    std::stable_sort(pool.begin(), pool.end(), [](const SampledFrame& a, const SampledFrame& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.video_id != b.video_id) return a.video_id < b.video_id;
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.source_distribution < b.source_distribution;
    });

    std::vector<std::size_t> per_class_count;
    for (const SampledFrame& f : pool) {
        if (f.class_label >= static_cast<int>(per_class_count.size()))
            per_class_count.resize(static_cast<std::size_t>(f.class_label) + 1, 0);
        ++per_class_count[static_cast<std::size_t>(f.class_label)];
    }
    std::vector<std::size_t> quota(per_class_count.size());
    for (std::size_t k = 0; k < quota.size(); ++k) {
        quota[k] = static_cast<std::size_t>(
            std::ceil(keep_fraction * static_cast<double>(per_class_count[k]) - 1e-12));
    }

    SelectionSplit split;
    std::vector<std::size_t> taken(per_class_count.size(), 0);
    for (const SampledFrame& f : pool) {
        auto& n = taken[static_cast<std::size_t>(f.class_label)];
        if (n < quota[static_cast<std::size_t>(f.class_label)]) {
            split.selected.push_back(f);
            ++n;
        } else {
            split.discarded.push_back(f);
        }
    }
    return split;
}

} // namespace tsact
