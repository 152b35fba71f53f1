#include "tsact/refine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

namespace tsact {

void RefineConfig::validate() const {
    if (threshold_grid.empty()) throw ConfigError("threshold grid must not be empty");
    for (double t : threshold_grid)
        if (!(t > 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in (0, 1]");
    if (min_component < 1) throw ConfigError("min_component must be >= 1");
    if (!(update_fraction > 0.0 && update_fraction <= 1.0))
        throw ConfigError("update_fraction must lie in (0, 1]");
    for (double r : {rates.center, rates.width, rates.steepness})
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("update rates must lie in [0, 1]");
    if (update_period < 1) throw ConfigError("update_period must be >= 1");
    if (default_steepness <= 0) throw ConfigError("default_steepness must be positive");
}

std::vector<FrameInterval> connected_components(std::span<const double> class_scores,
                                                double threshold, int min_len) {
    std::vector<FrameInterval> components;
    const int n = static_cast<int>(class_scores.size());
    int i = 0;
    while (i < n) {
        if (class_scores[static_cast<std::size_t>(i)] > threshold) {
            int j = i;
            while (j + 1 < n && class_scores[static_cast<std::size_t>(j + 1)] > threshold) ++j;
            if (j - i + 1 >= min_len) components.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return components;
}

namespace {

struct Objective {
    std::span<const double> scores;
    int window_first = 0;
    int window_last = 0;

    double value(const PlateauParams& p) const {
        double total = 0.0;
        for (int x = window_first; x <= window_last; ++x) {
            const double r = eval_plateau(x, p) - scores[static_cast<std::size_t>(x)];
            total += r * r;
        }
        return total;
    }

    // Analytic gradient of the squared residual sum w.r.t. (c, w, s).
    std::array<double, 3> gradient(const PlateauParams& p) const {
        std::array<double, 3> g{0.0, 0.0, 0.0};
        for (int x = window_first; x <= window_last; ++x) {
            const double rising = p.steepness * (x - p.center + p.half_width);
            const double falling = p.steepness * (p.center + p.half_width - x);
            const double sr = sigmoid(rising);
            const double sf = sigmoid(falling);
            const double dr = sr * (1.0 - sr);
            const double df = sf * (1.0 - sf);
            const double residual = 2.0 * (sr * sf - scores[static_cast<std::size_t>(x)]);
            g[0] += residual * p.steepness * (sr * df - dr * sf);
            g[1] += residual * p.steepness * (sr * df + dr * sf);
            g[2] += residual *
                    (dr * sf * (x - p.center + p.half_width) +
                     sr * df * (p.center + p.half_width - x));
        }
        return g;
    }

    static double sigmoid(double t) {
        if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
        const double e = std::exp(t);
        return e / (1.0 + e);
    }
};

} // namespace

FitResult fit_plateau(std::span<const double> class_scores, FrameInterval interval,
                      double default_steepness) {
    if (interval.empty()) throw EmptyInterval("fit_plateau: empty interval");
    const int n = static_cast<int>(class_scores.size());
    if (interval.first < 0 || interval.last >= n)
        throw EmptyInterval("fit_plateau: interval outside the score vector");

    const int len = interval.length();
    const int extension = (len + 1) / 2;
    Objective obj{class_scores, std::max(0, interval.first - extension),
                  std::min(n - 1, interval.last + extension)};

    const PlateauParams init{(interval.first + interval.last) / 2.0, len / 2.0,
                             default_steepness};
    PlateauParams params = init;
    double best = obj.value(params);
    const double initial = best;
    double step = 1e-2;

    for (int iter = 0; iter < 200; ++iter) {
        const auto grad = obj.gradient(params);
        const PlateauParams candidate{params.center - step * grad[0],
                                      params.half_width - step * grad[1],
                                      params.steepness - step * grad[2]};
        const double value = obj.value(candidate);
        if (std::isfinite(value) && value < best) {
            const double improvement = best - value;
            params = candidate;
            best = value;
            if (improvement < 1e-8) break;
            step = std::min(step * 2.0, 1.0);  // accelerate while steps keep working
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }

    if (!std::isfinite(best) || best > initial || params.half_width <= 1.0 ||
        params.steepness <= 1e-3) {
        PlateauParams fallback = init;
        fallback.half_width = std::max(fallback.half_width, 1.0);
        return {fallback, true, obj.value(fallback)};
    }
    return {params, false, best};
}

double score_plateau(const PlateauParams& params, std::span<const double> class_scores) {
    const FrameInterval support =
        plateau_support(params, 0.5, static_cast<int>(class_scores.size()));
    if (support.empty()) return 0.0;
    double total = 0.0;
    for (int x = support.first; x <= support.last; ++x)
        total += class_scores[static_cast<std::size_t>(x)];
    return total / support.length();
}

std::vector<UpdateProposal> generate_proposals(const ScoreMatrix& scores,
                                               const SamplingDistribution& distribution,
                                               int target_index, double center_prev,
                                               double center_next, const RefineConfig& cfg) {
    const std::vector<double> column = scores.class_column(distribution.class_label);
    std::vector<UpdateProposal> proposals;
    std::set<std::pair<int, int>> fitted;  // intervals already fitted across thresholds
    for (double threshold : cfg.threshold_grid) {
        for (const FrameInterval& component :
             connected_components(column, threshold, cfg.min_component)) {
            if (!fitted.insert({component.first, component.last}).second) continue;
            FitResult fit = fit_plateau(column, component, cfg.default_steepness);
            fit.params.center = clamp_center(fit.params.center, scores.num_frames);
            if (!(center_prev < fit.params.center && fit.params.center < center_next)) continue;
            UpdateProposal proposal;
            proposal.candidate = fit.params;
            proposal.target = target_index;
            proposal.video_id = distribution.video_id;
            proposal.instance_index = distribution.instance_index;
            proposals.push_back(std::move(proposal));
        }
    }
    return proposals;
}

std::optional<UpdateProposal> select_best(std::vector<UpdateProposal> proposals,
                                          const PlateauParams& current,
                                          std::span<const double> class_scores) {
    const double current_score = score_plateau(current, class_scores);
    std::optional<UpdateProposal> best;
    for (UpdateProposal& p : proposals) {
        p.current_score = current_score;
        p.candidate_score = score_plateau(p.candidate, class_scores);
        p.confidence = p.candidate_score - p.current_score;
        if (!(p.confidence > 0.0)) continue;
        if (!best) {
            best = p;
            continue;
        }
        const double shift = std::abs(p.candidate.center - current.center);
        const double best_shift = std::abs(best->candidate.center - current.center);
        if (p.confidence > best->confidence ||
            (p.confidence == best->confidence &&
             (shift < best_shift ||
              (shift == best_shift && p.candidate.center < best->candidate.center)))) {
            best = p;
        }
    }
    return best;
}

std::vector<UpdateProposal> global_top_fraction(std::vector<UpdateProposal> selected,
                                                double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("fraction must lie in (0, 1]");
    std::stable_sort(selected.begin(), selected.end(),
                     [](const UpdateProposal& a, const UpdateProposal& b) {
                         if (a.confidence != b.confidence) return a.confidence > b.confidence;
                         if (a.video_id != b.video_id) return a.video_id < b.video_id;
                         return a.instance_index < b.instance_index;
                     });
    const auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(selected.size()) - 1e-12));
    selected.resize(std::min(keep, selected.size()));
    return selected;
}

PlateauParams apply_update(const PlateauParams& current, const PlateauParams& proposal,
                           const UpdateRates& rates, int video_length) {
    PlateauParams next;
    next.center = current.center - rates.center * (current.center - proposal.center);
    next.half_width =
        current.half_width - rates.width * (current.half_width - proposal.half_width);
    next.steepness =
        current.steepness - rates.steepness * (current.steepness - proposal.steepness);
    next.center = clamp_center(next.center, video_length);
    next.half_width = std::max(next.half_width, 1.0);
    next.steepness = std::max(next.steepness, 1e-3);
    return next;
}

UpdateRoundResult run_update_round(std::vector<SamplingDistribution>& distributions,
                                   const std::vector<ScoreMatrix>& scores_by_video,
                                   const Dataset& dataset, const RefineConfig& cfg) {
    cfg.validate();

    // Group distribution indices per video, ordered by instance_index.
    std::map<int, std::vector<int>> by_video;
    for (std::size_t d = 0; d < distributions.size(); ++d)
        by_video[distributions[d].video_index].push_back(static_cast<int>(d));
    for (auto& [video, members] : by_video) {
        std::sort(members.begin(), members.end(), [&](int a, int b) {
            return distributions[static_cast<std::size_t>(a)].instance_index <
                   distributions[static_cast<std::size_t>(b)].instance_index;
        });
    }

    // Neighbour centers are read once at the start of the round and held
    // fixed; all updates are applied simultaneously afterwards.
    std::vector<double> start_centers(distributions.size());
    for (std::size_t d = 0; d < distributions.size(); ++d)
        start_centers[d] = distributions[d].params.center;

    UpdateRoundResult result;
    std::vector<UpdateProposal> selected;
    for (const auto& [video_index, members] : by_video) {
        const ScoreMatrix& scores = scores_by_video.at(static_cast<std::size_t>(video_index));
        const int video_length = scores.num_frames;
        for (std::size_t pos = 0; pos < members.size(); ++pos) {
            const int d = members[pos];
            const SamplingDistribution& dist = distributions[static_cast<std::size_t>(d)];
            const double center_prev =
                pos > 0 ? start_centers[static_cast<std::size_t>(members[pos - 1])] : -1.0;
            const double center_next = pos + 1 < members.size()
                                           ? start_centers[static_cast<std::size_t>(members[pos + 1])]
                                           : static_cast<double>(video_length);
            std::vector<UpdateProposal> proposals =
                generate_proposals(scores, dist, d, center_prev, center_next, cfg);
            const std::vector<double> column = scores.class_column(dist.class_label);
            if (auto best = select_best(std::move(proposals), dist.params, column))
                selected.push_back(std::move(*best));
        }
    }

    result.num_selected = static_cast<int>(selected.size());
    if (!selected.empty()) {
        double sum = 0.0;
        for (const auto& p : selected) sum += p.confidence;
        result.mean_confidence = sum / static_cast<double>(selected.size());
    }

    const std::vector<UpdateProposal> winners =
        global_top_fraction(std::move(selected), cfg.update_fraction);
    result.num_applied = static_cast<int>(winners.size());
    for (const UpdateProposal& p : winners) {
        SamplingDistribution& dist = distributions[static_cast<std::size_t>(p.target)];
        const int video_length =
            dataset.train_videos.at(static_cast<std::size_t>(dist.video_index)).length;
        UpdateRecord record;
        record.video_id = dist.video_id;
        record.instance_index = dist.instance_index;
        record.before = dist.params;
        record.proposal = p.candidate;
        record.confidence = p.confidence;
        dist.params = apply_update(dist.params, p.candidate, cfg.rates, video_length);
        result.applied.push_back(std::move(record));
    }

    // Simultaneous updates of adjacent instances can reorder centers even
    // though each proposal respected the ordering constraint; count them so
    // the caller can log.
    for (const auto& [video_index, members] : by_video) {
        for (std::size_t pos = 1; pos < members.size(); ++pos) {
            const double prev =
                distributions[static_cast<std::size_t>(members[pos - 1])].params.center;
            const double cur = distributions[static_cast<std::size_t>(members[pos])].params.center;
            if (prev > cur) ++result.num_inversions;
        }
    }
    return result;
}

} // namespace tsact
