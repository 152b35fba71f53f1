#include "tsact/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace tsact {

namespace {

// Fixed constants so that evaluation of a checkpoint is reproducible without
// carrying the training configuration.
constexpr std::uint64_t kEvalPoolSeed = 0x5eede0a1;
constexpr int kEvalFramesPerInstance = 5;

int predict_instance(const ClassifierInterface& model, const VideoStream& instance,
                     int frames_per_test) {
    const GroundTruthSegment& seg = instance.gt_segments.front();
    const int len = seg.end - seg.start;
    if (len <= 0) throw EmptySegment("test instance " + instance.video_id + " has no frames");
    std::vector<double> mean(static_cast<std::size_t>(model.num_classes()), 0.0);
    for (int j = 0; j < frames_per_test; ++j) {
        // Centered uniform spacing; shorter segments repeat frames.
        const int offset = static_cast<int>(
            (2ll * j + 1) * static_cast<long long>(len) / (2ll * frames_per_test));
        const std::vector<double> p =
            model.predict(instance.frame(seg.start + std::min(offset, len - 1)));
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p[k];
    }
    int best = 0;
    for (std::size_t k = 1; k < mean.size(); ++k)
        if (mean[k] > mean[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    return best;
}

} // namespace

double top1_accuracy(const ClassifierInterface& model,
                     const std::vector<VideoStream>& test_instances, int frames_per_test) {
    if (test_instances.empty()) throw EmptySegment("no test instances");
    if (frames_per_test < 1) throw Error("frames_per_test must be >= 1");
    int correct = 0;
    for (const VideoStream& instance : test_instances) {
        if (instance.gt_segments.size() != 1)
            throw EmptySegment("test instance " + instance.video_id +
                               " must carry exactly one segment");
        if (predict_instance(model, instance, frames_per_test) ==
            instance.gt_segments.front().class_label)
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_instances.size());
}

void per_class_accuracy(const ClassifierInterface& model,
                        const std::vector<VideoStream>& test_instances, int frames_per_test,
                        std::vector<double>& accuracy, std::vector<int>& count) {
    const std::size_t k = static_cast<std::size_t>(model.num_classes());
    accuracy.assign(k, 0.0);
    count.assign(k, 0);
    std::vector<int> correct(k, 0);
    for (const VideoStream& instance : test_instances) {
        const int label = instance.gt_segments.front().class_label;
        ++count[static_cast<std::size_t>(label)];
        if (predict_instance(model, instance, frames_per_test) == label)
            ++correct[static_cast<std::size_t>(label)];
    }
    for (std::size_t i = 0; i < k; ++i)
        accuracy[i] = count[i] > 0 ? static_cast<double>(correct[i]) / count[i] : 0.0;
}

double interval_iou(FrameInterval a, FrameInterval b) {
    if (a.empty() || b.empty()) return 0.0;
    const int inter_first = std::max(a.first, b.first);
    const int inter_last = std::min(a.last, b.last);
    const int intersection = std::max(0, inter_last - inter_first + 1);
    const int uni = std::max(a.last, b.last) - std::min(a.first, b.first) + 1;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

AlignmentStats plateau_alignment_snapshot(const std::vector<SamplingDistribution>& distributions,
                                          const std::vector<PlateauParams>& snapshot,
                                          const Dataset& dataset) {
    if (snapshot.size() != distributions.size())
        throw CountMismatch("snapshot size does not match the distribution count");

    std::map<int, std::vector<std::size_t>> by_video;
    for (std::size_t d = 0; d < distributions.size(); ++d)
        by_video[distributions[d].video_index].push_back(d);

    double iou_total = 0.0;
    double dist_total = 0.0;
    std::size_t instances = 0;
    for (auto& [video_index, members] : by_video) {
        const VideoStream& video = dataset.train_videos.at(static_cast<std::size_t>(video_index));
        if (members.size() != video.gt_segments.size())
            throw CountMismatch("video " + video.video_id + " has " +
                                std::to_string(members.size()) + " distributions but " +
                                std::to_string(video.gt_segments.size()) + " segments");
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return distributions[a].instance_index < distributions[b].instance_index;
        });
        for (std::size_t i = 0; i < members.size(); ++i) {
            const PlateauParams& params = snapshot[members[i]];
            const GroundTruthSegment& seg = video.gt_segments[i];
            const FrameInterval support = plateau_support(params, 0.5, video.length);
            iou_total += interval_iou(support, {seg.start, seg.end});
            dist_total += std::abs(params.center - seg.midpoint());
            ++instances;
        }
    }
    if (instances == 0) throw CountMismatch("no instances to align");
    return {iou_total / static_cast<double>(instances),
            dist_total / static_cast<double>(instances)};
}

AlignmentStats plateau_alignment(const std::vector<SamplingDistribution>& distributions,
                                 const Dataset& dataset) {
    std::vector<PlateauParams> current;
    current.reserve(distributions.size());
    for (const auto& d : distributions) current.push_back(d.params);
    return plateau_alignment_snapshot(distributions, current, dataset);
}

double in_gt_fraction(const std::vector<SampledFrame>& frames, const Dataset& dataset) {
    if (frames.empty()) return 0.0;
    std::size_t inside = 0;
    for (const SampledFrame& f : frames) {
        const VideoStream& video = dataset.train_videos.at(static_cast<std::size_t>(f.video_index));
        for (const GroundTruthSegment& seg : video.gt_segments) {
            if (seg.class_label == f.class_label && f.frame >= seg.start && f.frame < seg.end) {
                ++inside;
                break;
            }
        }
    }
    return static_cast<double>(inside) / static_cast<double>(frames.size());
}

void write_confidence_csv(const std::vector<ConfidencePoint>& history,
                          const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "epoch,mean_confidence,updates_applied\n";
    for (const auto& p : history)
        out << p.epoch << "," << format_double(p.mean_confidence) << "," << p.updates_applied
            << "\n";
    if (!out.flush()) throw Error("failed writing " + path.string());
}

void write_loss_csv(const std::vector<LossPoint>& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "epoch,loss\n";
    for (const auto& p : history) out << p.epoch << "," << format_double(p.loss) << "\n";
    if (!out.flush()) throw Error("failed writing " + path.string());
}

void write_update_trace_csv(const std::vector<UpdateRecord>& trace,
                            const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "epoch,video_id,instance_index,old_center,old_half_width,old_steepness,"
           "proposal_center,proposal_half_width,proposal_steepness,confidence\n";
    for (const auto& r : trace) {
        out << r.epoch << "," << r.video_id << "," << r.instance_index << ","
            << format_double(r.before.center) << "," << format_double(r.before.half_width) << ","
            << format_double(r.before.steepness) << "," << format_double(r.proposal.center) << ","
            << format_double(r.proposal.half_width) << "," << format_double(r.proposal.steepness)
            << "," << format_double(r.confidence) << "\n";
    }
    if (!out.flush()) throw Error("failed writing " + path.string());
}

void emit_report(const TrainState& state, const Dataset& dataset,
                 const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    const bool has_distributions = !state.distributions.empty();
    write_loss_csv(state.loss_history, out_dir / "loss.csv");
    if (state.mode != SupervisionMode::kFull) {
        write_confidence_csv(state.confidence_history, out_dir / "confidence.csv");
        write_update_trace_csv(state.update_trace, out_dir / "update_trace.csv");
    }

    // Alignment trajectory over update rounds (snapshot 0 is the initial /
    // before-update state).
    if (has_distributions) {
        std::ofstream out(out_dir / "alignment.csv");
        if (!out) throw Error("cannot open alignment.csv for writing");
        out << "round,mean_iou,mean_center_distance\n";
        for (std::size_t r = 0; r < state.distribution_snapshots.size(); ++r) {
            const AlignmentStats stats = plateau_alignment_snapshot(
                state.distributions, state.distribution_snapshots[r], dataset);
            out << r << "," << format_double(stats.mean_iou) << ","
                << format_double(stats.mean_center_distance) << "\n";
        }
        if (!out.flush()) throw Error("failed writing alignment.csv");
    }

    std::ofstream report(out_dir / "report.txt");
    if (!report) throw Error("cannot open report.txt for writing");
    report << "mode = " << to_string(state.mode) << "\n";
    report << "epochs_completed = " << state.epoch << "\n";

    const double accuracy = top1_accuracy(state.model, dataset.test_videos);
    report << "top1_accuracy = " << format_double(accuracy) << "\n";
    if (state.base_model) {
        report << "top1_accuracy_before_update = "
               << format_double(top1_accuracy(*state.base_model, dataset.test_videos)) << "\n";
        report << "top1_accuracy_after_update = " << format_double(accuracy) << "\n";
    }

    std::vector<double> class_acc;
    std::vector<int> class_count;
    per_class_accuracy(state.model, dataset.test_videos, 10, class_acc, class_count);
    report << "per_class_accuracy =";
    for (double a : class_acc) report << " " << format_double(a);
    report << "\n";
    report << "per_class_test_count =";
    for (int c : class_count) report << " " << c;
    report << "\n";

    if (has_distributions) {
        const AlignmentStats after = plateau_alignment(state.distributions, dataset);
        report << "mean_plateau_iou = " << format_double(after.mean_iou) << "\n";
        report << "mean_center_distance = " << format_double(after.mean_center_distance) << "\n";
        if (!state.distribution_snapshots.empty()) {
            const AlignmentStats before = plateau_alignment_snapshot(
                state.distributions, state.distribution_snapshots.front(), dataset);
            report << "mean_plateau_iou_before_update = " << format_double(before.mean_iou)
                   << "\n";
            report << "mean_center_distance_before_update = "
                   << format_double(before.mean_center_distance) << "\n";
        }

        Rng pool_rng(kEvalPoolSeed);
        const std::vector<SampledFrame> pool =
            sample_pool(state.distributions, dataset, kEvalFramesPerInstance, pool_rng);
        report << "in_gt_sampled_fraction = " << format_double(in_gt_fraction(pool, dataset))
               << "\n";
    }

    if (state.mode != SupervisionMode::kFull) {
        report << "confidence_history = confidence.csv\n";
        report << "update_rounds = " << state.confidence_history.size() << "\n";
        report << "updates_total = " << state.update_trace.size() << "\n";
        report << "center_order_inversions = " << state.inversion_count << "\n";
    }
    if (!report.flush()) throw Error("failed writing report.txt");
}

} // namespace tsact
