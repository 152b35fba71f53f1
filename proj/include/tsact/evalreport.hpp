#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsact/classifier.hpp"
#include "tsact/curriculum.hpp"
#include "tsact/trainer.hpp"

namespace tsact {

struct EvalReport {
    double top1 = 0.0;
    std::vector<double> per_class_accuracy;  // classes with no test instances report 0
    std::vector<int> per_class_count;
    double mean_plateau_iou = 0.0;
    double mean_center_distance = 0.0;
    double in_gt_sampled_fraction = 0.0;
    std::string confidence_history_path;
};

/// Top-1 accuracy over trimmed test instances: frames_per_test uniformly
/// spaced frames per instance (repeating frames when the segment is shorter),
/// softmax averaged, argmax with smallest-class tie break. Throws
/// EmptySegment on a zero-length instance.
double top1_accuracy(const ClassifierInterface& model,
                     const std::vector<VideoStream>& test_instances, int frames_per_test = 10);

/// Per-class (accuracy, count) under the same prediction rule.
void per_class_accuracy(const ClassifierInterface& model,
                        const std::vector<VideoStream>& test_instances, int frames_per_test,
                        std::vector<double>& accuracy, std::vector<int>& count);

struct AlignmentStats {
    double mean_iou = 0.0;
    double mean_center_distance = 0.0;
};

/// Mean IoU between each plateau's 0.5-support and its ground-truth segment
/// (matched by instance_index, integer-inclusive intervals on both sides) and
/// mean |center - segment midpoint|. Throws CountMismatch when a video's
/// distribution count differs from its segment count.
AlignmentStats plateau_alignment(const std::vector<SamplingDistribution>& distributions,
                                 const Dataset& dataset);

// Same, evaluated on a stored snapshot of the parameters.
AlignmentStats plateau_alignment_snapshot(const std::vector<SamplingDistribution>& distributions,
                                          const std::vector<PlateauParams>& snapshot,
                                          const Dataset& dataset);

/// Fraction of frames lying inside any ground-truth segment of the same class
/// in the same video; 0 for an empty list.
double in_gt_fraction(const std::vector<SampledFrame>& frames, const Dataset& dataset);

/// Integer-inclusive interval IoU used by the alignment metric.
double interval_iou(FrameInterval a, FrameInterval b);

/// Writes report.txt plus confidence.csv / loss.csv / alignment.csv /
/// update_trace.csv for the state. Re-emitting from the same checkpoint
/// produces byte-identical files.
void emit_report(const TrainState& state, const Dataset& dataset,
                 const std::filesystem::path& out_dir);

// CSV emitters shared between training and reporting.
void write_confidence_csv(const std::vector<ConfidencePoint>& history,
                          const std::filesystem::path& path);
void write_loss_csv(const std::vector<LossPoint>& history, const std::filesystem::path& path);
void write_update_trace_csv(const std::vector<UpdateRecord>& trace,
                            const std::filesystem::path& path);

} // namespace tsact
