#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsact/common.hpp"

namespace tsact {

// One labelled action occurrence: frames [start, end) carry the class signal.
struct GroundTruthSegment {
    int start = 0;
    int end = 0;     // exclusive, <= video length
    int class_label = 0;

    double midpoint() const { return (start + end) / 2.0; }
    bool operator==(const GroundTruthSegment&) const = default;
};

// A single-timestamp label: one frame index per action instance, roughly
// aligned with the action. instance_index is the position within the video's
// timestamp-sorted annotation list.
struct Annotation {
    std::string video_id;
    int frame = 0;
    int class_label = 0;
    int instance_index = 0;

    bool operator==(const Annotation&) const = default;
};

// An untrimmed sequence of per-frame feature vectors. Ground-truth segments
// are carried for generation and evaluation; the timestamp-supervised
// training path never reads them.
struct VideoStream {
    std::string video_id;
    int length = 0;
    double frame_rate = 30.0;
    int feature_dim = 0;
    std::vector<float> features;  // length * feature_dim, row-major
    std::vector<GroundTruthSegment> gt_segments;
    std::vector<Annotation> annotations;

    std::span<const float> frame(int x) const {
        return {features.data() + static_cast<std::size_t>(x) * feature_dim,
                static_cast<std::size_t>(feature_dim)};
    }
};

struct Dataset {
    int num_classes = 0;
    int feature_dim = 0;
    double frame_rate = 30.0;
    std::uint64_t seed = 0;
    std::vector<VideoStream> train_videos;  // sorted by video_id
    std::vector<VideoStream> test_videos;   // trimmed, one segment each
};

enum class TimestampProtocol { kNone, kUniformPadded, kGaussianCentered };

struct SynthConfig {
    int num_videos = 20;
    int video_length = 2000;
    int num_classes = 8;
    int instances_per_video = 10;
    int feature_dim = 16;
    int min_segment_len = 60;
    int max_segment_len = 150;
    int min_gap = 10;
    int max_gap = 50;
    double class_signal = 0.5;       // norm of each class mean
    double background_signal = 1.0;  // norm of the background mean
    double noise_std = 0.5;
    double frame_rate = 30.0;
    int num_test_instances = 60;
    double timestamp_pad_seconds = 1.0;  // for annotations written at generation
    TimestampProtocol annotation_protocol = TimestampProtocol::kUniformPadded;
    std::uint64_t seed = 42;

    void validate() const;  // throws InfeasibleLayout / ConfigError
};

/// Builds a synthetic dataset: untrimmed training videos with planted
/// class-conditioned segments over a background signal, plus a disjoint set
/// of trimmed test instances cut from held-out videos. Deterministic in
/// cfg.seed.
Dataset generate_synthetic(const SynthConfig& cfg);

/// Uniform timestamp draw over [start - pad*fps, end + pad*fps], inclusive,
/// clamped into [0, video_length-1].
int simulate_ts(const GroundTruthSegment& gt, double pad_seconds, double frame_rate,
                int video_length, Rng& rng);

/// Rounded Gaussian timestamp draw centred on the segment midpoint with
/// stddev std_seconds*fps, clamped into [0, video_length-1]. The draw is not
/// truncated to the segment.
int simulate_ts_in_gt(const GroundTruthSegment& gt, double std_seconds, double frame_rate,
                      int video_length, Rng& rng);

/// One annotation per ground-truth segment under the given protocol, sorted
/// by timestamp with instance_index assigned in sorted order.
std::vector<Annotation> simulate_annotations(const VideoStream& video,
                                             TimestampProtocol protocol,
                                             double pad_or_std_seconds, Rng& rng);

/// Persists the dataset as a directory: a `meta` key/value file plus one text
/// record and one raw float32 sidecar per video. See README for the exact
/// layout.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Loads and validates a dataset directory; throws FormatError with file and
/// line diagnostics on malformed input.
Dataset load_dataset(const std::filesystem::path& dir);

// Validates every structural invariant of a loaded/constructed dataset.
void validate_dataset(const Dataset& dataset);

} // namespace tsact
