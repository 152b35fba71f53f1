#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsact/common.hpp"
#include "tsact/synthdata.hpp"

namespace tsact {

struct TrainExample {
    std::span<const float> feature;
    int label = 0;
};

// Behavioural contract every frame classifier must satisfy: predict returns a
// softmax vector over the fixed number of classes; train_batch performs one
// optimisation step and reports the pre-step loss.
class ClassifierInterface {
public:
    virtual ~ClassifierInterface() = default;
    virtual int num_classes() const = 0;
    virtual int feature_dim() const = 0;
    virtual double train_batch(std::span<const TrainExample> batch) = 0;
    virtual std::vector<double> predict(std::span<const float> feature) const = 0;
};

// Per-frame softmax scores over all classes for one video; row x holds
// P(class | frame x).
struct ScoreMatrix {
    std::string video_id;
    int num_frames = 0;
    int num_classes = 0;
    std::vector<double> scores;  // num_frames * num_classes, row-major

    double at(int frame, int k) const {
        return scores[static_cast<std::size_t>(frame) * num_classes + k];
    }
    std::vector<double> class_column(int k) const;
};

/// Multinomial linear softmax classifier trained by minibatch SGD on mean
/// cross-entropy. Weights start at zero (the problem is convex, so the zero
/// start also makes training fully deterministic); the stored seed drives
/// minibatch shuffling in the training loop.
class LinearSoftmaxModel : public ClassifierInterface {
public:
    LinearSoftmaxModel() = default;
    LinearSoftmaxModel(int num_classes, int feature_dim, double learning_rate,
                       std::uint64_t seed);

    int num_classes() const override { return num_classes_; }
    int feature_dim() const override { return feature_dim_; }
    double learning_rate() const { return learning_rate_; }
    std::uint64_t seed() const { return seed_; }

    /// One SGD step on the mean cross-entropy of the batch; returns the loss
    /// measured before the step. Throws DimensionMismatch on bad features or
    /// labels.
    double train_batch(std::span<const TrainExample> batch) override;

    /// Softmax of W*x + b, stabilised by max subtraction.
    std::vector<double> predict(std::span<const float> feature) const override;

    std::span<const double> weights() const { return weights_; }
    std::span<const double> bias() const { return bias_; }
    // Direct state access for checkpointing.
    std::vector<double>& mutable_weights() { return weights_; }
    std::vector<double>& mutable_bias() { return bias_; }

    bool equals(const LinearSoftmaxModel& other) const {
        return num_classes_ == other.num_classes_ && feature_dim_ == other.feature_dim_ &&
               learning_rate_ == other.learning_rate_ && seed_ == other.seed_ &&
               weights_ == other.weights_ && bias_ == other.bias_;
    }

private:
    int num_classes_ = 0;
    int feature_dim_ = 0;
    double learning_rate_ = 0.1;
    std::uint64_t seed_ = 0;
    std::vector<double> weights_;  // num_classes * feature_dim, row-major
    std::vector<double> bias_;     // num_classes
};

/// Scores every frame of the video; equals stacking predict() row by row.
ScoreMatrix score_video(const ClassifierInterface& model, const VideoStream& video);

/// Compact interchange format: u32 header (num_classes, feature_dim) followed
/// by weights row-major then bias, all little-endian float32.
void save_model(const LinearSoftmaxModel& model, const std::filesystem::path& path);
LinearSoftmaxModel load_model(const std::filesystem::path& path);

} // namespace tsact
