#include "tsact/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binio.hpp"

namespace tsact {

std::vector<double> ScoreMatrix::class_column(int k) const {
    std::vector<double> col(static_cast<std::size_t>(num_frames));
    for (int x = 0; x < num_frames; ++x) col[static_cast<std::size_t>(x)] = at(x, k);
    return col;
}

LinearSoftmaxModel::LinearSoftmaxModel(int num_classes, int feature_dim, double learning_rate,
                                       std::uint64_t seed)
    : num_classes_(num_classes),
      feature_dim_(feature_dim),
      learning_rate_(learning_rate),
      seed_(seed),
      weights_(static_cast<std::size_t>(num_classes) * feature_dim, 0.0),
      bias_(static_cast<std::size_t>(num_classes), 0.0) {
    if (num_classes < 1 || feature_dim < 1)
        throw DimensionMismatch("model dimensions must be positive");
    if (learning_rate <= 0) throw Error("learning_rate must be positive");
}

std::vector<double> LinearSoftmaxModel::predict(std::span<const float> feature) const {
    if (static_cast<int>(feature.size()) != feature_dim_)
        throw DimensionMismatch("predict: feature has dim " + std::to_string(feature.size()) +
                                ", model expects " + std::to_string(feature_dim_));
    std::vector<double> logits(static_cast<std::size_t>(num_classes_));
    for (int k = 0; k < num_classes_; ++k) {
        const double* row = weights_.data() + static_cast<std::size_t>(k) * feature_dim_;
        double z = bias_[static_cast<std::size_t>(k)];
        for (int j = 0; j < feature_dim_; ++j) z += row[j] * feature[static_cast<std::size_t>(j)];
        logits[static_cast<std::size_t>(k)] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& z : logits) {
        z = std::exp(z - zmax);
        total += z;
    }
    for (double& z : logits) z /= total;
    return logits;
}

double LinearSoftmaxModel::train_batch(std::span<const TrainExample> batch) {
    if (batch.empty()) throw Error("train_batch: empty batch");

    std::vector<double> grad_w(weights_.size(), 0.0);
    std::vector<double> grad_b(bias_.size(), 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    for (const TrainExample& ex : batch) {
        if (ex.label < 0 || ex.label >= num_classes_)
            throw DimensionMismatch("train_batch: label " + std::to_string(ex.label) +
                                    " outside [0, " + std::to_string(num_classes_) + ")");
        const std::vector<double> probs = predict(ex.feature);
        loss -= std::log(std::max(probs[static_cast<std::size_t>(ex.label)], 1e-300));
        for (int k = 0; k < num_classes_; ++k) {
            const double delta =
                probs[static_cast<std::size_t>(k)] - (k == ex.label ? 1.0 : 0.0);
            grad_b[static_cast<std::size_t>(k)] += delta * inv_n;
            double* grow = grad_w.data() + static_cast<std::size_t>(k) * feature_dim_;
            for (int j = 0; j < feature_dim_; ++j)
                grow[j] += delta * ex.feature[static_cast<std::size_t>(j)] * inv_n;
        }
    }

    for (std::size_t i = 0; i < weights_.size(); ++i)
        weights_[i] -= learning_rate_ * grad_w[i];
    for (std::size_t i = 0; i < bias_.size(); ++i)
        bias_[i] -= learning_rate_ * grad_b[i];
    return loss * inv_n;
}

ScoreMatrix score_video(const ClassifierInterface& model, const VideoStream& video) {
    ScoreMatrix m;
    m.video_id = video.video_id;
    m.num_frames = video.length;
    m.num_classes = model.num_classes();
    m.scores.resize(static_cast<std::size_t>(video.length) * m.num_classes);
    for (int x = 0; x < video.length; ++x) {
        const std::vector<double> p = model.predict(video.frame(x));
        std::copy(p.begin(), p.end(),
                  m.scores.begin() + static_cast<std::size_t>(x) * m.num_classes);
    }
    return m;
}

void save_model(const LinearSoftmaxModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    binio::write_u32(out, static_cast<std::uint32_t>(model.num_classes()));
    binio::write_u32(out, static_cast<std::uint32_t>(model.feature_dim()));
    for (double w : model.weights()) binio::write_f32(out, static_cast<float>(w));
    for (double b : model.bias()) binio::write_f32(out, static_cast<float>(b));
    if (!out.flush()) throw Error("failed writing " + path.string());
}

LinearSoftmaxModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    const auto num_classes = binio::read_u32(in, path.string() + " num_classes");
    const auto feature_dim = binio::read_u32(in, path.string() + " feature_dim");
    if (num_classes < 1 || num_classes > 1u << 20 || feature_dim < 1 || feature_dim > 1u << 20)
        throw FormatError(path.string() + ": implausible header dimensions");
    LinearSoftmaxModel model(static_cast<int>(num_classes), static_cast<int>(feature_dim), 0.1, 0);
    for (double& w : model.mutable_weights())
        w = binio::read_f32(in, path.string() + " weights");
    for (double& b : model.mutable_bias()) b = binio::read_f32(in, path.string() + " bias");
    char extra;
    if (in.read(&extra, 1)) throw FormatError(path.string() + ": trailing bytes");
    return model;
}

} // namespace tsact
