#include "tsact/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include "binio.hpp"

namespace tsact {

std::string to_string(SupervisionMode mode) {
    switch (mode) {
        case SupervisionMode::kTimestamps: return "ts";
        case SupervisionMode::kTimestampsInGt: return "ts-in-gt";
        case SupervisionMode::kFull: return "full";
    }
    throw Error("unknown supervision mode");
}

SupervisionMode supervision_mode_from_string(const std::string& text) {
    if (text == "ts") return SupervisionMode::kTimestamps;
    if (text == "ts-in-gt") return SupervisionMode::kTimestampsInGt;
    if (text == "full") return SupervisionMode::kFull;
    throw ConfigError("unknown timestamp mode '" + text + "' (valid: ts, ts-in-gt, full)");
}

void TrainConfig::validate() const {
    if (init_half_width <= 0) throw ConfigError("init_half_width must be positive");
    if (init_steepness <= 0) throw ConfigError("init_steepness must be positive");
    if (base_epochs < 0) throw ConfigError("base_epochs must be >= 0");
    if (update_epochs < 0) throw ConfigError("update_epochs must be >= 0");
    if (frames_per_instance < 1) throw ConfigError("frames_per_instance must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    if (!(base_keep_fraction > 0.0 && base_keep_fraction <= 1.0))
        throw ConfigError("base_keep_fraction must lie in (0, 1]");
    if (ts_pad_seconds < 0) throw ConfigError("ts_pad_seconds must be >= 0");
    if (ts_in_gt_std_seconds < 0) throw ConfigError("ts_in_gt_std_seconds must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    refine.validate();
    schedule().validate();
}

std::vector<std::vector<Annotation>> resolve_annotations(const Dataset& dataset,
                                                         SupervisionMode mode,
                                                         const TrainConfig& cfg) {
    std::vector<std::vector<Annotation>> per_video(dataset.train_videos.size());
    if (mode == SupervisionMode::kFull) return per_video;

    if (mode == SupervisionMode::kTimestamps) {
        bool all_annotated = true;
        for (const auto& video : dataset.train_videos)
            if (video.annotations.empty() && !video.gt_segments.empty()) all_annotated = false;
        if (all_annotated) {
            for (std::size_t v = 0; v < dataset.train_videos.size(); ++v)
                per_video[v] = dataset.train_videos[v].annotations;
            return per_video;
        }
    }

    // Simulate from ground truth with the protocol matching the mode.
    const TimestampProtocol protocol = mode == SupervisionMode::kTimestamps
                                           ? TimestampProtocol::kUniformPadded
                                           : TimestampProtocol::kGaussianCentered;
    const double parameter = mode == SupervisionMode::kTimestamps ? cfg.ts_pad_seconds
                                                                  : cfg.ts_in_gt_std_seconds;
    for (std::size_t v = 0; v < dataset.train_videos.size(); ++v) {
        Rng rng(mix_seed(cfg.seed_data, 10, static_cast<std::uint64_t>(v)));
        per_video[v] = simulate_annotations(dataset.train_videos[v], protocol, parameter, rng);
    }
    return per_video;
}

std::vector<SamplingDistribution> init_distributions(
    const Dataset& dataset, const std::vector<std::vector<Annotation>>& annotations,
    const TrainConfig& cfg) {
    if (annotations.size() != dataset.train_videos.size())
        throw CountMismatch("annotation lists do not match the train video count");
    std::vector<SamplingDistribution> distributions;
    for (std::size_t v = 0; v < annotations.size(); ++v) {
        const VideoStream& video = dataset.train_videos[v];
        for (const Annotation& a : annotations[v]) {
            if (a.frame < 0 || a.frame >= video.length)
                throw FormatError("annotation frame " + std::to_string(a.frame) +
                                  " outside video " + video.video_id);
            SamplingDistribution dist;
            dist.params = {clamp_center(a.frame, video.length), cfg.init_half_width,
                           cfg.init_steepness};
            dist.video_id = video.video_id;
            dist.video_index = static_cast<int>(v);
            dist.class_label = a.class_label;
            dist.instance_index = a.instance_index;
            distributions.push_back(std::move(dist));
        }
    }
    return distributions;
}

TrainState init_state(const Dataset& dataset, SupervisionMode mode, const TrainConfig& cfg) {
    cfg.validate();
    TrainState state;
    state.mode = mode;
    state.model = LinearSoftmaxModel(dataset.num_classes, dataset.feature_dim, cfg.learning_rate,
                                     cfg.seed_model);
    if (mode != SupervisionMode::kFull) {
        state.distributions =
            init_distributions(dataset, resolve_annotations(dataset, mode, cfg), cfg);
        std::vector<PlateauParams> snapshot;
        snapshot.reserve(state.distributions.size());
        for (const auto& d : state.distributions) snapshot.push_back(d.params);
        state.distribution_snapshots.push_back(std::move(snapshot));
    }
    return state;
}

std::vector<ScoreMatrix> score_train_videos(const ClassifierInterface& model,
                                            const Dataset& dataset, int threads) {
    std::vector<ScoreMatrix> scores(dataset.train_videos.size());
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v)
            scores[v] = score_video(model, dataset.train_videos[v]);
    };
    if (threads <= 1 || dataset.train_videos.size() < 2) {
        work(0, dataset.train_videos.size());
        return scores;
    }
    const std::size_t n = dataset.train_videos.size();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        if (begin >= n) break;
        pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
    for (auto& t : pool) t.join();
    return scores;
}

namespace {

std::vector<SampledFrame> full_supervision_pool(const Dataset& dataset, int frames_per_instance,
                                                Rng& rng) {
    std::vector<SampledFrame> pool;
    int instance_counter = 0;
    for (std::size_t v = 0; v < dataset.train_videos.size(); ++v) {
        const VideoStream& video = dataset.train_videos[v];
        for (const GroundTruthSegment& seg : video.gt_segments) {
            for (int k = 0; k < frames_per_instance; ++k) {
                const int frame = static_cast<int>(rng.uniform_int(seg.start, seg.end - 1));
                pool.push_back({video.video_id, static_cast<int>(v), frame, seg.class_label,
                                instance_counter, 0.0});
            }
            ++instance_counter;
        }
    }
    return pool;
}

double train_on_selection(TrainState& state, const Dataset& dataset,
                          const std::vector<SampledFrame>& selection, const TrainConfig& cfg) {
    if (selection.empty()) return 0.0;
    std::vector<TrainExample> examples;
    examples.reserve(selection.size());
    for (const SampledFrame& f : selection) {
        const VideoStream& video = dataset.train_videos[static_cast<std::size_t>(f.video_index)];
        examples.push_back({video.frame(f.frame), f.class_label});
    }
    Rng shuffle_rng(mix_seed(state.model.seed(), 20, static_cast<std::uint64_t>(state.epoch)));
    const std::vector<std::size_t> order = shuffled_indices(examples.size(), shuffle_rng);

    double weighted_loss = 0.0;
    std::vector<TrainExample> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (std::size_t i = 0; i < order.size();) {
        batch.clear();
        const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(cfg.batch_size));
        for (; i < end; ++i) batch.push_back(examples[order[i]]);
        weighted_loss += state.model.train_batch(batch) * static_cast<double>(batch.size());
    }
    return weighted_loss / static_cast<double>(examples.size());
}

} // namespace

void run_epoch(TrainState& state, const Dataset& dataset, const TrainConfig& cfg) {
    const int epoch = state.epoch;
    Rng pool_rng(mix_seed(cfg.seed_sampling, 0, static_cast<std::uint64_t>(epoch)));

    std::vector<SampledFrame> selection;
    if (state.mode == SupervisionMode::kFull) {
        selection = full_supervision_pool(dataset, cfg.frames_per_instance, pool_rng);
    } else {
        std::vector<SampledFrame> pool =
            sample_pool(state.distributions, dataset, cfg.frames_per_instance, pool_rng);
        const std::vector<ScoreMatrix> scores = score_train_videos(state.model, dataset, cfg.threads);
        selection = select_top_h(std::move(pool), scores,
                                 cfg.schedule().keep_fraction_at(epoch))
                        .selected;
    }

    const double loss = train_on_selection(state, dataset, selection, cfg);
    if (!std::isfinite(loss))
        throw Error("non-finite training loss at epoch " + std::to_string(epoch) +
                    " (mode " + to_string(state.mode) + ", " +
                    std::to_string(selection.size()) + " frames)");
    state.loss_history.push_back({epoch, loss});

    if (state.mode != SupervisionMode::kFull && epoch >= cfg.base_epochs) {
        const int in_update_phase = epoch - cfg.base_epochs;
        if ((in_update_phase + 1) % cfg.refine.update_period == 0) {
            const std::vector<ScoreMatrix> scores =
                score_train_videos(state.model, dataset, cfg.threads);
            UpdateRoundResult round =
                run_update_round(state.distributions, scores, dataset, cfg.refine);
            state.confidence_history.push_back(
                {epoch, round.mean_confidence, round.num_applied});
            for (UpdateRecord& record : round.applied) {
                record.epoch = epoch;
                state.update_trace.push_back(std::move(record));
            }
            std::vector<PlateauParams> snapshot;
            snapshot.reserve(state.distributions.size());
            for (const auto& d : state.distributions) snapshot.push_back(d.params);
            state.distribution_snapshots.push_back(std::move(snapshot));
            if (round.num_inversions > 0) {
                state.inversion_count += round.num_inversions;
                std::cerr << "warning: " << round.num_inversions
                          << " center-order inversion(s) after update round at epoch " << epoch
                          << "\n";
            }
        }
    }

    ++state.epoch;
    if (state.epoch == cfg.base_epochs && state.mode != SupervisionMode::kFull &&
        !state.base_model) {
        state.base_model = state.model;
    }
}

void run_base_phase(TrainState& state, const Dataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    while (state.epoch < cfg.base_epochs) run_epoch(state, dataset, cfg);
    if (state.mode != SupervisionMode::kFull && !state.base_model) state.base_model = state.model;
}

void run_update_phase(TrainState& state, const Dataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (state.mode == SupervisionMode::kFull) return;
    if (state.epoch < cfg.base_epochs)
        throw Error("update phase requested before the base phase completed");
    while (state.epoch < cfg.base_epochs + cfg.update_epochs) run_epoch(state, dataset, cfg);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'T', 'S', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_model(std::ostream& out, const LinearSoftmaxModel& model) {
    binio::write_u32(out, static_cast<std::uint32_t>(model.num_classes()));
    binio::write_u32(out, static_cast<std::uint32_t>(model.feature_dim()));
    binio::write_f64(out, model.learning_rate());
    binio::write_u64(out, model.seed());
    for (double w : model.weights()) binio::write_f64(out, w);
    for (double b : model.bias()) binio::write_f64(out, b);
}

LinearSoftmaxModel read_model(std::istream& in, const std::string& what) {
    const auto num_classes = binio::read_u32(in, what + " num_classes");
    const auto feature_dim = binio::read_u32(in, what + " feature_dim");
    if (num_classes < 1 || num_classes > 1u << 20 || feature_dim < 1 || feature_dim > 1u << 20)
        throw FormatError(what + ": implausible model dimensions");
    const double lr = binio::read_f64(in, what + " learning_rate");
    const auto seed = binio::read_u64(in, what + " seed");
    if (!(lr > 0) || !std::isfinite(lr)) throw FormatError(what + ": invalid learning rate");
    LinearSoftmaxModel model(static_cast<int>(num_classes), static_cast<int>(feature_dim), lr,
                             seed);
    for (double& w : model.mutable_weights()) w = binio::read_f64(in, what + " weights");
    for (double& b : model.mutable_bias()) b = binio::read_f64(in, what + " bias");
    return model;
}

void write_params(std::ostream& out, const PlateauParams& p) {
    binio::write_f64(out, p.center);
    binio::write_f64(out, p.half_width);
    binio::write_f64(out, p.steepness);
}

PlateauParams read_params(std::istream& in, const std::string& what) {
    PlateauParams p;
    p.center = binio::read_f64(in, what);
    p.half_width = binio::read_f64(in, what);
    p.steepness = binio::read_f64(in, what);
    return p;
}

} // namespace

void save_checkpoint(const TrainState& state, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    binio::write_u32(out, kVersion);
    binio::write_u32(out, static_cast<std::uint32_t>(state.mode));
    binio::write_u32(out, static_cast<std::uint32_t>(state.epoch));
    write_model(out, state.model);
    binio::write_u32(out, state.base_model ? 1 : 0);
    if (state.base_model) write_model(out, *state.base_model);

    binio::write_u32(out, static_cast<std::uint32_t>(state.distributions.size()));
    for (const SamplingDistribution& d : state.distributions) {
        binio::write_string(out, d.video_id);
        binio::write_u32(out, static_cast<std::uint32_t>(d.video_index));
        binio::write_u32(out, static_cast<std::uint32_t>(d.class_label));
        binio::write_u32(out, static_cast<std::uint32_t>(d.instance_index));
        write_params(out, d.params);
    }

    binio::write_u32(out, static_cast<std::uint32_t>(state.loss_history.size()));
    for (const LossPoint& p : state.loss_history) {
        binio::write_u32(out, static_cast<std::uint32_t>(p.epoch));
        binio::write_f64(out, p.loss);
    }
    binio::write_u32(out, static_cast<std::uint32_t>(state.confidence_history.size()));
    for (const ConfidencePoint& p : state.confidence_history) {
        binio::write_u32(out, static_cast<std::uint32_t>(p.epoch));
        binio::write_f64(out, p.mean_confidence);
        binio::write_u32(out, static_cast<std::uint32_t>(p.updates_applied));
    }
    binio::write_u32(out, static_cast<std::uint32_t>(state.distribution_snapshots.size()));
    for (const auto& snapshot : state.distribution_snapshots) {
        binio::write_u32(out, static_cast<std::uint32_t>(snapshot.size()));
        for (const PlateauParams& p : snapshot) write_params(out, p);
    }
    binio::write_u32(out, static_cast<std::uint32_t>(state.update_trace.size()));
    for (const UpdateRecord& r : state.update_trace) {
        binio::write_u32(out, static_cast<std::uint32_t>(r.epoch));
        binio::write_string(out, r.video_id);
        binio::write_u32(out, static_cast<std::uint32_t>(r.instance_index));
        write_params(out, r.before);
        write_params(out, r.proposal);
        binio::write_f64(out, r.confidence);
    }
    binio::write_u32(out, static_cast<std::uint32_t>(state.inversion_count));
    if (!out.flush()) throw Error("failed writing " + path.string());
}

TrainState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint " + path.string());
    const std::string what = path.string();

    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != std::string(kMagic, 4))
        throw FormatError(what + ": not a checkpoint file");
    if (binio::read_u32(in, what + " version") != kVersion)
        throw FormatError(what + ": unsupported checkpoint version");

    TrainState state;
    const auto mode = binio::read_u32(in, what + " mode");
    if (mode > 2) throw FormatError(what + ": invalid supervision mode");
    state.mode = static_cast<SupervisionMode>(mode);
    state.epoch = static_cast<int>(binio::read_u32(in, what + " epoch"));
    state.model = read_model(in, what + " model");
    if (binio::read_u32(in, what + " base_model flag") != 0)
        state.base_model = read_model(in, what + " base_model");

    const auto num_dists = binio::read_u32(in, what + " distribution count");
    state.distributions.resize(num_dists);
    for (auto& d : state.distributions) {
        d.video_id = binio::read_string(in, what + " video id");
        d.video_index = static_cast<int>(binio::read_u32(in, what + " video index"));
        d.class_label = static_cast<int>(binio::read_u32(in, what + " class label"));
        d.instance_index = static_cast<int>(binio::read_u32(in, what + " instance index"));
        d.params = read_params(in, what + " distribution params");
        if (!d.params.valid()) throw FormatError(what + ": invalid distribution parameters");
    }

    const auto num_loss = binio::read_u32(in, what + " loss history size");
    state.loss_history.resize(num_loss);
    for (auto& p : state.loss_history) {
        p.epoch = static_cast<int>(binio::read_u32(in, what + " loss epoch"));
        p.loss = binio::read_f64(in, what + " loss value");
    }
    const auto num_conf = binio::read_u32(in, what + " confidence history size");
    state.confidence_history.resize(num_conf);
    for (auto& p : state.confidence_history) {
        p.epoch = static_cast<int>(binio::read_u32(in, what + " confidence epoch"));
        p.mean_confidence = binio::read_f64(in, what + " confidence value");
        p.updates_applied = static_cast<int>(binio::read_u32(in, what + " updates applied"));
    }
    const auto num_snaps = binio::read_u32(in, what + " snapshot count");
    state.distribution_snapshots.resize(num_snaps);
    for (auto& snapshot : state.distribution_snapshots) {
        const auto n = binio::read_u32(in, what + " snapshot size");
        snapshot.resize(n);
        for (auto& p : snapshot) p = read_params(in, what + " snapshot params");
    }
    const auto num_trace = binio::read_u32(in, what + " trace size");
    state.update_trace.resize(num_trace);
    for (auto& r : state.update_trace) {
        r.epoch = static_cast<int>(binio::read_u32(in, what + " trace epoch"));
        r.video_id = binio::read_string(in, what + " trace video id");
        r.instance_index = static_cast<int>(binio::read_u32(in, what + " trace instance"));
        r.before = read_params(in, what + " trace before");
        r.proposal = read_params(in, what + " trace proposal");
        r.confidence = binio::read_f64(in, what + " trace confidence");
    }
    state.inversion_count = static_cast<int>(binio::read_u32(in, what + " inversion count"));

    char extra;
    if (in.read(&extra, 1)) throw FormatError(what + ": trailing bytes");
    return state;
}

} // namespace tsact
