#include "tsact/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "binio.hpp"

namespace tsact {

namespace {

constexpr std::uint64_t kStreamMeans = 0;
constexpr std::uint64_t kStreamVideo = 1;
constexpr std::uint64_t kStreamAnnotations = 2;

std::vector<double> random_direction(int dim, double norm, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double len = 0.0;
    do {
        len = 0.0;
        for (auto& x : v) {
            x = rng.normal(0.0, 1.0);
            len += x * x;
        }
        len = std::sqrt(len);
    } while (len < 1e-12);
    for (auto& x : v) x *= norm / len;
    return v;
}

std::string padded_id(const std::string& prefix, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%06d", prefix.c_str(), index);
    return buf;
}

struct FeatureModel {
    std::vector<std::vector<double>> class_means;
    std::vector<double> background_mean;
};

// Lays out non-overlapping segments (gap then segment, repeated) and fills
// per-frame features from the class/background means plus i.i.d. noise.
VideoStream make_video(const std::string& id, const std::vector<int>& labels,
                       const SynthConfig& cfg, const FeatureModel& model, Rng& rng) {
    VideoStream video;
    video.video_id = id;
    video.length = cfg.video_length;
    video.frame_rate = cfg.frame_rate;
    video.feature_dim = cfg.feature_dim;

    int cursor = 0;
    for (int label : labels) {
        cursor += static_cast<int>(rng.uniform_int(cfg.min_gap, cfg.max_gap));
        const int len = static_cast<int>(rng.uniform_int(cfg.min_segment_len, cfg.max_segment_len));
        if (cursor + len > cfg.video_length) {
            throw InfeasibleLayout("segments and gaps exceed video length in " + id);
        }
        video.gt_segments.push_back({cursor, cursor + len, label});
        cursor += len;
    }

    video.features.resize(static_cast<std::size_t>(cfg.video_length) * cfg.feature_dim);
    std::size_t seg = 0;
    for (int x = 0; x < cfg.video_length; ++x) {
        while (seg < video.gt_segments.size() && x >= video.gt_segments[seg].end) ++seg;
        const bool in_segment =
            seg < video.gt_segments.size() && x >= video.gt_segments[seg].start;
        const std::vector<double>& mean =
            in_segment ? model.class_means[static_cast<std::size_t>(
                             video.gt_segments[seg].class_label)]
                       : model.background_mean;
        float* row = video.features.data() + static_cast<std::size_t>(x) * cfg.feature_dim;
        for (int j = 0; j < cfg.feature_dim; ++j) {
            row[j] = static_cast<float>(mean[static_cast<std::size_t>(j)] +
                                        rng.normal(0.0, cfg.noise_std));
        }
    }
    return video;
}

} // namespace

void SynthConfig::validate() const {
    auto positive = [](long v, const char* name) {
        if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(num_videos, "num_videos");
    positive(video_length, "video_length");
    positive(num_classes, "num_classes");
    positive(instances_per_video, "instances_per_video");
    positive(feature_dim, "feature_dim");
    positive(min_segment_len, "min_segment_len");
    if (max_segment_len < min_segment_len)
        throw ConfigError("max_segment_len must be >= min_segment_len");
    if (min_gap < 0) throw ConfigError("min_gap must be >= 0");
    if (max_gap < min_gap) throw ConfigError("max_gap must be >= min_gap");
    if (noise_std < 0) throw ConfigError("noise_std must be >= 0");
    if (class_signal < 0) throw ConfigError("class_signal must be >= 0");
    if (background_signal < 0) throw ConfigError("background_signal must be >= 0");
    if (frame_rate <= 0) throw ConfigError("frame_rate must be positive");
    if (num_test_instances < 0) throw ConfigError("num_test_instances must be >= 0");
    if (timestamp_pad_seconds < 0) throw ConfigError("timestamp_pad_seconds must be >= 0");

    const long worst = static_cast<long>(instances_per_video) *
                       (static_cast<long>(max_segment_len) + max_gap);
    if (worst > video_length) {
        throw InfeasibleLayout(
            "instances_per_video*(max_segment_len+max_gap) = " + std::to_string(worst) +
            " exceeds video_length = " + std::to_string(video_length));
    }
}

int simulate_ts(const GroundTruthSegment& gt, double pad_seconds, double frame_rate,
                int video_length, Rng& rng) {
    const int pad = static_cast<int>(std::lround(pad_seconds * frame_rate));
    const auto draw = rng.uniform_int(gt.start - pad, gt.end + pad);
    return static_cast<int>(std::clamp<std::int64_t>(draw, 0, video_length - 1));
}

int simulate_ts_in_gt(const GroundTruthSegment& gt, double std_seconds, double frame_rate,
                      int video_length, Rng& rng) {
    const double draw = rng.normal(gt.midpoint(), std_seconds * frame_rate);
    const auto frame = static_cast<std::int64_t>(std::llround(draw));
    return static_cast<int>(std::clamp<std::int64_t>(frame, 0, video_length - 1));
}

std::vector<Annotation> simulate_annotations(const VideoStream& video,
                                             TimestampProtocol protocol,
                                             double pad_or_std_seconds, Rng& rng) {
    std::vector<Annotation> annotations;
    if (protocol == TimestampProtocol::kNone) return annotations;
    annotations.reserve(video.gt_segments.size());
    for (const GroundTruthSegment& seg : video.gt_segments) {
        const int frame =
            protocol == TimestampProtocol::kUniformPadded
                ? simulate_ts(seg, pad_or_std_seconds, video.frame_rate, video.length, rng)
                : simulate_ts_in_gt(seg, pad_or_std_seconds, video.frame_rate, video.length, rng);
        annotations.push_back({video.video_id, frame, seg.class_label, 0});
    }
    // Noisy draws may invert the original segment order; instance indices
    // follow ascending timestamps so that neighbour constraints stay
    // well-defined downstream.
    std::stable_sort(annotations.begin(), annotations.end(),
                     [](const Annotation& a, const Annotation& b) { return a.frame < b.frame; });
    for (std::size_t i = 0; i < annotations.size(); ++i)
        annotations[i].instance_index = static_cast<int>(i);
    return annotations;
}

Dataset generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();

    Dataset dataset;
    dataset.num_classes = cfg.num_classes;
    dataset.feature_dim = cfg.feature_dim;
    dataset.frame_rate = cfg.frame_rate;
    dataset.seed = cfg.seed;

    Rng means_rng(mix_seed(cfg.seed, kStreamMeans, 0));
    FeatureModel model;
    model.class_means.reserve(static_cast<std::size_t>(cfg.num_classes));
    for (int k = 0; k < cfg.num_classes; ++k) {
        model.class_means.push_back(random_direction(cfg.feature_dim, cfg.class_signal, means_rng));
    }
    model.background_mean = random_direction(cfg.feature_dim, cfg.background_signal, means_rng);

    for (int v = 0; v < cfg.num_videos; ++v) {
        Rng video_rng(mix_seed(cfg.seed, kStreamVideo, static_cast<std::uint64_t>(v)));
        std::vector<int> labels(static_cast<std::size_t>(cfg.instances_per_video));
        for (auto& label : labels)
            label = static_cast<int>(video_rng.uniform_int(0, cfg.num_classes - 1));
        VideoStream video = make_video(padded_id("train", v), labels, cfg, model, video_rng);

        Rng ann_rng(mix_seed(cfg.seed, kStreamAnnotations, static_cast<std::uint64_t>(v)));
        video.annotations =
            simulate_annotations(video, cfg.annotation_protocol, cfg.timestamp_pad_seconds, ann_rng);
        dataset.train_videos.push_back(std::move(video));
    }

    // Held-out videos supply the trimmed test instances; labels cycle through
    // the classes so the test set stays close to balanced.
    const int test_videos =
        (cfg.num_test_instances + cfg.instances_per_video - 1) / cfg.instances_per_video;
    int test_label = 0;
    int emitted = 0;
    for (int t = 0; t < test_videos && emitted < cfg.num_test_instances; ++t) {
        Rng video_rng(
            mix_seed(cfg.seed, kStreamVideo, static_cast<std::uint64_t>(cfg.num_videos + t)));
        std::vector<int> labels(static_cast<std::size_t>(cfg.instances_per_video));
        for (auto& label : labels) {
            label = test_label;
            test_label = (test_label + 1) % cfg.num_classes;
        }
        const VideoStream source = make_video("heldout", labels, cfg, model, video_rng);
        for (const GroundTruthSegment& seg : source.gt_segments) {
            if (emitted >= cfg.num_test_instances) break;
            VideoStream inst;
            inst.video_id = padded_id("test", emitted);
            inst.length = seg.end - seg.start;
            inst.frame_rate = cfg.frame_rate;
            inst.feature_dim = cfg.feature_dim;
            inst.features.assign(
                source.features.begin() + static_cast<std::size_t>(seg.start) * cfg.feature_dim,
                source.features.begin() + static_cast<std::size_t>(seg.end) * cfg.feature_dim);
            inst.gt_segments.push_back({0, inst.length, seg.class_label});
            dataset.test_videos.push_back(std::move(inst));
            ++emitted;
        }
    }

    validate_dataset(dataset);
    return dataset;
}

// ---------------------------------------------------------------------------
// Dataset directory format
// ---------------------------------------------------------------------------

namespace {

void check_video(const VideoStream& video, int num_classes, int feature_dim,
                 const std::string& where) {
    if (video.length < 1) throw FormatError(where + ": length must be >= 1");
    if (video.feature_dim != feature_dim)
        throw FormatError(where + ": feature_dim differs from dataset meta");
    if (video.features.size() !=
        static_cast<std::size_t>(video.length) * static_cast<std::size_t>(feature_dim))
        throw FormatError(where + ": feature count does not match length * feature_dim");

    const auto& segs = video.gt_segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        const std::string tag = where + ": segment " + std::to_string(i);
        if (s.start < 0 || s.end > video.length)
            throw FormatError(tag + " out of video bounds");
        if (s.end <= s.start) throw FormatError(tag + " has end <= start");
        if (s.class_label < 0 || s.class_label >= num_classes)
            throw FormatError(tag + " has class label outside [0, num_classes)");
        if (i > 0 && s.start < segs[i - 1].end)
            throw FormatError(where + ": segments " + std::to_string(i - 1) + " and " +
                              std::to_string(i) + " overlap or are unsorted");
    }

    const auto& anns = video.annotations;
    if (!anns.empty() && anns.size() != segs.size())
        throw FormatError(where + ": annotation count must be zero or match segment count");
    for (std::size_t i = 0; i < anns.size(); ++i) {
        const auto& a = anns[i];
        const std::string tag = where + ": annotation " + std::to_string(i);
        if (a.frame < 0 || a.frame >= video.length) throw FormatError(tag + " out of bounds");
        if (a.class_label < 0 || a.class_label >= num_classes)
            throw FormatError(tag + " has class label outside [0, num_classes)");
        if (i > 0 && a.frame < anns[i - 1].frame)
            throw FormatError(where + ": annotations not sorted by frame");
        if (a.instance_index != static_cast<int>(i))
            throw FormatError(tag + " has non-sequential instance_index");
    }
}

} // namespace

void validate_dataset(const Dataset& dataset) {
    if (dataset.num_classes < 1) throw FormatError("meta: num_classes must be >= 1");
    if (dataset.feature_dim < 1) throw FormatError("meta: feature_dim must be >= 1");
    if (dataset.frame_rate <= 0) throw FormatError("meta: frame_rate must be positive");
    for (const auto& v : dataset.train_videos)
        check_video(v, dataset.num_classes, dataset.feature_dim, v.video_id);
    for (const auto& v : dataset.test_videos) {
        check_video(v, dataset.num_classes, dataset.feature_dim, v.video_id);
        if (v.gt_segments.size() != 1)
            throw FormatError(v.video_id + ": test instances must carry exactly one segment");
    }
    auto sorted = [](const std::vector<VideoStream>& vs) {
        for (std::size_t i = 1; i < vs.size(); ++i)
            if (!(vs[i - 1].video_id < vs[i].video_id)) return false;
        return true;
    };
    if (!sorted(dataset.train_videos) || !sorted(dataset.test_videos))
        throw FormatError("videos must be unique and sorted by video_id");
}

namespace {

class LineReader {
public:
    LineReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    std::string next(const std::string& what) {
        std::string line;
        if (!std::getline(in_, line)) fail("unexpected end of file, expected " + what);
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw FormatError(path_ + ":" + std::to_string(line_no_) + ": " + msg);
    }

private:
    std::istream& in_;
    std::string path_;
    int line_no_ = 0;
};

long parse_long(const std::string& text, const LineReader& reader, const std::string& what) {
    try {
        std::size_t idx = 0;
        const long v = std::stol(text, &idx);
        if (idx != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        reader.fail("cannot parse " + what + " from '" + text + "'");
    }
}

std::vector<long> parse_csv_longs(const std::string& line, std::size_t expected,
                                  const LineReader& reader, const std::string& what) {
    std::vector<long> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_long(tok, reader, what));
    if (out.size() != expected)
        reader.fail("expected " + std::to_string(expected) + " comma-separated fields for " + what);
    return out;
}

// "key value" with a single space separator.
std::pair<std::string, std::string> split_kv(const std::string& line, const LineReader& reader) {
    const auto pos = line.find(' ');
    if (pos == std::string::npos) reader.fail("expected 'key value' line, got '" + line + "'");
    return {line.substr(0, pos), line.substr(pos + 1)};
}

void expect_key(const std::string& key, const std::string& want, const LineReader& reader) {
    if (key != want) reader.fail("expected key '" + want + "', got '" + key + "'");
}

void write_video_record(const VideoStream& video, const std::filesystem::path& dir) {
    const std::string rec_name = video.video_id + ".rec";
    const std::string bin_name = video.video_id + ".f32";

    std::ofstream rec(dir / rec_name);
    if (!rec) throw Error("cannot open " + (dir / rec_name).string() + " for writing");
    rec << "video " << video.video_id << "\n";
    rec << "length " << video.length << "\n";
    rec << "features " << bin_name << "\n";
    rec << "segments " << video.gt_segments.size() << "\n";
    for (const auto& s : video.gt_segments)
        rec << s.start << "," << s.end << "," << s.class_label << "\n";
    rec << "annotations " << video.annotations.size() << "\n";
    for (const auto& a : video.annotations) rec << a.frame << "," << a.class_label << "\n";
    if (!rec.flush()) throw Error("failed writing " + (dir / rec_name).string());

    std::ofstream bin(dir / bin_name, std::ios::binary);
    if (!bin) throw Error("cannot open " + (dir / bin_name).string() + " for writing");
    for (float f : video.features) binio::write_f32(bin, f);
    if (!bin.flush()) throw Error("failed writing " + (dir / bin_name).string());
}

VideoStream read_video_record(const std::filesystem::path& rec_path, int feature_dim,
                              double frame_rate) {
    std::ifstream in(rec_path);
    if (!in) throw FormatError("cannot open " + rec_path.string());
    LineReader reader(in, rec_path.string());

    VideoStream video;
    video.frame_rate = frame_rate;
    video.feature_dim = feature_dim;

    auto [k1, id] = split_kv(reader.next("video id"), reader);
    expect_key(k1, "video", reader);
    video.video_id = id;

    auto [k2, len_text] = split_kv(reader.next("length"), reader);
    expect_key(k2, "length", reader);
    video.length = static_cast<int>(parse_long(len_text, reader, "length"));

    auto [k3, bin_name] = split_kv(reader.next("features sidecar"), reader);
    expect_key(k3, "features", reader);
    if (bin_name.find('/') != std::string::npos || bin_name.find("..") != std::string::npos)
        reader.fail("sidecar name must be a plain file name");

    auto [k4, nseg_text] = split_kv(reader.next("segment count"), reader);
    expect_key(k4, "segments", reader);
    const long nseg = parse_long(nseg_text, reader, "segment count");
    for (long i = 0; i < nseg; ++i) {
        const auto f = parse_csv_longs(reader.next("segment line"), 3, reader, "segment");
        video.gt_segments.push_back(
            {static_cast<int>(f[0]), static_cast<int>(f[1]), static_cast<int>(f[2])});
    }

    auto [k5, nann_text] = split_kv(reader.next("annotation count"), reader);
    expect_key(k5, "annotations", reader);
    const long nann = parse_long(nann_text, reader, "annotation count");
    for (long i = 0; i < nann; ++i) {
        const auto f = parse_csv_longs(reader.next("annotation line"), 2, reader, "annotation");
        video.annotations.push_back({video.video_id, static_cast<int>(f[0]),
                                     static_cast<int>(f[1]), static_cast<int>(i)});
    }

    std::string extra;
    if (std::getline(in, extra)) reader.fail("trailing content after annotations");

    const std::filesystem::path bin_path = rec_path.parent_path() / bin_name;
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw FormatError("cannot open sidecar " + bin_path.string());
    const std::uintmax_t expected_bytes =
        static_cast<std::uintmax_t>(video.length) * static_cast<std::uintmax_t>(feature_dim) * 4;
    if (std::filesystem::file_size(bin_path) != expected_bytes)
        throw FormatError(bin_path.string() + ": sidecar size must be exactly " +
                          std::to_string(expected_bytes) + " bytes (trailing bytes rejected)");
    video.features.resize(static_cast<std::size_t>(video.length) * feature_dim);
    for (float& f : video.features) f = binio::read_f32(bin, bin_path.string());
    return video;
}

} // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    validate_dataset(dataset);
    std::filesystem::create_directories(dir);

    std::ofstream meta(dir / "meta");
    if (!meta) throw Error("cannot open " + (dir / "meta").string() + " for writing");
    meta << "num_classes = " << dataset.num_classes << "\n";
    meta << "feature_dim = " << dataset.feature_dim << "\n";
    meta << "frame_rate = " << format_double(dataset.frame_rate) << "\n";
    meta << "seed = " << dataset.seed << "\n";
    if (!meta.flush()) throw Error("failed writing " + (dir / "meta").string());

    for (const auto& v : dataset.train_videos) write_video_record(v, dir);
    for (const auto& v : dataset.test_videos) write_video_record(v, dir);
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto meta_path = dir / "meta";
    std::ifstream meta(meta_path);
    if (!meta) throw FormatError("cannot open " + meta_path.string());

    Dataset dataset;
    bool have[4] = {false, false, false, false};
    std::string line;
    int line_no = 0;
    while (std::getline(meta, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw FormatError(meta_path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 3);
        try {
            if (key == "num_classes") {
                dataset.num_classes = std::stoi(value);
                have[0] = true;
            } else if (key == "feature_dim") {
                dataset.feature_dim = std::stoi(value);
                have[1] = true;
            } else if (key == "frame_rate") {
                dataset.frame_rate = std::stod(value);
                have[2] = true;
            } else if (key == "seed") {
                dataset.seed = std::stoull(value);
                have[3] = true;
            } else {
                throw FormatError(meta_path.string() + ":" + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
            }
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError(meta_path.string() + ":" + std::to_string(line_no) +
                              ": cannot parse value for '" + key + "'");
        }
    }
    const char* names[4] = {"num_classes", "feature_dim", "frame_rate", "seed"};
    for (int i = 0; i < 4; ++i)
        if (!have[i])
            throw FormatError(meta_path.string() + ": missing key '" + std::string(names[i]) + "'");

    std::vector<std::filesystem::path> records;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".rec")
            records.push_back(entry.path());
    }
    std::sort(records.begin(), records.end());

    for (const auto& rec : records) {
        VideoStream video = read_video_record(rec, dataset.feature_dim, dataset.frame_rate);
        if (video.video_id + ".rec" != rec.filename().string())
            throw FormatError(rec.string() + ": video id does not match file name");
        if (video.video_id.starts_with("test_"))
            dataset.test_videos.push_back(std::move(video));
        else
            dataset.train_videos.push_back(std::move(video));
    }
    validate_dataset(dataset);
    return dataset;
}

} // namespace tsact
