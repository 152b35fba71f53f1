#include "tsact/config.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "tsact/version.hpp"

namespace tsact {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

ConfigFile ConfigFile::parse(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path.string());
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile file;
    file.origin_ = origin;
    std::stringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key '" + key + "' outside any [section]");
        auto [it, inserted] = file.sections_[section].insert({key, {value, line_no, false}});
        if (!inserted)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "' in [" + section + "]");
    }
    return file;
}

ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    kit->second.consumed = true;
    return &kit->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto sit = sections_.find(section);
    return sit != sections_.end() && sit->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) {
    Entry* e = find(section, key);
    return e ? e->value : fallback;
}

std::string ConfigFile::require_string(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e)
        throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
    return e->value;
}

long ConfigFile::get_int(const std::string& section, const std::string& key, long fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t idx = 0;
        const long v = std::stol(e->value, &idx);
        if (idx != e->value.size()) throw std::invalid_argument(e->value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' must be an integer, got '" + e->value + "'");
    }
}

long ConfigFile::require_int(const std::string& section, const std::string& key) {
    if (!has(section, key))
        throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
    return get_int(section, key, 0);
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t idx = 0;
        const double v = std::stod(e->value, &idx);
        if (idx != e->value.size()) throw std::invalid_argument(e->value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' must be a number, got '" + e->value + "'");
    }
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t idx = 0;
        const std::uint64_t v = std::stoull(e->value, &idx);
        if (idx != e->value.size()) throw std::invalid_argument(e->value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' must be an unsigned integer, got '" + e->value + "'");
    }
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key,
                                                std::vector<double> fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const std::string t = trim(token);
        try {
            std::size_t idx = 0;
            const double v = std::stod(t, &idx);
            if (idx != t.size()) throw std::invalid_argument(t);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key +
                              "' must be a comma-separated number list");
        }
    }
    if (out.empty())
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + key + "' is empty");
    return out;
}

void ConfigFile::check_fully_consumed() const {
    for (const auto& [section, keys] : sections_) {
        for (const auto& [key, entry] : keys) {
            if (!entry.consumed)
                throw ConfigError(origin_ + ":" + std::to_string(entry.line) +
                                  ": unknown key '" + key + "' in [" + section + "]");
        }
    }
}

SynthConfig read_synth_config(ConfigFile& file) {
    SynthConfig cfg;
    cfg.num_videos = static_cast<int>(file.require_int("dataset", "num_videos"));
    cfg.video_length = static_cast<int>(file.require_int("dataset", "video_length"));
    cfg.num_classes = static_cast<int>(file.require_int("dataset", "num_classes"));
    cfg.instances_per_video = static_cast<int>(file.require_int("dataset", "instances_per_video"));
    cfg.feature_dim = static_cast<int>(file.require_int("dataset", "feature_dim"));
    cfg.min_segment_len =
        static_cast<int>(file.get_int("dataset", "min_segment_len", cfg.min_segment_len));
    cfg.max_segment_len =
        static_cast<int>(file.get_int("dataset", "max_segment_len", cfg.max_segment_len));
    cfg.min_gap = static_cast<int>(file.get_int("dataset", "min_gap", cfg.min_gap));
    cfg.max_gap = static_cast<int>(file.get_int("dataset", "max_gap", cfg.max_gap));
    cfg.class_signal = file.get_double("dataset", "class_signal", cfg.class_signal);
    cfg.background_signal =
        file.get_double("dataset", "background_signal", cfg.background_signal);
    cfg.noise_std = file.get_double("dataset", "noise_std", cfg.noise_std);
    cfg.frame_rate = file.get_double("dataset", "frame_rate", cfg.frame_rate);
    cfg.num_test_instances =
        static_cast<int>(file.get_int("dataset", "num_test_instances", cfg.num_test_instances));
    cfg.timestamp_pad_seconds =
        file.get_double("dataset", "timestamp_pad_seconds", cfg.timestamp_pad_seconds);
    const std::string protocol = file.get_string("dataset", "timestamp_protocol", "ts");
    if (protocol == "ts")
        cfg.annotation_protocol = TimestampProtocol::kUniformPadded;
    else if (protocol == "ts-in-gt")
        cfg.annotation_protocol = TimestampProtocol::kGaussianCentered;
    else if (protocol == "none")
        cfg.annotation_protocol = TimestampProtocol::kNone;
    else
        throw ConfigError("timestamp_protocol must be one of ts, ts-in-gt, none");
    cfg.seed = file.get_u64("dataset", "seed", cfg.seed);
    cfg.validate();
    return cfg;
}

TrainConfig read_train_config(ConfigFile& file) {
    TrainConfig cfg;
    cfg.init_half_width = file.get_double("train", "init_half_width", cfg.init_half_width);
    cfg.init_steepness = file.get_double("train", "init_steepness", cfg.init_steepness);
    cfg.base_epochs = static_cast<int>(file.get_int("train", "base_epochs", cfg.base_epochs));
    cfg.update_epochs =
        static_cast<int>(file.get_int("train", "update_epochs", cfg.update_epochs));
    cfg.frames_per_instance = static_cast<int>(
        file.get_int("train", "frames_per_instance", cfg.frames_per_instance));
    cfg.batch_size = static_cast<int>(file.get_int("train", "batch_size", cfg.batch_size));
    cfg.learning_rate = file.get_double("train", "learning_rate", cfg.learning_rate);
    cfg.base_keep_fraction =
        file.get_double("train", "base_keep_fraction", cfg.base_keep_fraction);
    cfg.ts_pad_seconds = file.get_double("train", "ts_pad_seconds", cfg.ts_pad_seconds);
    cfg.ts_in_gt_std_seconds =
        file.get_double("train", "ts_in_gt_std_seconds", cfg.ts_in_gt_std_seconds);
    cfg.seed_data = file.get_u64("train", "seed_data", cfg.seed_data);
    cfg.seed_sampling = file.get_u64("train", "seed_sampling", cfg.seed_sampling);
    cfg.seed_model = file.get_u64("train", "seed_model", cfg.seed_model);

    cfg.refine.threshold_grid =
        file.get_double_list("refine", "thresholds", cfg.refine.threshold_grid);
    cfg.refine.min_component =
        static_cast<int>(file.get_int("refine", "min_component", cfg.refine.min_component));
    cfg.refine.update_fraction =
        file.get_double("refine", "update_fraction", cfg.refine.update_fraction);
    cfg.refine.rates.center = file.get_double("refine", "rate_center", cfg.refine.rates.center);
    cfg.refine.rates.width = file.get_double("refine", "rate_width", cfg.refine.rates.width);
    cfg.refine.rates.steepness =
        file.get_double("refine", "rate_steepness", cfg.refine.rates.steepness);
    cfg.refine.update_period =
        static_cast<int>(file.get_int("refine", "update_period", cfg.refine.update_period));
    cfg.refine.default_steepness =
        file.get_double("refine", "fit_default_steepness", cfg.refine.default_steepness);
    cfg.validate();
    return cfg;
}

std::vector<std::pair<std::string, std::string>> snapshot(const SynthConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("dataset.num_videos", std::to_string(cfg.num_videos));
    out.emplace_back("dataset.video_length", std::to_string(cfg.video_length));
    out.emplace_back("dataset.num_classes", std::to_string(cfg.num_classes));
    out.emplace_back("dataset.instances_per_video", std::to_string(cfg.instances_per_video));
    out.emplace_back("dataset.feature_dim", std::to_string(cfg.feature_dim));
    out.emplace_back("dataset.min_segment_len", std::to_string(cfg.min_segment_len));
    out.emplace_back("dataset.max_segment_len", std::to_string(cfg.max_segment_len));
    out.emplace_back("dataset.min_gap", std::to_string(cfg.min_gap));
    out.emplace_back("dataset.max_gap", std::to_string(cfg.max_gap));
    out.emplace_back("dataset.class_signal", format_double(cfg.class_signal));
    out.emplace_back("dataset.background_signal", format_double(cfg.background_signal));
    out.emplace_back("dataset.noise_std", format_double(cfg.noise_std));
    out.emplace_back("dataset.frame_rate", format_double(cfg.frame_rate));
    out.emplace_back("dataset.num_test_instances", std::to_string(cfg.num_test_instances));
    out.emplace_back("dataset.timestamp_pad_seconds", format_double(cfg.timestamp_pad_seconds));
    const char* protocol = cfg.annotation_protocol == TimestampProtocol::kUniformPadded
                               ? "ts"
                               : cfg.annotation_protocol == TimestampProtocol::kGaussianCentered
                                     ? "ts-in-gt"
                                     : "none";
    out.emplace_back("dataset.timestamp_protocol", protocol);
    out.emplace_back("dataset.seed", std::to_string(cfg.seed));
    return out;
}

std::vector<std::pair<std::string, std::string>> snapshot(const TrainConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("train.init_half_width", format_double(cfg.init_half_width));
    out.emplace_back("train.init_steepness", format_double(cfg.init_steepness));
    out.emplace_back("train.base_epochs", std::to_string(cfg.base_epochs));
    out.emplace_back("train.update_epochs", std::to_string(cfg.update_epochs));
    out.emplace_back("train.frames_per_instance", std::to_string(cfg.frames_per_instance));
    out.emplace_back("train.batch_size", std::to_string(cfg.batch_size));
    out.emplace_back("train.learning_rate", format_double(cfg.learning_rate));
    out.emplace_back("train.base_keep_fraction", format_double(cfg.base_keep_fraction));
    out.emplace_back("train.ts_pad_seconds", format_double(cfg.ts_pad_seconds));
    out.emplace_back("train.ts_in_gt_std_seconds", format_double(cfg.ts_in_gt_std_seconds));
    out.emplace_back("train.seed_data", std::to_string(cfg.seed_data));
    out.emplace_back("train.seed_sampling", std::to_string(cfg.seed_sampling));
    out.emplace_back("train.seed_model", std::to_string(cfg.seed_model));
    out.emplace_back("train.threads", std::to_string(cfg.threads));
    std::string grid;
    for (double t : cfg.refine.threshold_grid) {
        if (!grid.empty()) grid += ",";
        grid += format_double(t);
    }
    out.emplace_back("refine.thresholds", grid);
    out.emplace_back("refine.min_component", std::to_string(cfg.refine.min_component));
    out.emplace_back("refine.update_fraction", format_double(cfg.refine.update_fraction));
    out.emplace_back("refine.rate_center", format_double(cfg.refine.rates.center));
    out.emplace_back("refine.rate_width", format_double(cfg.refine.rates.width));
    out.emplace_back("refine.rate_steepness", format_double(cfg.refine.rates.steepness));
    out.emplace_back("refine.update_period", std::to_string(cfg.refine.update_period));
    out.emplace_back("refine.fit_default_steepness",
                     format_double(cfg.refine.default_steepness));
    return out;
}

namespace {

std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

void RunManifest::write_started(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "tool = tsact\n";
    out << "version = " << kVersion << "\n";
    out << "command = " << command << "\n";
    out << "started_at = " << now_utc() << "\n";
    for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
    if (!out.flush()) throw Error("failed writing " + path.string());
}

void RunManifest::append_finished(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot open " + path.string() + " for appending");
    out << "finished_at = " << now_utc() << "\n";
    if (!out.flush()) throw Error("failed writing " + path.string());
}

} // namespace tsact
