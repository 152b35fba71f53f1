#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tsact/synthdata.hpp"
#include "tsact/trainer.hpp"

namespace tsact {

/// Sectioned key/value configuration file: `[section]` headers, `key = value`
/// lines, `#` comments. Every key must be consumed by the reader; unknown
/// keys fail fast with the offending line.
class ConfigFile {
public:
    static ConfigFile parse(const std::filesystem::path& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    std::string require_string(const std::string& section, const std::string& key);
    long get_int(const std::string& section, const std::string& key, long fallback);
    long require_int(const std::string& section, const std::string& key);
    double get_double(const std::string& section, const std::string& key, double fallback);
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback);
    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        std::vector<double> fallback);

    /// Throws ConfigError naming the first key that no reader asked for.
    void check_fully_consumed() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;

    Entry* find(const std::string& section, const std::string& key);
};

// Config-file readers for the two pipeline configurations. Each consumes its
// sections; combine with check_fully_consumed() to reject typos.
SynthConfig read_synth_config(ConfigFile& file);
TrainConfig read_train_config(ConfigFile& file);

// Effective-configuration snapshots (defaults materialized) for manifests.
std::vector<std::pair<std::string, std::string>> snapshot(const SynthConfig& cfg);
std::vector<std::pair<std::string, std::string>> snapshot(const TrainConfig& cfg);

// Run manifest: records the effective configuration, seeds, paths and wall
// clock of one CLI command. Written before the pipeline starts; the end time
// is appended on completion.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> entries;

    void write_started(const std::filesystem::path& path) const;
    void append_finished(const std::filesystem::path& path) const;
};

} // namespace tsact
