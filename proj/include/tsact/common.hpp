#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsact {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A plateau whose mass underflows to zero on the frame grid of its video.
class DegenerateDistribution : public Error { using Error::Error; };
// Requested segment layout cannot fit in the video length.
class InfeasibleLayout : public Error { using Error::Error; };
// Malformed dataset/checkpoint/model file; message carries file and line/field.
class FormatError : public Error { using Error::Error; };
// Feature or matrix dimensions inconsistent with the model.
class DimensionMismatch : public Error { using Error::Error; };
// Ranking requested for a video with no score matrix.
class MissingScores : public Error { using Error::Error; };
// Curve fit requested over an empty frame interval.
class EmptyInterval : public Error { using Error::Error; };
// Test instance with no frames.
class EmptySegment : public Error { using Error::Error; };
// Distributions and ground-truth segments disagree in count.
class CountMismatch : public Error { using Error::Error; };
// Bad key/value configuration input.
class ConfigError : public Error { using Error::Error; };

// Closed integer frame interval [first, last]; last < first encodes empty.
struct FrameInterval {
    int first = 0;
    int last = -1;

    bool empty() const { return last < first; }
    int length() const { return empty() ? 0 : last - first + 1; }
    bool operator==(const FrameInterval&) const = default;
};

// Deterministic random source. All distributions are derived from the raw
// mt19937_64 stream with explicit arithmetic so that results are identical
// across standard libraries and platforms (std::uniform_int_distribution et
// al. are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], both inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Gaussian draw via Box-Muller; consumes exactly two raw values.
    double normal(double mean, double stddev);

private:
    std::mt19937_64 engine_;
};

// Stable seed derivation for per-(stream, index) sub-generators; splitmix64
// finalizer over the combined words.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

// Shuffles indices [0, n) deterministically with the given rng (Fisher-Yates).
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

// Exact decimal formatting helpers used by every text emitter so that
// identical runs produce byte-identical files.
std::string format_double(double v);

} // namespace tsact
