#include "tsact/plateau.hpp"

#include <algorithm>
#include <cmath>

namespace tsact {

namespace {

// Logistic sigmoid evaluated without overflow: exp() is only taken of
// non-positive arguments.
double stable_sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace

double eval_plateau(double x, const PlateauParams& p) {
    // 1/((e^{s(x-c-w)}+1)(e^{s(-x+c-w)}+1)) as a product of two sigmoids.
    const double rising = p.steepness * (x - p.center + p.half_width);
    const double falling = p.steepness * (p.center + p.half_width - x);
    return stable_sigmoid(rising) * stable_sigmoid(falling);
}

FrameInterval plateau_support(const PlateauParams& p, double threshold, int video_length) {
    if (video_length <= 0) return {};
    // The density is unimodal and symmetric about the center, so the
    // above-threshold frames form one run containing the frame nearest the
    // (clamped) center.
    const int lo_peak = std::clamp(static_cast<int>(std::floor(p.center)), 0, video_length - 1);
    const int hi_peak = std::clamp(static_cast<int>(std::ceil(p.center)), 0, video_length - 1);
    int peak = lo_peak;
    if (eval_plateau(hi_peak, p) > eval_plateau(lo_peak, p)) peak = hi_peak;
    if (!(eval_plateau(peak, p) > threshold)) return {};

    FrameInterval run{peak, peak};
    while (run.first > 0 && eval_plateau(run.first - 1, p) > threshold) --run.first;
    while (run.last + 1 < video_length && eval_plateau(run.last + 1, p) > threshold) ++run.last;
    return run;
}

std::vector<double> normalize_to_pmf(const PlateauParams& p, int video_length) {
    if (video_length < 1) throw Error("normalize_to_pmf: video_length must be >= 1");
    std::vector<double> pmf(static_cast<std::size_t>(video_length));
    double total = 0.0;
    for (int x = 0; x < video_length; ++x) {
        pmf[static_cast<std::size_t>(x)] = eval_plateau(x, p);
        total += pmf[static_cast<std::size_t>(x)];
    }
    // Mass below the floor means the plateau lies essentially outside the
    // video; normalizing such residual tails is numerically meaningless.
    constexpr double kMinimumMass = 1e-12;
    if (!(total > kMinimumMass)) {
        throw DegenerateDistribution(
            "plateau mass underflows on the video frame grid (center=" +
            format_double(p.center) + ", video_length=" + std::to_string(video_length) + ")");
    }
    for (double& q : pmf) q /= total;
    return pmf;
}

std::vector<int> sample_frames(const std::vector<double>& pmf, int count, Rng& rng) {
    if (pmf.empty()) throw Error("sample_frames: empty pmf");
    if (count < 1) throw Error("sample_frames: count must be >= 1");
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] < 0.0) throw Error("sample_frames: negative pmf entry");
        acc += pmf[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0; // guard against accumulated rounding at the tail

    std::vector<int> frames(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double u = rng.next_double();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        frames[static_cast<std::size_t>(k)] =
            static_cast<int>(std::distance(cdf.begin(), it == cdf.end() ? cdf.end() - 1 : it));
    }
    return frames;
}

double clamp_center(double center, int video_length) {
    return std::clamp(center, 0.0, static_cast<double>(video_length - 1));
}

} // namespace tsact
