#pragma once

#include <string>
#include <vector>

#include "tsact/common.hpp"

namespace tsact {

/// Parameters of one plateau-shaped sampling density: a flat top of width
/// 2*half_width centred on `center`, with logistic slopes of the given
/// steepness on both sides.
struct PlateauParams {
    double center = 0.0;
    double half_width = 1.0;   // > 0
    double steepness = 1.0;    // > 0, per-frame rate

    bool valid() const { return half_width > 0.0 && steepness > 0.0; }
    bool operator==(const PlateauParams&) const = default;
};

// One frame-sampling distribution, owned by a single annotated action
// instance. instance_index follows ascending initial timestamp order within
// the video.
struct SamplingDistribution {
    PlateauParams params;
    std::string video_id;
    int video_index = 0;     // position of the video in the dataset's train list
    int class_label = 0;
    int instance_index = 0;
};

/// Evaluates the plateau density at real coordinate x. Total over finite
/// inputs; each logistic factor is computed in saturating form so that
/// |steepness*(x-center)| of 1e4 and beyond cannot overflow.
double eval_plateau(double x, const PlateauParams& p);

/// Maximal contiguous run of integer frames in [0, video_length) where the
/// plateau exceeds `threshold`. May be empty (peak below threshold or plateau
/// entirely outside the video).
FrameInterval plateau_support(const PlateauParams& p, double threshold, int video_length);

/// Normalizes the plateau over the video's integer frame grid into a
/// probability vector. Throws DegenerateDistribution when the total mass
/// underflows to zero.
std::vector<double> normalize_to_pmf(const PlateauParams& p, int video_length);

/// Draws `count` frames independently, with replacement, from the pmf.
std::vector<int> sample_frames(const std::vector<double>& pmf, int count, Rng& rng);

// Clamps a center into the valid range [0, video_length-1].
double clamp_center(double center, int video_length);

} // namespace tsact
