#pragma once

#include <cstddef>
#include <cstdint>

#include "gapeval/types.hpp"

namespace gapeval {

/// Total sinusoid amplitude per horizontal axis (cm) that lands the clean
/// sequence's frame-to-frame velocity change near 0.52 cm at 120 fps.
inline constexpr double kDefaultAmplitude = 118.0;

/// Bones connect markers of a single rigidly-moving part, so generated bone
/// lengths are constant up to rounding; measured drift stays under this.
inline constexpr double kBoneDriftBound = 1e-9;

struct SynthSpec {
    std::size_t actors = 2;
    double seconds = 10.0;
    double fps = 120.0;
    double amplitude = kDefaultAmplitude;  // cm; 0 freezes all motion
    double freq_lo = 0.4;                  // Hz
    double freq_hi = 3.2;                  // Hz
    std::uint64_t seed = 0;

    void validate() const;
};

/// Band-limited synthetic motion: a rigid base pose per actor carried by a
/// per-actor global sum-of-sinusoids translation plus a smaller rigid
/// translation per body part, with two actors drifting through each other's
/// paths on offset lanes. Fully present, deterministic given seed.
MarkerSequence generate(const SynthSpec& spec, const SkeletonConfig& skel);

/// Full-body layout: 63 markers per actor with six bones (head, hips, both
/// forearms, both lower legs, all spanning at least 20 cm) and left/right
/// and front/back mirror pairs.
SkeletonConfig full_skeleton(std::size_t actors);

/// Desk-scale layout: 12 markers per actor, four bones.
SkeletonConfig minimal_skeleton(std::size_t actors);

} // namespace gapeval
