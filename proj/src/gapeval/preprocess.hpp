#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gapeval/types.hpp"

namespace gapeval {

/// A sequence expressed relative to each actor's own hip center, plus what is
/// needed to undo that: the removed hip-center trajectories and the derived
/// actor offset channel (second actor's hip center minus the first's, zero
/// for single-actor data).
struct CenteredSequence {
    MarkerSequence seq;
    std::size_t actor_count = 0;
    std::vector<double> hip_centers;   // actor_count x frames x 3
    std::vector<double> actor_offset;  // frames x 3

    const double* hip_center(std::size_t actor, std::size_t t) const {
        return &hip_centers[(actor * seq.frames() + t) * 3];
    }
    const double* offset(std::size_t t) const { return &actor_offset[t * 3]; }
};

/// Subtracts each actor's per-frame hip-marker centroid from all of that
/// actor's markers. Every hip marker must be present at every frame.
CenteredSequence center_hips(const MarkerSequence& seq, const SkeletonConfig& skel);

/// Exact inverse of center_hips, including presence flags.
MarkerSequence decenter(const CenteredSequence& centered, const SkeletonConfig& skel);

enum class Augment { mirror_x, mirror_y, swap_actors };

Augment augment_from_name(const std::string& name);
const char* augment_name(Augment mode);

/// Data augmentation on a raw (uncentered) sequence:
///  - mirror_x / mirror_y negate that axis and swap the configured
///    left/right marker labels, so each is an involution;
///  - swap_actors exchanges the two actors' trajectories marker by marker
///    (requires a two-actor skeleton with matching marker names).
MarkerSequence augment(const MarkerSequence& seq, const SkeletonConfig& skel, Augment mode);

} // namespace gapeval
