#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gapeval/rng.hpp"
#include "gapeval/types.hpp"

namespace gapeval {

enum class GapMode { iid, window, bodypart };

GapMode gap_mode_from_name(const std::string& name);
const char* gap_mode_name(GapMode mode);

/// How to knock entries out of a clean sequence. Frames 0 and T-1 are never
/// corrupted, so downstream interpolation needs no extrapolation path.
struct GapSpec {
    GapMode mode = GapMode::window;
    double p = 0.0;                  // iid: per-entry missing probability
    std::size_t count = 0;           // window: number of distinct markers hit
    std::size_t duration = 0;        // window/bodypart: gap length, frames
    BodyPart part = BodyPart::hips;  // bodypart: which part loses its markers
    std::uint64_t seed = 0;

    void validate(std::size_t frames, std::size_t markers) const;
};

/// Draws an observation mask for a T x M block. iid and window modes need no
/// skeleton; bodypart mode resolves the part's markers through `skel` against
/// `marker_ids`. Deterministic given spec.seed.
ObservationMask sample_mask(std::size_t frames, std::size_t markers, const GapSpec& spec);
ObservationMask sample_mask(std::size_t frames, const std::vector<std::string>& marker_ids,
                            const GapSpec& spec, const SkeletonConfig& skel);

/// Gap-count and gap-duration schedule for epoch `ep`: linear growth rounded
/// half-away-from-zero, capped at M markers and T-2 frames respectively.
std::pair<std::size_t, std::size_t> curriculum(int ep, const CurriculumParams& params,
                                               std::size_t frames, std::size_t markers);

/// Noise schedule (tanh((ep - 10) / 20) + 1) * c / 2: starts near zero,
/// reaches c/2 at epoch 10, approaches c from below.
double noise_sigma(int ep, double c);

/// Adds zero-mean Gaussian noise with the given sigma per coordinate to
/// exactly the entries the mask marks missing; observed entries pass through
/// untouched. The input must be fully present (it is the clean reference).
MarkerSequence add_masked_noise(const MarkerSequence& seq, const ObservationMask& mask,
                                double sigma, std::uint64_t seed);

/// Adds the same noise to every present entry.
MarkerSequence add_global_noise(const MarkerSequence& seq, double sigma, std::uint64_t seed);

/// Clears presence where the mask says missing and drops the values there.
MarkerSequence apply_mask(const MarkerSequence& seq, const ObservationMask& mask);

} // namespace gapeval
