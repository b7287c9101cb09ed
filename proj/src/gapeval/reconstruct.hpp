#pragma once

#include <array>
#include <memory>

#include "gapeval/ridge.hpp"
#include "gapeval/types.hpp"

namespace gapeval {

/// Gap-filling contract: given a sequence (gaps may be raw or already
/// interpolated) and the mask of entries to reconstruct, return a
/// fully-present sequence of the same shape with observed entries untouched.
class Reconstructor {
public:
    virtual ~Reconstructor() = default;
    virtual MarkerSequence fill(const MarkerSequence& corrupted, const ObservationMask& mask,
                                const SkeletonConfig& skel) const = 0;
};

/// No-learning baseline: the cubic interpolation output itself.
MarkerSequence fill_interpolation(const MarkerSequence& corrupted, const ObservationMask& mask);

class InterpolationReconstructor final : public Reconstructor {
public:
    MarkerSequence fill(const MarkerSequence& corrupted, const ObservationMask& mask,
                        const SkeletonConfig& skel) const override;
};

class RidgeReconstructor final : public Reconstructor {
public:
    explicit RidgeReconstructor(RidgeDenoiser model) : model_(std::move(model)) {}

    MarkerSequence fill(const MarkerSequence& corrupted, const ObservationMask& mask,
                        const SkeletonConfig& skel) const override;

    const RidgeDenoiser& model() const { return model_; }

private:
    RidgeDenoiser model_;
};

/// Iterative fill in body order hips, torso, head, limbs: each step runs its
/// part's reconstructor on the current working sequence (starting from the
/// interpolated input) and overwrites exactly that part's missing entries, so
/// later parts see earlier parts' predictions.
MarkerSequence fill_hips_outwards(const std::array<const Reconstructor*, 4>& part_models,
                                  const MarkerSequence& corrupted, const ObservationMask& mask,
                                  const SkeletonConfig& skel);

} // namespace gapeval
