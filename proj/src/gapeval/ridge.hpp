#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gapeval/preprocess.hpp"
#include "gapeval/types.hpp"

namespace gapeval {

/// Windowed linear denoiser: for each marker, one ridge-regression weight set
/// per coordinate mapping the flattened feature window (all markers'
/// hips-centered coordinates plus the actor-offset channel per frame, plus a
/// bias) to the clean centered value. Markers never seen missing during
/// training fall back to copying their own centre-frame input channel.
///
/// Memory note: training keeps one FxF normal matrix per marker that has
/// missing samples, F = (2w+1)(3M+3)+1; sized for desk-scale marker sets.
struct RidgeDenoiser {
    std::size_t w = 0;  // window radius, frames
    double reg = 0.0;
    std::size_t actor_count = 0;
    std::vector<std::string> marker_ids;
    Eigen::MatrixXd weights;           // feature_dim x 3M, column-per-target
    std::vector<std::uint8_t> fitted;  // per marker: solved vs passthrough
    bool trained = false;

    std::size_t channels() const { return marker_ids.size() * 3 + 3; }
    std::size_t feature_dim() const { return (2 * w + 1) * channels() + 1; }
};

/// Epoch loop: sample window-mode gaps per curriculum(ep), drop them,
/// interpolate, perturb the interpolated values at missing entries with
/// noise_sigma(ep, c) Gaussian noise, hips-center, then accumulate normal
/// equations from frames where each marker is missing, targeting the clean
/// positions centered by the corrupted sequence's own hip centers (the only
/// centers available at fill time). One regularized solve per marker at the
/// end.
RidgeDenoiser train_ridge(const std::vector<MarkerSequence>& clean, const SkeletonConfig& skel,
                          const CurriculumParams& params, int epochs, std::size_t w, double reg,
                          std::uint64_t seed);

/// Interpolates gaps, centers, predicts every coordinate the mask marks
/// missing from its window features, and writes the de-centered predictions
/// back over exactly those entries.
MarkerSequence fill_ridge(const RidgeDenoiser& model, const MarkerSequence& corrupted,
                          const ObservationMask& mask, const SkeletonConfig& skel);

void save_ridge(const RidgeDenoiser& model, const std::string& path);
RidgeDenoiser load_ridge(const std::string& path);

/// Feature vector for frame t (window clamped at the sequence ends).
void assemble_features(const CenteredSequence& centered, std::size_t t, std::size_t w,
                       Eigen::VectorXd& out);

} // namespace gapeval
