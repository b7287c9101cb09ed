#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gapeval/types.hpp"

namespace gapeval {

/// per_coordinate averages squared error over all scalar entries before the
/// root; per_marker averages squared 3-vector norms over marker slots.
enum class NormMode { per_coordinate, per_marker };

NormMode norm_mode_from_name(const std::string& name);
const char* norm_mode_name(NormMode mode);

struct BoneLengthSeries {
    std::vector<std::string> bone_names;
    std::vector<double> lengths;  // frames x bones
    std::size_t frames = 0;

    std::size_t bones() const { return bone_names.size(); }
    double at(std::size_t t, std::size_t d) const { return lengths[t * bones() + d]; }
};

/// Per frame and bone: Euclidean distance between the centroids of the two
/// marker groups sitting on either end of the bone.
BoneLengthSeries bone_lengths(const MarkerSequence& seq, const SkeletonConfig& skel);

/// Root mean squared position error. When `scope` is given, only entries it
/// marks missing contribute (scoring reconstructed values only); otherwise
/// every entry contributes.
double rmse(const MarkerSequence& pred, const MarkerSequence& gt, NormMode norm,
            const ObservationMask* scope = nullptr);

/// RMS error of first-difference velocities against ground truth (cm/frame).
double vd_gt(const MarkerSequence& pred, const MarkerSequence& gt, NormMode norm);

/// RMS of frame-to-frame velocity changes of the prediction alone; zero for
/// constant-velocity motion, needs no ground truth.
double vd(const MarkerSequence& pred, NormMode norm);

/// RMS bone-length deviation against ground truth.
double bdp_gt(const MarkerSequence& pred, const MarkerSequence& gt, const SkeletonConfig& skel);

/// RMS frame-to-frame bone-length change of the prediction alone.
double bdp(const MarkerSequence& pred, const SkeletonConfig& skel);

struct LossBreakdown {
    double total = 0.0;
    double position = 0.0;
    double velocity = 0.0;
};

/// Masked training loss: mean squared position error over entries missing at
/// each frame, plus lambda times the mean squared velocity error where the
/// velocity arriving at frame t counts iff the marker is missing at t.
LossBreakdown training_loss(const MarkerSequence& pred, const MarkerSequence& gt,
                            const ObservationMask& miss, double lambda);

} // namespace gapeval
