#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gapeval/error.hpp"

namespace gapeval {

using Vec3 = std::array<double, 3>;

/// A marker trajectory block: T frames by M markers by 3 coordinates, in
/// centimeters, at a fixed frame rate. Entries whose presence flag is false
/// hold no meaningful value and are never read by numeric operations.
///
/// Treated as immutable by every operation in the toolkit: functions take
/// sequences by const reference and return new values.
class MarkerSequence {
public:
    MarkerSequence() = default;
    MarkerSequence(std::size_t frames, std::vector<std::string> marker_ids, double fps);

    std::size_t frames() const { return frames_; }
    std::size_t markers() const { return marker_ids_.size(); }
    double fps() const { return fps_; }
    void set_fps(double fps);
    const std::vector<std::string>& marker_ids() const { return marker_ids_; }

    double& at(std::size_t t, std::size_t m, std::size_t c) { return pos_[index(t, m, c)]; }
    double at(std::size_t t, std::size_t m, std::size_t c) const { return pos_[index(t, m, c)]; }

    Vec3 position(std::size_t t, std::size_t m) const {
        const std::size_t i = index(t, m, 0);
        return {pos_[i], pos_[i + 1], pos_[i + 2]};
    }
    void set_position(std::size_t t, std::size_t m, const Vec3& p) {
        const std::size_t i = index(t, m, 0);
        pos_[i] = p[0];
        pos_[i + 1] = p[1];
        pos_[i + 2] = p[2];
    }

    bool present(std::size_t t, std::size_t m) const { return present_[t * markers() + m] != 0; }
    void set_present(std::size_t t, std::size_t m, bool v) { present_[t * markers() + m] = v ? 1 : 0; }
    bool fully_present() const;
    std::size_t present_count() const;

    /// Index of a marker id, or an error naming the id.
    std::size_t marker_index(const std::string& id) const;

    const std::vector<double>& data() const { return pos_; }
    std::vector<double>& data() { return pos_; }
    const std::vector<std::uint8_t>& presence() const { return present_; }

    /// Checks the structural invariants (finite present values, unique ids,
    /// positive fps). Throws on violation.
    void validate() const;

private:
    std::size_t index(std::size_t t, std::size_t m, std::size_t c) const {
        return (t * markers() + m) * 3 + c;
    }

    std::size_t frames_ = 0;
    double fps_ = 0.0;
    std::vector<std::string> marker_ids_;
    std::vector<double> pos_;            // frames x markers x 3, row-major
    std::vector<std::uint8_t> present_;  // frames x markers
};

using FlatView = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// View of a fully laid out sequence as a T x 3M matrix. Column order is
/// marker-major: m0.x, m0.y, m0.z, m1.x, ... Presence flags are ignored, so
/// callers should only read columns of present markers.
FlatView flatten(const MarkerSequence& seq);

/// Inverse of flatten: rebuilds a fully-present sequence from a T x 3M matrix.
MarkerSequence unflatten(const Eigen::MatrixXd& flat, std::vector<std::string> marker_ids, double fps);

/// First differences out[t] = frames[t+1] - frames[t], in cm/frame, laid out
/// (T-1) x M x 3. Requires every entry present.
std::vector<double> velocity(const MarkerSequence& seq);

/// Per-marker observation flags matching a sequence's shape; true = observed.
/// The per-coordinate form replicates each marker bit across its three
/// coordinates.
class ObservationMask {
public:
    ObservationMask() = default;
    ObservationMask(std::size_t frames, std::size_t markers, bool observed = true)
        : frames_(frames), markers_(markers), observed_(frames * markers, observed ? 1 : 0) {}

    std::size_t frames() const { return frames_; }
    std::size_t markers() const { return markers_; }

    bool observed(std::size_t t, std::size_t m) const { return observed_[t * markers_ + m] != 0; }
    bool missing(std::size_t t, std::size_t m) const { return !observed(t, m); }
    void set(std::size_t t, std::size_t m, bool obs) { observed_[t * markers_ + m] = obs ? 1 : 0; }

    std::size_t missing_count() const;
    const std::vector<std::uint8_t>& raw() const { return observed_; }

    void require_shape(const MarkerSequence& seq) const;

private:
    std::size_t frames_ = 0;
    std::size_t markers_ = 0;
    std::vector<std::uint8_t> observed_;
};

struct BoneDef {
    std::string name;
    std::vector<std::string> end_a;
    std::vector<std::string> end_b;
};

/// The four fill-order body parts. Order is fixed: hips, torso, head, limbs.
enum class BodyPart : int { hips = 0, torso = 1, head = 2, limbs = 3 };

constexpr std::array<BodyPart, 4> kBodyPartOrder = {BodyPart::hips, BodyPart::torso,
                                                    BodyPart::head, BodyPart::limbs};

const char* body_part_name(BodyPart part);
BodyPart body_part_from_name(const std::string& name);

/// Marker-set description: actor assignment, hip anchor markers, body-part
/// grouping in fill order, heuristic bone definitions, and left/right mirror
/// pairs. Construct then validate() against no sequence in particular; use
/// marker ids to resolve against a given sequence.
struct SkeletonConfig {
    std::vector<std::string> actors;                                  // 1 or 2
    std::vector<std::string> marker_ids;                              // all markers, both actors
    std::unordered_map<std::string, std::string> marker_actor;        // marker -> actor
    std::map<std::string, std::vector<std::string>> hip_markers;      // actor -> hip anchor ids
    std::array<std::vector<std::string>, 4> body_parts;               // indexed by BodyPart
    std::vector<BoneDef> bones;
    std::vector<std::pair<std::string, std::string>> mirror_pairs_x;
    std::vector<std::pair<std::string, std::string>> mirror_pairs_y;

    const std::vector<std::string>& part(BodyPart p) const {
        return body_parts[static_cast<int>(p)];
    }

    void validate() const;

    /// Every marker of `seq` must be known here and vice versa; returns the
    /// index of each config marker id within the sequence.
    std::unordered_map<std::string, std::size_t> resolve(const MarkerSequence& seq) const;
};

/// Training schedule knobs: gap count and duration grow linearly with the
/// epoch index, the noise level follows a tanh ramp capped at c.
struct CurriculumParams {
    double n_start = 0.0;
    double n_rate = 0.0;
    double d_start = 0.0;
    double d_rate = 0.0;
    double c = 1.0;       // noise cap, cm
    double lambda = 1.0;  // velocity-loss weight

    void validate() const;
};

/// (stimulus, rater, ordinal rating) triples over a declared ordered category
/// set. A (stimulus, rater) pair appears at most once.
class RatingsTable {
public:
    struct Row {
        std::string stimulus_id;
        std::string rater_id;
        int rating;
    };

    explicit RatingsTable(std::vector<int> categories = {1, 2, 3, 4, 5});

    void add(const std::string& stimulus_id, const std::string& rater_id, int rating);

    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<int>& categories() const { return categories_; }

    /// Stimulus ids in first-seen order.
    std::vector<std::string> stimulus_ids() const;
    std::vector<int> ratings_for(const std::string& stimulus_id) const;

private:
    std::vector<int> categories_;
    std::vector<Row> rows_;
    std::unordered_map<std::string, std::size_t> seen_pairs_;
};

/// Per-stimulus metric values, the carrier between eval, correlate and report.
struct MetricReport {
    struct Row {
        std::string stimulus_id;
        std::string metric;
        double value;
        std::string norm_mode;
    };
    std::vector<Row> rows;

    void add(std::string stimulus, std::string metric, double value, std::string norm_mode);
};

/// Names of the five metrics accepted in MetricReport rows.
bool is_known_metric(const std::string& name);

} // namespace gapeval
