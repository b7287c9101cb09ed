#include "gapeval/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace gapeval {

MarkerSequence::MarkerSequence(std::size_t frames, std::vector<std::string> marker_ids, double fps)
    : frames_(frames), fps_(fps), marker_ids_(std::move(marker_ids)) {
    if (frames_ == 0) throw_data("sequence must have at least one frame");
    if (marker_ids_.empty()) throw_data("sequence must have at least one marker");
    for (const auto& id : marker_ids_)
        if (id.empty()) throw_data("marker ids must be non-empty");
    if (!(fps_ > 0.0)) throw_data("fps must be positive");
    std::unordered_set<std::string> uniq(marker_ids_.begin(), marker_ids_.end());
    if (uniq.size() != marker_ids_.size()) throw_data("marker ids must be unique");
    pos_.assign(frames_ * marker_ids_.size() * 3, 0.0);
    present_.assign(frames_ * marker_ids_.size(), 1);
}

void MarkerSequence::set_fps(double fps) {
    if (!(fps > 0.0)) throw_data("fps must be positive");
    fps_ = fps;
}

bool MarkerSequence::fully_present() const {
    return std::all_of(present_.begin(), present_.end(), [](std::uint8_t v) { return v != 0; });
}

std::size_t MarkerSequence::present_count() const {
    return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

std::size_t MarkerSequence::marker_index(const std::string& id) const {
    auto it = std::find(marker_ids_.begin(), marker_ids_.end(), id);
    if (it == marker_ids_.end()) throw_data("unknown marker id: " + id);
    return static_cast<std::size_t>(it - marker_ids_.begin());
}

void MarkerSequence::validate() const {
    if (frames_ == 0 || marker_ids_.empty()) throw_data("empty sequence");
    if (!(fps_ > 0.0)) throw_data("fps must be positive");
    for (std::size_t t = 0; t < frames_; ++t) {
        for (std::size_t m = 0; m < markers(); ++m) {
            if (!present(t, m)) continue;
            for (std::size_t c = 0; c < 3; ++c) {
                if (!std::isfinite(at(t, m, c))) {
                    throw_data("non-finite value at frame " + std::to_string(t) + ", marker " +
                               marker_ids_[m]);
                }
            }
        }
    }
}

FlatView flatten(const MarkerSequence& seq) {
    return FlatView(seq.data().data(), static_cast<Eigen::Index>(seq.frames()),
                    static_cast<Eigen::Index>(3 * seq.markers()));
}

MarkerSequence unflatten(const Eigen::MatrixXd& flat, std::vector<std::string> marker_ids, double fps) {
    if (flat.cols() != static_cast<Eigen::Index>(3 * marker_ids.size()))
        throw_data("flat matrix width does not match marker count");
    MarkerSequence seq(static_cast<std::size_t>(flat.rows()), std::move(marker_ids), fps);
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m)
            for (std::size_t c = 0; c < 3; ++c)
                seq.at(t, m, c) = flat(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(3 * m + c));
    return seq;
}

std::vector<double> velocity(const MarkerSequence& seq) {
    if (seq.frames() < 2) throw_data("velocity requires at least two frames");
    if (!seq.fully_present()) throw_data("velocity requires a fully-present sequence");
    const std::size_t M = seq.markers();
    std::vector<double> vel((seq.frames() - 1) * M * 3);
    for (std::size_t t = 0; t + 1 < seq.frames(); ++t)
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t c = 0; c < 3; ++c)
                vel[(t * M + m) * 3 + c] = seq.at(t + 1, m, c) - seq.at(t, m, c);
    return vel;
}

std::size_t ObservationMask::missing_count() const {
    return observed_.size() -
           static_cast<std::size_t>(std::count(observed_.begin(), observed_.end(), std::uint8_t{1}));
}

void ObservationMask::require_shape(const MarkerSequence& seq) const {
    if (frames_ != seq.frames() || markers_ != seq.markers())
        throw_data("mask shape does not match sequence");
}

const char* body_part_name(BodyPart part) {
    switch (part) {
        case BodyPart::hips: return "hips";
        case BodyPart::torso: return "torso";
        case BodyPart::head: return "head";
        case BodyPart::limbs: return "limbs";
    }
    return "?";
}

BodyPart body_part_from_name(const std::string& name) {
    for (BodyPart p : kBodyPartOrder)
        if (name == body_part_name(p)) return p;
    throw_data("unknown body part: " + name + " (expected hips, torso, head or limbs)");
}

void SkeletonConfig::validate() const {
    if (actors.empty() || actors.size() > 2)
        throw_data("skeleton must declare one or two actors");
    std::unordered_set<std::string> actor_set(actors.begin(), actors.end());
    if (actor_set.size() != actors.size()) throw_data("duplicate actor id");

    std::unordered_set<std::string> ids(marker_ids.begin(), marker_ids.end());
    if (ids.size() != marker_ids.size()) throw_data("duplicate marker id in skeleton");
    auto known = [&](const std::string& id) { return ids.count(id) != 0; };

    for (const auto& id : marker_ids) {
        auto it = marker_actor.find(id);
        if (it == marker_actor.end()) throw_data("marker without actor assignment: " + id);
        if (!actor_set.count(it->second))
            throw_data("marker " + id + " references unknown actor " + it->second);
    }

    for (const auto& actor : actors) {
        auto it = hip_markers.find(actor);
        if (it == hip_markers.end() || it->second.empty())
            throw_data("actor " + actor + " has no hip markers");
        for (const auto& id : it->second) {
            if (!known(id)) throw_data("hip marker not in marker list: " + id);
            if (marker_actor.at(id) != actor)
                throw_data("hip marker " + id + " does not belong to actor " + actor);
        }
    }

    std::unordered_set<std::string> covered;
    for (BodyPart p : kBodyPartOrder) {
        for (const auto& id : part(p)) {
            if (!known(id))
                throw_data(std::string("body part ") + body_part_name(p) +
                           " references unknown marker " + id);
            covered.insert(id);
        }
    }
    for (const auto& id : marker_ids)
        if (!covered.count(id)) throw_data("marker not assigned to any body part: " + id);

    for (const auto& bone : bones) {
        if (bone.end_a.empty() || bone.end_b.empty())
            throw_data("bone " + bone.name + " has an empty endpoint set");
        std::set<std::string> a(bone.end_a.begin(), bone.end_a.end());
        for (const auto& id : bone.end_a)
            if (!known(id)) throw_data("bone " + bone.name + " references unknown marker " + id);
        for (const auto& id : bone.end_b) {
            if (!known(id)) throw_data("bone " + bone.name + " references unknown marker " + id);
            if (a.count(id)) throw_data("bone " + bone.name + " endpoints share marker " + id);
        }
    }

    auto check_pairs = [&](const std::vector<std::pair<std::string, std::string>>& pairs,
                           const char* which) {
        std::unordered_set<std::string> used;
        for (const auto& [l, r] : pairs) {
            if (!known(l)) throw_data(std::string(which) + " pair references unknown marker " + l);
            if (!known(r)) throw_data(std::string(which) + " pair references unknown marker " + r);
            if (l == r) throw_data(std::string(which) + " pair maps marker " + l + " to itself");
            if (!used.insert(l).second)
                throw_data(std::string(which) + " pairs are not symmetric: marker " + l + " appears twice");
            if (!used.insert(r).second)
                throw_data(std::string(which) + " pairs are not symmetric: marker " + r + " appears twice");
            if (marker_actor.at(l) != marker_actor.at(r))
                throw_data(std::string(which) + " pair (" + l + ", " + r + ") crosses actors");
        }
    };
    check_pairs(mirror_pairs_x, "mirror_x");
    check_pairs(mirror_pairs_y, "mirror_y");
}

std::unordered_map<std::string, std::size_t> SkeletonConfig::resolve(const MarkerSequence& seq) const {
    std::unordered_map<std::string, std::size_t> map;
    map.reserve(marker_ids.size());
    for (const auto& id : marker_ids) map[id] = seq.marker_index(id);
    if (seq.markers() != marker_ids.size())
        throw_data("sequence has markers not covered by the skeleton config");
    return map;
}

void CurriculumParams::validate() const {
    if (n_start < 0 || n_rate < 0 || d_start < 0 || d_rate < 0 || lambda < 0)
        throw_data("curriculum parameters must be non-negative");
    if (!(c > 0)) throw_data("noise cap c must be positive");
}

RatingsTable::RatingsTable(std::vector<int> categories) : categories_(std::move(categories)) {
    if (categories_.size() < 2) throw_data("rating scale needs at least two categories");
    if (!std::is_sorted(categories_.begin(), categories_.end()))
        throw_data("rating categories must be in increasing order");
}

void RatingsTable::add(const std::string& stimulus_id, const std::string& rater_id, int rating) {
    if (std::find(categories_.begin(), categories_.end(), rating) == categories_.end())
        throw_data("rating " + std::to_string(rating) + " outside the declared category set");
    const std::string key = stimulus_id + "\x1f" + rater_id;
    if (seen_pairs_.count(key))
        throw_data("duplicate rating for stimulus " + stimulus_id + " by rater " + rater_id);
    seen_pairs_[key] = rows_.size();
    rows_.push_back({stimulus_id, rater_id, rating});
}

std::vector<std::string> RatingsTable::stimulus_ids() const {
    std::vector<std::string> ids;
    std::unordered_set<std::string> seen;
    for (const auto& row : rows_)
        if (seen.insert(row.stimulus_id).second) ids.push_back(row.stimulus_id);
    return ids;
}

std::vector<int> RatingsTable::ratings_for(const std::string& stimulus_id) const {
    std::vector<int> out;
    for (const auto& row : rows_)
        if (row.stimulus_id == stimulus_id) out.push_back(row.rating);
    return out;
}

void MetricReport::add(std::string stimulus, std::string metric, double value, std::string norm_mode) {
    if (!is_known_metric(metric)) throw_data("unknown metric name: " + metric);
    if (!(value >= 0.0) || !std::isfinite(value))
        throw_data("metric value must be finite and non-negative");
    rows.push_back({std::move(stimulus), std::move(metric), value, std::move(norm_mode)});
}

bool is_known_metric(const std::string& name) {
    return name == "rmse" || name == "vd_gt" || name == "vd" || name == "bdp_gt" || name == "bdp";
}

} // namespace gapeval
