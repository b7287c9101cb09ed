#include "gapeval/corrupt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gapeval/error.hpp"

namespace gapeval {

GapMode gap_mode_from_name(const std::string& name) {
    if (name == "iid") return GapMode::iid;
    if (name == "window") return GapMode::window;
    if (name == "bodypart") return GapMode::bodypart;
    throw_usage("unknown gap mode '" + name + "' (expected iid, window or bodypart)");
}

const char* gap_mode_name(GapMode mode) {
    switch (mode) {
        case GapMode::iid: return "iid";
        case GapMode::window: return "window";
        case GapMode::bodypart: return "bodypart";
    }
    throw_usage("invalid gap mode");
}

void GapSpec::validate(std::size_t frames, std::size_t markers) const {
    if (frames < 2) throw_data("gap sampling needs at least two frames");
    switch (mode) {
        case GapMode::iid:
            if (p < 0.0 || p > 1.0) throw_usage("missing probability must be in [0, 1]");
            break;
        case GapMode::window:
            if (count > markers)
                throw_usage("gap count " + std::to_string(count) + " exceeds marker count " +
                            std::to_string(markers));
            [[fallthrough]];
        case GapMode::bodypart:
            if (duration > frames - 2)
                throw_usage("gap duration " + std::to_string(duration) +
                            " does not fit: at most " + std::to_string(frames - 2) +
                            " frames can be missing");
            break;
    }
}

namespace {

/// Gap onset for a run of `duration` missing frames, uniform over [1, T-1-d].
std::size_t draw_onset(Rng& rng, std::size_t frames, std::size_t duration) {
    return 1 + static_cast<std::size_t>(rng.uniform_below(frames - 1 - duration));
}

void mark_gap(ObservationMask& mask, std::size_t marker, std::size_t onset, std::size_t duration) {
    for (std::size_t t = onset; t < onset + duration; ++t) mask.set(t, marker, false);
}

ObservationMask sample_iid(std::size_t frames, std::size_t markers, const GapSpec& spec) {
    ObservationMask mask(frames, markers, true);
    Rng rng(spec.seed);
    for (std::size_t t = 1; t + 1 < frames; ++t)
        for (std::size_t m = 0; m < markers; ++m)
            if (rng.uniform() < spec.p) mask.set(t, m, false);
    return mask;
}

ObservationMask sample_window(std::size_t frames, std::size_t markers, const GapSpec& spec) {
    ObservationMask mask(frames, markers, true);
    if (spec.count == 0 || spec.duration == 0) return mask;
    Rng rng(spec.seed);
    std::vector<std::size_t> pool(markers);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < spec.count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(markers - i));
        std::swap(pool[i], pool[j]);
        mark_gap(mask, pool[i], draw_onset(rng, frames, spec.duration), spec.duration);
    }
    return mask;
}

} // namespace

ObservationMask sample_mask(std::size_t frames, std::size_t markers, const GapSpec& spec) {
    spec.validate(frames, markers);
    switch (spec.mode) {
        case GapMode::iid: return sample_iid(frames, markers, spec);
        case GapMode::window: return sample_window(frames, markers, spec);
        case GapMode::bodypart:
            throw_usage("bodypart gap sampling needs a skeleton config");
    }
    throw_usage("invalid gap mode");
}

ObservationMask sample_mask(std::size_t frames, const std::vector<std::string>& marker_ids,
                            const GapSpec& spec, const SkeletonConfig& skel) {
    if (spec.mode != GapMode::bodypart) return sample_mask(frames, marker_ids.size(), spec);
    spec.validate(frames, marker_ids.size());

    ObservationMask mask(frames, marker_ids.size(), true);
    if (spec.duration == 0) return mask;
    Rng rng(spec.seed);
    std::size_t onset = draw_onset(rng, frames, spec.duration);
    for (const auto& id : skel.part(spec.part)) {
        auto it = std::find(marker_ids.begin(), marker_ids.end(), id);
        if (it == marker_ids.end())
            throw_data("skeleton marker '" + id + "' not found in the sequence");
        mark_gap(mask, static_cast<std::size_t>(it - marker_ids.begin()), onset, spec.duration);
    }
    return mask;
}

std::pair<std::size_t, std::size_t> curriculum(int ep, const CurriculumParams& params,
                                               std::size_t frames, std::size_t markers) {
    if (ep < 0) throw_usage("epoch index must be non-negative");
    if (frames < 2) throw_data("curriculum needs at least two frames");
    params.validate();
    auto rounded = [](double v) { return static_cast<std::size_t>(std::llround(v)); };
    std::size_t number = std::min(rounded(ep * params.n_rate + params.n_start), markers);
    std::size_t duration = std::min(rounded(ep * params.d_rate + params.d_start), frames - 2);
    return {number, duration};
}

double noise_sigma(int ep, double c) {
    if (ep < 0) throw_usage("epoch index must be non-negative");
    if (!(c > 0.0)) throw_usage("noise cap c must be positive");
    return (std::tanh((ep - 10.0) / 20.0) + 1.0) * c / 2.0;
}

MarkerSequence add_masked_noise(const MarkerSequence& seq, const ObservationMask& mask,
                                double sigma, std::uint64_t seed) {
    mask.require_shape(seq);
    if (!seq.fully_present()) throw_data("masked noise needs a fully present clean sequence");
    if (sigma < 0.0) throw_usage("sigma must be non-negative");
    MarkerSequence out = seq;
    Rng rng(seed);
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m)
            if (mask.missing(t, m))
                for (std::size_t c = 0; c < 3; ++c) out.at(t, m, c) += rng.gaussian(sigma);
    return out;
}

MarkerSequence add_global_noise(const MarkerSequence& seq, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw_usage("sigma must be non-negative");
    MarkerSequence out = seq;
    Rng rng(seed);
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m)
            if (seq.present(t, m))
                for (std::size_t c = 0; c < 3; ++c) out.at(t, m, c) += rng.gaussian(sigma);
    return out;
}

MarkerSequence apply_mask(const MarkerSequence& seq, const ObservationMask& mask) {
    mask.require_shape(seq);
    MarkerSequence out = seq;
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m)
            if (mask.missing(t, m)) {
                out.set_present(t, m, false);
                out.set_position(t, m, {0.0, 0.0, 0.0});
            }
    return out;
}

} // namespace gapeval
