#include "gapeval/reconstruct.hpp"

#include <string>

#include "gapeval/error.hpp"
#include "gapeval/interpolate.hpp"

namespace gapeval {

MarkerSequence fill_interpolation(const MarkerSequence& corrupted, const ObservationMask& mask) {
    mask.require_shape(corrupted);
    return interpolate_gaps(corrupted);
}

MarkerSequence InterpolationReconstructor::fill(const MarkerSequence& corrupted,
                                                const ObservationMask& mask,
                                                const SkeletonConfig&) const {
    return fill_interpolation(corrupted, mask);
}

MarkerSequence RidgeReconstructor::fill(const MarkerSequence& corrupted,
                                        const ObservationMask& mask,
                                        const SkeletonConfig& skel) const {
    return fill_ridge(model_, corrupted, mask, skel);
}

MarkerSequence fill_hips_outwards(const std::array<const Reconstructor*, 4>& part_models,
                                  const MarkerSequence& corrupted, const ObservationMask& mask,
                                  const SkeletonConfig& skel) {
    mask.require_shape(corrupted);
    for (std::size_t i = 0; i < part_models.size(); ++i)
        if (!part_models[i])
            throw_usage(std::string("no reconstructor for body part '") +
                        body_part_name(kBodyPartOrder[i]) + "'");
    for (BodyPart part : kBodyPartOrder)
        if (skel.part(part).empty())
            throw_data(std::string("body part '") + body_part_name(part) + "' has no markers");

    auto index = skel.resolve(corrupted);
    MarkerSequence working = interpolate_gaps(corrupted);
    const std::size_t T = working.frames();

    for (std::size_t i = 0; i < kBodyPartOrder.size(); ++i) {
        BodyPart part = kBodyPartOrder[i];
        const char* part_name = body_part_name(part);

        ObservationMask part_mask(T, working.markers(), true);
        std::size_t missing = 0;
        for (const auto& id : skel.part(part)) {
            std::size_t m = index.at(id);
            for (std::size_t t = 0; t < T; ++t)
                if (mask.missing(t, m)) {
                    part_mask.set(t, m, false);
                    ++missing;
                }
        }
        if (missing == 0) continue;

        MarkerSequence pred;
        try {
            pred = part_models[i]->fill(working, part_mask, skel);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string("part '") + part_name + "': " + e.what());
        }
        if (pred.frames() != T || pred.marker_ids() != working.marker_ids())
            throw_data(std::string("part '") + part_name +
                       "' reconstructor returned a different shape");

        for (const auto& id : skel.part(part)) {
            std::size_t m = index.at(id);
            for (std::size_t t = 0; t < T; ++t) {
                if (!part_mask.missing(t, m)) continue;
                if (!pred.present(t, m))
                    throw_data(std::string("part '") + part_name +
                               "' reconstructor left marker '" + id + "' absent at frame " +
                               std::to_string(t));
                working.set_position(t, m, pred.position(t, m));
            }
        }
    }
    return working;
}

} // namespace gapeval
