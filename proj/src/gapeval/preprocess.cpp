#include "gapeval/preprocess.hpp"

#include <algorithm>

#include "gapeval/error.hpp"

namespace gapeval {

namespace {

/// Sequence column of each marker's actor, as an index into skel.actors.
std::vector<std::size_t> actor_of_columns(const MarkerSequence& seq, const SkeletonConfig& skel) {
    std::vector<std::size_t> actor_of(seq.markers());
    auto index = skel.resolve(seq);
    for (const auto& id : skel.marker_ids) {
        const std::string& actor = skel.marker_actor.at(id);
        std::size_t ai = std::find(skel.actors.begin(), skel.actors.end(), actor) - skel.actors.begin();
        actor_of[index.at(id)] = ai;
    }
    return actor_of;
}

} // namespace

CenteredSequence center_hips(const MarkerSequence& seq, const SkeletonConfig& skel) {
    auto index = skel.resolve(seq);
    auto actor_of = actor_of_columns(seq, skel);
    const std::size_t T = seq.frames();
    const std::size_t A = skel.actors.size();

    CenteredSequence out;
    out.seq = seq;
    out.actor_count = A;
    out.hip_centers.assign(A * T * 3, 0.0);
    out.actor_offset.assign(T * 3, 0.0);

    for (std::size_t a = 0; a < A; ++a) {
        const auto& hips = skel.hip_markers.at(skel.actors[a]);
        std::vector<std::size_t> cols;
        cols.reserve(hips.size());
        for (const auto& id : hips) cols.push_back(index.at(id));
        for (std::size_t t = 0; t < T; ++t) {
            double c[3] = {0.0, 0.0, 0.0};
            for (std::size_t m : cols) {
                if (!seq.present(t, m))
                    throw_data("hip marker '" + seq.marker_ids()[m] + "' absent at frame " +
                               std::to_string(t) + ", cannot center");
                for (int k = 0; k < 3; ++k) c[k] += seq.at(t, m, k);
            }
            for (int k = 0; k < 3; ++k)
                out.hip_centers[(a * T + t) * 3 + k] = c[k] / static_cast<double>(cols.size());
        }
    }

    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m) {
            const double* c = out.hip_center(actor_of[m], t);
            for (int k = 0; k < 3; ++k) out.seq.at(t, m, k) -= c[k];
        }

    if (A == 2)
        for (std::size_t t = 0; t < T; ++t)
            for (int k = 0; k < 3; ++k)
                out.actor_offset[t * 3 + k] = out.hip_center(1, t)[k] - out.hip_center(0, t)[k];

    return out;
}

MarkerSequence decenter(const CenteredSequence& centered, const SkeletonConfig& skel) {
    const MarkerSequence& seq = centered.seq;
    if (centered.actor_count != skel.actors.size())
        throw_usage("centered sequence actor count does not match the skeleton config");
    if (centered.hip_centers.size() != centered.actor_count * seq.frames() * 3)
        throw_usage("centered sequence hip-center block has the wrong shape");
    auto actor_of = actor_of_columns(seq, skel);

    MarkerSequence out = seq;
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m) {
            const double* c = centered.hip_center(actor_of[m], t);
            for (int k = 0; k < 3; ++k) out.at(t, m, k) += c[k];
        }
    return out;
}

Augment augment_from_name(const std::string& name) {
    if (name == "mirror_x") return Augment::mirror_x;
    if (name == "mirror_y") return Augment::mirror_y;
    if (name == "swap_actors") return Augment::swap_actors;
    throw_usage("unknown augmentation '" + name + "' (expected mirror_x, mirror_y or swap_actors)");
}

const char* augment_name(Augment mode) {
    switch (mode) {
        case Augment::mirror_x: return "mirror_x";
        case Augment::mirror_y: return "mirror_y";
        case Augment::swap_actors: return "swap_actors";
    }
    throw_usage("invalid augmentation mode");
}

namespace {

void swap_marker_columns(MarkerSequence& seq, std::size_t a, std::size_t b) {
    for (std::size_t t = 0; t < seq.frames(); ++t) {
        for (int k = 0; k < 3; ++k) std::swap(seq.at(t, a, k), seq.at(t, b, k));
        bool pa = seq.present(t, a);
        seq.set_present(t, a, seq.present(t, b));
        seq.set_present(t, b, pa);
    }
}

MarkerSequence mirror(const MarkerSequence& seq, const SkeletonConfig& skel, int axis,
                      const std::vector<std::pair<std::string, std::string>>& pairs) {
    auto index = skel.resolve(seq);
    MarkerSequence out = seq;
    for (std::size_t t = 0; t < out.frames(); ++t)
        for (std::size_t m = 0; m < out.markers(); ++m)
            out.at(t, m, static_cast<std::size_t>(axis)) =
                -out.at(t, m, static_cast<std::size_t>(axis));
    for (const auto& [l, r] : pairs) swap_marker_columns(out, index.at(l), index.at(r));
    return out;
}

} // namespace

MarkerSequence augment(const MarkerSequence& seq, const SkeletonConfig& skel, Augment mode) {
    switch (mode) {
        case Augment::mirror_x:
            return mirror(seq, skel, 0, skel.mirror_pairs_x);
        case Augment::mirror_y:
            return mirror(seq, skel, 1, skel.mirror_pairs_y);
        case Augment::swap_actors: {
            if (skel.actors.size() != 2)
                throw_usage("swap_actors needs a two-actor skeleton config");
            auto index = skel.resolve(seq);
            const std::string& a0 = skel.actors[0];
            const std::string& a1 = skel.actors[1];
            MarkerSequence out = seq;
            for (const auto& id : skel.marker_ids) {
                if (skel.marker_actor.at(id) != a0) continue;
                if (id.rfind(a0 + ":", 0) != 0)
                    throw_data("marker '" + id + "' is not named '" + a0 +
                               ":<name>', cannot pair actors");
                std::string twin = a1 + id.substr(a0.size());
                auto it = index.find(twin);
                if (it == index.end())
                    throw_data("marker '" + id + "' has no counterpart '" + twin + "'");
                swap_marker_columns(out, index.at(id), it->second);
            }
            return out;
        }
    }
    throw_usage("invalid augmentation mode");
}

} // namespace gapeval
