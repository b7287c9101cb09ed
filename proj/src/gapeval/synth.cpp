#include "gapeval/synth.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gapeval/error.hpp"
#include "gapeval/rng.hpp"

namespace gapeval {

namespace {

struct PoseEntry {
    std::string name;
    BodyPart part;
    double x, y, z;
};

/// Standing base pose, cm, z up, x to the subject's right, y forward.
/// Left-side markers (L prefix) carry negative x; the right side mirrors.
const std::vector<PoseEntry>& base_pose() {
    static const std::vector<PoseEntry> pose = [] {
        std::vector<PoseEntry> p = {
            {"SACR", BodyPart::hips, 0, -12, 100},
            {"LFWT", BodyPart::hips, -12, 10, 102},
            {"RFWT", BodyPart::hips, 12, 10, 102},
            {"LBWT", BodyPart::hips, -12, -10, 102},
            {"RBWT", BodyPart::hips, 12, -10, 102},
            {"C7", BodyPart::torso, 0, -8, 152},
            {"T10", BodyPart::torso, 0, -10, 135},
            {"CLAV", BodyPart::torso, 0, 6, 150},
            {"STRN", BodyPart::torso, 0, 9, 138},
            {"NECK", BodyPart::torso, 0, -2, 155},
            {"LSHO", BodyPart::torso, -18, 0, 150},
            {"RSHO", BodyPart::torso, 18, 0, 150},
            {"LFSH", BodyPart::torso, -15, 6, 147},
            {"RFSH", BodyPart::torso, 15, 6, 147},
            {"LSCAP", BodyPart::torso, -10, -10, 145},
            {"RSCAP", BodyPart::torso, 10, -10, 145},
            {"ARIEL", BodyPart::head, 0, 0, 175},
            {"LFHD", BodyPart::head, -11, 7, 168},
            {"RFHD", BodyPart::head, 11, 7, 168},
            {"LBHD", BodyPart::head, -11, -7, 168},
            {"RBHD", BodyPart::head, 11, -7, 168},
        };
        struct Limb {
            const char* name;
            double x, y, z;
        };
        const Limb arm[] = {
            {"UPA", -24, 2, 140},  {"UPA2", -26, 0, 133}, {"ELB", -28, 0, 126},
            {"IEL", -24, 2, 126},  {"FRM", -28, 2, 117},  {"FRM2", -29, 0, 112},
            {"WRA", -30, 4, 104},  {"WRB", -26, 0, 103},  {"FIN", -29, 2, 94},
            {"THM", -26, 5, 97},
        };
        const Limb leg[] = {
            {"THI", -14, 4, 80},   {"THI2", -16, -2, 72}, {"KNE", -13, 2, 52},
            {"IKN", -9, 2, 52},    {"SHN", -12, 4, 40},   {"SHN2", -11, 2, 32},
            {"ANK", -11, -1, 12},  {"IAN", -8, 0, 12},    {"HEE", -10, -8, 6},
            {"TOE", -10, 12, 3},   {"MT5", -14, 8, 4},
        };
        auto add_sides = [&p](const Limb* limbs, std::size_t count) {
            for (std::size_t i = 0; i < count; ++i)
                p.push_back({std::string("L") + limbs[i].name, BodyPart::limbs, limbs[i].x,
                             limbs[i].y, limbs[i].z});
            for (std::size_t i = 0; i < count; ++i)
                p.push_back({std::string("R") + limbs[i].name, BodyPart::limbs, -limbs[i].x,
                             limbs[i].y, limbs[i].z});
        };
        add_sides(arm, std::size(arm));
        add_sides(leg, std::size(leg));
        return p;
    }();
    return pose;
}

const PoseEntry* find_pose(const std::string& name) {
    for (const auto& entry : base_pose())
        if (name == entry.name) return &entry;
    return nullptr;
}

std::vector<std::string> actor_names(std::size_t actors) {
    if (actors != 1 && actors != 2) throw_usage("actor count must be 1 or 2");
    std::vector<std::string> names = {"A1"};
    if (actors == 2) names.push_back("A2");
    return names;
}

SkeletonConfig build_skeleton(std::size_t actors, const std::vector<std::string>& marker_names,
                              const std::vector<BoneDef>& bone_templates,
                              const std::vector<std::pair<std::string, std::string>>& pairs_x,
                              const std::vector<std::pair<std::string, std::string>>& pairs_y) {
    SkeletonConfig skel;
    skel.actors = actor_names(actors);
    for (const auto& actor : skel.actors) {
        auto qualify = [&actor](const std::string& name) { return actor + ":" + name; };
        for (const auto& name : marker_names) {
            const PoseEntry* entry = find_pose(name);
            std::string id = qualify(name);
            skel.marker_ids.push_back(id);
            skel.marker_actor[id] = actor;
            skel.body_parts[static_cast<int>(entry->part)].push_back(id);
        }
        skel.hip_markers[actor] = {qualify("LFWT"), qualify("RFWT"), qualify("LBWT"),
                                   qualify("RBWT")};
        for (const auto& bone : bone_templates) {
            BoneDef b;
            b.name = qualify(bone.name);
            for (const auto& id : bone.end_a) b.end_a.push_back(qualify(id));
            for (const auto& id : bone.end_b) b.end_b.push_back(qualify(id));
            skel.bones.push_back(std::move(b));
        }
        for (const auto& [l, r] : pairs_x) skel.mirror_pairs_x.emplace_back(qualify(l), qualify(r));
        for (const auto& [l, r] : pairs_y) skel.mirror_pairs_y.emplace_back(qualify(l), qualify(r));
    }
    skel.validate();
    return skel;
}

} // namespace

SkeletonConfig full_skeleton(std::size_t actors) {
    std::vector<std::string> markers;
    for (const auto& entry : base_pose()) markers.push_back(entry.name);

    std::vector<BoneDef> bones = {
        {"head", {"LFHD", "LBHD"}, {"RFHD", "RBHD"}},
        {"hips", {"LFWT", "LBWT"}, {"RFWT", "RBWT"}},
        {"left_forearm", {"LELB", "LIEL"}, {"LWRA", "LWRB"}},
        {"right_forearm", {"RELB", "RIEL"}, {"RWRA", "RWRB"}},
        {"left_lower_leg", {"LKNE", "LIKN"}, {"LANK", "LIAN"}},
        {"right_lower_leg", {"RKNE", "RIKN"}, {"RANK", "RIAN"}},
    };

    std::vector<std::pair<std::string, std::string>> pairs_x = {
        {"LFHD", "RFHD"}, {"LBHD", "RBHD"}, {"LSHO", "RSHO"}, {"LFSH", "RFSH"},
        {"LSCAP", "RSCAP"}, {"LFWT", "RFWT"}, {"LBWT", "RBWT"},
    };
    for (const char* name : {"UPA", "UPA2", "ELB", "IEL", "FRM", "FRM2", "WRA", "WRB", "FIN",
                             "THM", "THI", "THI2", "KNE", "IKN", "SHN", "SHN2", "ANK", "IAN",
                             "HEE", "TOE", "MT5"})
        pairs_x.emplace_back(std::string("L") + name, std::string("R") + name);

    std::vector<std::pair<std::string, std::string>> pairs_y = {
        {"LFHD", "LBHD"}, {"RFHD", "RBHD"}, {"CLAV", "C7"},   {"STRN", "T10"},
        {"LFSH", "LSCAP"}, {"RFSH", "RSCAP"}, {"LFWT", "LBWT"}, {"RFWT", "RBWT"},
        {"LHEE", "LTOE"}, {"RHEE", "RTOE"},
    };

    return build_skeleton(actors, markers, bones, pairs_x, pairs_y);
}

SkeletonConfig minimal_skeleton(std::size_t actors) {
    std::vector<std::string> markers = {"LFWT", "RFWT", "LBWT", "RBWT", "CLAV", "C7",
                                        "LFHD", "RFHD", "LELB", "LWRA", "RELB", "RWRA"};
    std::vector<BoneDef> bones = {
        {"head", {"LFHD"}, {"RFHD"}},
        {"hips", {"LFWT", "LBWT"}, {"RFWT", "RBWT"}},
        {"left_arm", {"LELB"}, {"LWRA"}},
        {"right_arm", {"RELB"}, {"RWRA"}},
    };
    std::vector<std::pair<std::string, std::string>> pairs_x = {
        {"LFHD", "RFHD"}, {"LFWT", "RFWT"}, {"LBWT", "RBWT"}, {"LELB", "RELB"}, {"LWRA", "RWRA"},
    };
    std::vector<std::pair<std::string, std::string>> pairs_y = {
        {"LFWT", "LBWT"}, {"RFWT", "RBWT"}, {"CLAV", "C7"},
    };
    return build_skeleton(actors, markers, bones, pairs_x, pairs_y);
}

void SynthSpec::validate() const {
    if (actors != 1 && actors != 2) throw_usage("actor count must be 1 or 2");
    if (!(fps > 0.0)) throw_usage("fps must be positive");
    if (!(seconds > 0.0) || seconds * fps < 3.0)
        throw_usage("duration must cover at least three frames");
    if (amplitude < 0.0) throw_usage("amplitude must be non-negative");
    if (!(freq_lo > 0.0) || freq_hi < freq_lo)
        throw_usage("frequency band must satisfy 0 < lo <= hi");
}

namespace {

struct Sinusoid {
    double amp, freq, phase;
};

/// `count` sinusoids with frequencies in the band and amplitudes summing to
/// `total_amp`.
std::vector<Sinusoid> draw_bank(Rng& rng, std::size_t count, double total_amp, double freq_lo,
                                double freq_hi) {
    std::vector<Sinusoid> bank(count);
    double raw_sum = 0.0;
    for (auto& s : bank) {
        s.freq = freq_lo + rng.uniform() * (freq_hi - freq_lo);
        s.phase = rng.uniform() * 2.0 * std::numbers::pi;
        s.amp = 0.3 + 0.7 * rng.uniform();
        raw_sum += s.amp;
    }
    for (auto& s : bank) s.amp *= total_amp / raw_sum;
    return bank;
}

double eval_bank(const std::vector<Sinusoid>& bank, double seconds) {
    double v = 0.0;
    for (const auto& s : bank)
        v += s.amp * std::sin(2.0 * std::numbers::pi * s.freq * seconds + s.phase);
    return v;
}

constexpr std::size_t kGlobalSinusoids = 4;
constexpr std::size_t kPartSinusoids = 3;
constexpr double kPartAmpFraction = 0.35;
constexpr double kVerticalAmpFraction = 0.2;
constexpr double kLaneOffset = 8.0;    // cm between the two actors' paths
constexpr double kCrossSpan = 3.0;     // drift length in units of amplitude

} // namespace

MarkerSequence generate(const SynthSpec& spec, const SkeletonConfig& skel) {
    spec.validate();
    skel.validate();
    if (skel.actors.size() != spec.actors)
        throw_usage("skeleton config has " + std::to_string(skel.actors.size()) +
                    " actors, spec asks for " + std::to_string(spec.actors));

    const std::size_t T = static_cast<std::size_t>(std::llround(spec.seconds * spec.fps));
    const std::size_t A = spec.actors;

    // Per-marker constants: base offset and (actor, part) motion bank index.
    struct MarkerInfo {
        Vec3 base;
        std::size_t actor;
        std::size_t part;
    };
    std::vector<MarkerInfo> info;
    info.reserve(skel.marker_ids.size());
    for (const auto& id : skel.marker_ids) {
        const std::string& actor = skel.marker_actor.at(id);
        std::string name = id;
        if (name.rfind(actor + ":", 0) == 0) name = name.substr(actor.size() + 1);
        const PoseEntry* entry = find_pose(name);
        if (!entry) throw_data("incompatible skeleton: no base pose for marker '" + id + "'");
        std::size_t ai = 0;
        while (skel.actors[ai] != actor) ++ai;
        info.push_back({{entry->x, entry->y, entry->z}, ai, static_cast<std::size_t>(entry->part)});
    }

    // Fixed draw order: per actor, global banks for x,y,z, then per part in
    // fill order the articulation banks for x,y,z.
    Rng rng(spec.seed);
    std::vector<std::array<std::vector<Sinusoid>, 3>> global_banks(A);
    std::vector<std::array<std::array<std::vector<Sinusoid>, 3>, 4>> part_banks(A);
    for (std::size_t a = 0; a < A; ++a) {
        for (int axis = 0; axis < 3; ++axis) {
            double amp = spec.amplitude * (axis == 2 ? kVerticalAmpFraction : 1.0);
            global_banks[a][axis] =
                draw_bank(rng, kGlobalSinusoids, amp, spec.freq_lo, spec.freq_hi);
        }
        for (std::size_t p = 0; p < 4; ++p)
            for (int axis = 0; axis < 3; ++axis) {
                double amp = spec.amplitude * kPartAmpFraction *
                             (axis == 2 ? kVerticalAmpFraction : 1.0);
                part_banks[a][p][axis] =
                    draw_bank(rng, kPartSinusoids, amp, spec.freq_lo, spec.freq_hi);
            }
    }

    // Per-frame translation of each actor (lane + crossing drift + sinusoids)
    // and each (actor, part) articulation offset.
    std::vector<double> actor_pos(A * T * 3);
    std::vector<double> part_pos(A * 4 * T * 3);
    for (std::size_t a = 0; a < A; ++a) {
        double dir = (a == 0) ? 1.0 : -1.0;
        double center = (A == 2) ? dir * 45.0 : 0.0;
        double lane = (A == 2) ? dir * kLaneOffset : 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            double seconds = static_cast<double>(t) / spec.fps;
            double tau = (T > 1) ? static_cast<double>(t) / static_cast<double>(T - 1) : 0.0;
            double* out = &actor_pos[(a * T + t) * 3];
            out[0] = center - dir * kCrossSpan * spec.amplitude * tau +
                     eval_bank(global_banks[a][0], seconds);
            out[1] = lane + eval_bank(global_banks[a][1], seconds);
            out[2] = eval_bank(global_banks[a][2], seconds);
            for (std::size_t p = 0; p < 4; ++p) {
                double* pp = &part_pos[((a * 4 + p) * T + t) * 3];
                for (int axis = 0; axis < 3; ++axis)
                    pp[axis] = eval_bank(part_banks[a][p][axis], seconds);
            }
        }
    }

    MarkerSequence seq(T, skel.marker_ids, spec.fps);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t m = 0; m < info.size(); ++m) {
            const MarkerInfo& mi = info[m];
            const double* ap = &actor_pos[(mi.actor * T + t) * 3];
            const double* pp = &part_pos[((mi.actor * 4 + mi.part) * T + t) * 3];
            for (int axis = 0; axis < 3; ++axis)
                seq.at(t, m, axis) = mi.base[axis] + ap[axis] + pp[axis];
        }
    return seq;
}

} // namespace gapeval
