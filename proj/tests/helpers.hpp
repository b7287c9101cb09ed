#pragma once

// Shared fixtures for the unit tests: tiny sequence/skeleton builders and a
// self-cleaning temp directory.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gapeval/types.hpp"

namespace testutil {

using gapeval::MarkerSequence;
using gapeval::ObservationMask;
using gapeval::SkeletonConfig;

/// Fully-present sequence with ids M0..M{markers-1}, all coordinates zero.
inline MarkerSequence make_seq(std::size_t frames, std::size_t markers, double fps = 100.0) {
    std::vector<std::string> ids;
    ids.reserve(markers);
    for (std::size_t m = 0; m < markers; ++m) ids.push_back("M" + std::to_string(m));
    return MarkerSequence(frames, std::move(ids), fps);
}

/// Deterministic smooth filler: distinct per (t, m, c), bounded, non-linear.
inline void fill_pattern(MarkerSequence& seq) {
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m)
            for (std::size_t c = 0; c < 3; ++c)
                seq.at(t, m, c) = std::sin(0.37 * static_cast<double>(t) +
                                           1.13 * static_cast<double>(m) +
                                           0.59 * static_cast<double>(c)) *
                                      5.0 +
                                  static_cast<double>(m) * 10.0 + static_cast<double>(c);
}

/// Straight-line filler: value = a + b * t, per (m, c) offsets keep columns
/// distinct while staying degree one in t.
inline void fill_linear(MarkerSequence& seq) {
    for (std::size_t t = 0; t < seq.frames(); ++t)
        for (std::size_t m = 0; m < seq.markers(); ++m)
            for (std::size_t c = 0; c < 3; ++c)
                seq.at(t, m, c) = 2.0 + static_cast<double>(m) + 0.1 * static_cast<double>(c) +
                                  (0.5 + 0.05 * static_cast<double>(m)) * static_cast<double>(t);
}

/// Single-actor six-marker config covering all four body parts, with two
/// bones and one x mirror pair. Marker ids follow make_seq(frames, 6).
inline SkeletonConfig test_skeleton() {
    SkeletonConfig skel;
    skel.actors = {"A1"};
    skel.marker_ids = {"M0", "M1", "M2", "M3", "M4", "M5"};
    for (const auto& id : skel.marker_ids) skel.marker_actor[id] = "A1";
    skel.hip_markers["A1"] = {"M0", "M1"};
    skel.body_parts[0] = {"M0", "M1"};  // hips
    skel.body_parts[1] = {"M2"};        // torso
    skel.body_parts[2] = {"M3"};        // head
    skel.body_parts[3] = {"M4", "M5"};  // limbs
    skel.bones = {{"pelvis", {"M0"}, {"M1"}}, {"arm", {"M4"}, {"M5"}}};
    skel.mirror_pairs_x = {{"M4", "M5"}};
    return skel;
}

/// Temp directory that removes itself, unique per process and instance.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        std::ostringstream name;
        name << "gapeval_test_" << ::getpid() << "_" << counter++;
        path_ = std::filesystem::temp_directory_path() / name.str();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

/// Largest absolute difference over all present entries; sequences must share
/// shape and presence.
inline double max_abs_diff(const MarkerSequence& a, const MarkerSequence& b) {
    double worst = 0.0;
    for (std::size_t t = 0; t < a.frames(); ++t)
        for (std::size_t m = 0; m < a.markers(); ++m) {
            if (!a.present(t, m) || !b.present(t, m)) continue;
            for (std::size_t c = 0; c < 3; ++c)
                worst = std::max(worst, std::abs(a.at(t, m, c) - b.at(t, m, c)));
        }
    return worst;
}

inline bool bitwise_equal(const MarkerSequence& a, const MarkerSequence& b) {
    return a.frames() == b.frames() && a.marker_ids() == b.marker_ids() &&
           a.presence() == b.presence() && a.data() == b.data() && a.fps() == b.fps();
}

} // namespace testutil
