#pragma once

#include <string>

#include "gapeval/types.hpp"

namespace gapeval {

/// Skeleton config JSON:
/// {
///   "actors": ["A1","A2"],
///   "markers": [{"id":"A1:LFHD","actor":"A1"}, ...],
///   "hip_markers": {"A1":["A1:LFWT",...], ...},
///   "body_parts": {"hips":[...], "torso":[...], "head":[...], "limbs":[...]},
///   "bones": [{"name":"A1:head","end_a":[...],"end_b":[...]}, ...],
///   "mirror_pairs_x": [["A1:LFHD","A1:RFHD"], ...],
///   "mirror_pairs_y": [...]
/// }
SkeletonConfig read_skeleton(const std::string& path);
SkeletonConfig parse_skeleton(const std::string& text, const std::string& origin);
std::string skeleton_to_json(const SkeletonConfig& skel);
void write_skeleton(const SkeletonConfig& skel, const std::string& path);

} // namespace gapeval
