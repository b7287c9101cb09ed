#include "gapeval/skeleton_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gapeval/error.hpp"
#include "gapeval/marker_csv.hpp"

namespace gapeval {

using nlohmann::json;

namespace {

json require(const json& obj, const char* key, const std::string& origin) {
    auto it = obj.find(key);
    if (it == obj.end()) throw_data(origin + ": missing key '" + key + "'");
    return *it;
}

std::vector<std::string> string_list(const json& arr, const std::string& what,
                                     const std::string& origin) {
    if (!arr.is_array()) throw_data(origin + ": " + what + " must be an array");
    std::vector<std::string> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_string()) throw_data(origin + ": " + what + " must contain only strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> pair_list(const json& arr, const std::string& what,
                                                           const std::string& origin) {
    if (!arr.is_array()) throw_data(origin + ": " + what + " must be an array");
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string())
            throw_data(origin + ": " + what + " entries must be [left, right] string pairs");
        out.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
    }
    return out;
}

} // namespace

SkeletonConfig parse_skeleton(const std::string& text, const std::string& origin) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw_data(origin + ": invalid JSON");
    if (!root.is_object()) throw_data(origin + ": top level must be an object");

    SkeletonConfig skel;
    skel.actors = string_list(require(root, "actors", origin), "actors", origin);

    json markers = require(root, "markers", origin);
    if (!markers.is_array()) throw_data(origin + ": markers must be an array");
    for (const auto& m : markers) {
        if (!m.is_object() || !m.contains("id") || !m.contains("actor") || !m["id"].is_string() ||
            !m["actor"].is_string())
            throw_data(origin + ": marker entries must be {\"id\": ..., \"actor\": ...}");
        std::string id = m["id"].get<std::string>();
        skel.marker_ids.push_back(id);
        skel.marker_actor[id] = m["actor"].get<std::string>();
    }

    json hips = require(root, "hip_markers", origin);
    if (!hips.is_object()) throw_data(origin + ": hip_markers must map actor to marker list");
    for (auto it = hips.begin(); it != hips.end(); ++it)
        skel.hip_markers[it.key()] = string_list(it.value(), "hip_markers." + it.key(), origin);

    json parts = require(root, "body_parts", origin);
    if (!parts.is_object()) throw_data(origin + ": body_parts must map part name to marker list");
    for (BodyPart part : kBodyPartOrder) {
        const char* name = body_part_name(part);
        if (!parts.contains(name)) throw_data(origin + ": body_parts missing '" + name + "'");
        skel.body_parts[static_cast<std::size_t>(part)] =
            string_list(parts[name], std::string("body_parts.") + name, origin);
    }
    for (auto it = parts.begin(); it != parts.end(); ++it) {
        bool known = false;
        for (BodyPart part : kBodyPartOrder)
            if (it.key() == body_part_name(part)) known = true;
        if (!known) throw_data(origin + ": unknown body part '" + it.key() + "'");
    }

    json bones = require(root, "bones", origin);
    if (!bones.is_array()) throw_data(origin + ": bones must be an array");
    for (const auto& b : bones) {
        if (!b.is_object() || !b.contains("name") || !b.contains("end_a") || !b.contains("end_b") ||
            !b["name"].is_string())
            throw_data(origin + ": bone entries must be {\"name\", \"end_a\", \"end_b\"}");
        BoneDef bone;
        bone.name = b["name"].get<std::string>();
        bone.end_a = string_list(b["end_a"], "bone '" + bone.name + "' end_a", origin);
        bone.end_b = string_list(b["end_b"], "bone '" + bone.name + "' end_b", origin);
        skel.bones.push_back(std::move(bone));
    }

    skel.mirror_pairs_x = pair_list(require(root, "mirror_pairs_x", origin), "mirror_pairs_x", origin);
    skel.mirror_pairs_y = pair_list(require(root, "mirror_pairs_y", origin), "mirror_pairs_y", origin);

    skel.validate();
    return skel;
}

SkeletonConfig read_skeleton(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw_data("read failed: " + path);
    return parse_skeleton(buf.str(), path);
}

std::string skeleton_to_json(const SkeletonConfig& skel) {
    json root;
    root["actors"] = skel.actors;

    json markers = json::array();
    for (const auto& id : skel.marker_ids)
        markers.push_back({{"id", id}, {"actor", skel.marker_actor.at(id)}});
    root["markers"] = markers;

    json hips = json::object();
    for (const auto& actor : skel.actors) hips[actor] = skel.hip_markers.at(actor);
    root["hip_markers"] = hips;

    json parts = json::object();
    for (BodyPart part : kBodyPartOrder)
        parts[body_part_name(part)] = skel.body_parts[static_cast<std::size_t>(part)];
    root["body_parts"] = parts;

    json bones = json::array();
    for (const auto& bone : skel.bones)
        bones.push_back({{"name", bone.name}, {"end_a", bone.end_a}, {"end_b", bone.end_b}});
    root["bones"] = bones;

    auto pairs_json = [](const std::vector<std::pair<std::string, std::string>>& pairs) {
        json arr = json::array();
        for (const auto& [l, r] : pairs) arr.push_back({l, r});
        return arr;
    };
    root["mirror_pairs_x"] = pairs_json(skel.mirror_pairs_x);
    root["mirror_pairs_y"] = pairs_json(skel.mirror_pairs_y);

    return root.dump(2) + "\n";
}

void write_skeleton(const SkeletonConfig& skel, const std::string& path) {
    write_file_atomic(path, skeleton_to_json(skel));
}

} // namespace gapeval
