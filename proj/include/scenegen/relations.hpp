#pragma once

#include <string>

#include <json.hpp>

#include "scenegen/error.hpp"

namespace scenegen {

enum class Side { left, right };
enum class Distance { near, medium, far };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

inline const char* to_string(Distance d) {
    switch (d) {
        case Distance::near: return "near";
        case Distance::medium: return "medium";
        case Distance::far: return "far";
    }
    return "near";
}

inline Side side_from_string(const std::string& s) {
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    throw Error(ErrorKind::input, "invalid side \"" + s + "\"");
}

inline Distance distance_from_string(const std::string& s) {
    if (s == "near") return Distance::near;
    if (s == "medium") return Distance::medium;
    if (s == "far") return Distance::far;
    throw Error(ErrorKind::input, "invalid distance \"" + s + "\"");
}

/// The four per-edge spatial decisions. `orientation` is the child's yaw in
/// degrees relative to the parent's facing, one of the 8 compass steps
/// {0,45,...,315}; 180 means facing the parent.
struct RelationBundle {
    Side side = Side::right;
    int orientation = 180;
    Distance distance = Distance::near;
    bool support = false;

    friend bool operator==(const RelationBundle&, const RelationBundle&) = default;
};

inline void validate(const RelationBundle& r) {
    if (r.orientation % 45 != 0 || r.orientation < 0 || r.orientation >= 360)
        throw Error(ErrorKind::input,
                    "relation: orientation " + std::to_string(r.orientation) +
                        " not a 45-degree step in [0,315]");
    if (r.support && r.distance == Distance::far)
        throw Error(ErrorKind::input, "relation: support=true forbids distance=far");
}

inline void to_json(nlohmann::ordered_json& j, const RelationBundle& r) {
    j = nlohmann::ordered_json{{"side", to_string(r.side)},
                               {"orientation", r.orientation},
                               {"distance", to_string(r.distance)},
                               {"support", r.support}};
}

inline void from_json(const nlohmann::ordered_json& j, RelationBundle& r) {
    r.side = side_from_string(j.at("side").get<std::string>());
    r.orientation = j.at("orientation").get<int>();
    r.distance = distance_from_string(j.at("distance").get<std::string>());
    r.support = j.at("support").get<bool>();
    validate(r);
}

} // namespace scenegen
