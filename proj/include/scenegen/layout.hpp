#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/audit.hpp"
#include "scenegen/catalog.hpp"
#include "scenegen/error.hpp"
#include "scenegen/organizer.hpp"
#include "scenegen/request.hpp"

namespace scenegen {

struct Room {
    double width = 6.0;
    double depth = 6.0;

    friend bool operator==(const Room&, const Room&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned footprint rectangle, center + full extents.
struct Rect {
    double cx = 0.0, cy = 0.0;
    double w = 0.0, d = 0.0;

    double min_x() const { return cx - w / 2; }
    double max_x() const { return cx + w / 2; }
    double min_y() const { return cy - d / 2; }
    double max_y() const { return cy + d / 2; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

namespace geo {

inline Vec2 yaw_dir(int yaw) {
    static const double s = std::sqrt(0.5);
    switch (((yaw % 360) + 360) % 360) {
        case 0: return {1, 0};
        case 45: return {s, s};
        case 90: return {0, 1};
        case 135: return {-s, s};
        case 180: return {-1, 0};
        case 225: return {-s, -s};
        case 270: return {0, -1};
        case 315: return {s, -s};
    }
    throw Error(ErrorKind::input, "yaw " + std::to_string(yaw) + " not a 45-degree step");
}

inline Vec2 rotate(Vec2 v, double deg) {
    double r = deg * M_PI / 180.0;
    double c = std::cos(r), s = std::sin(r);
    return {v.x * c - v.y * s, v.x * s + v.y * c};
}

inline int quantize_yaw(double rad) {
    double deg = rad * 180.0 / M_PI;
    long q = std::lround(deg / 45.0) * 45;
    return static_cast<int>(((q % 360) + 360) % 360);
}

inline Rect bbox_for(double cx, double cy, const Dims& dims, int yaw) {
    Vec2 f = yaw_dir(yaw);
    double aw = std::abs(f.x) * dims.w + std::abs(f.y) * dims.d;
    double ad = std::abs(f.y) * dims.w + std::abs(f.x) * dims.d;
    return {cx, cy, aw, ad};
}

inline bool inside_room(const Rect& r, const Room& room, double eps = 1e-6) {
    return r.min_x() >= -eps && r.min_y() >= -eps && r.max_x() <= room.width + eps &&
           r.max_y() <= room.depth + eps;
}

inline bool overlap(const Rect& a, const Rect& b, double eps = 1e-9) {
    return std::min(a.max_x(), b.max_x()) - std::max(a.min_x(), b.min_x()) > eps &&
           std::min(a.max_y(), b.max_y()) - std::max(a.min_y(), b.min_y()) > eps;
}

inline bool contains(const Rect& outer, const Rect& inner, double eps = 1e-9) {
    return inner.min_x() >= outer.min_x() - eps && inner.max_x() <= outer.max_x() + eps &&
           inner.min_y() >= outer.min_y() - eps && inner.max_y() <= outer.max_y() + eps;
}

// Euclidean edge-to-edge distance between footprints (0 when touching or
// overlapping).
inline double gap(const Rect& a, const Rect& b) {
    double dx = std::max(0.0, std::abs(a.cx - b.cx) - (a.w + b.w) / 2);
    double dy = std::max(0.0, std::abs(a.cy - b.cy) - (a.d + b.d) / 2);
    return std::hypot(dx, dy);
}

} // namespace geo

struct DistanceMap {
    double near_m = 0.5;
    double medium_m = 1.5;
    double far_m = 3.0;
    double tolerance = 0.25;

    friend bool operator==(const DistanceMap&, const DistanceMap&) = default;
};

/// Edge-to-edge gap target for a distance class. Support edges force the gap
/// to zero regardless.
inline double distance_target(Distance d, const DistanceMap& dm = {}) {
    switch (d) {
        case Distance::near: return dm.near_m;
        case Distance::medium: return dm.medium_m;
        case Distance::far: return dm.far_m;
    }
    return dm.near_m;
}

struct Placement {
    int node = 0;
    std::string asset_id;
    std::set<std::string> tags;
    double x = 0.0, y = 0.0; // footprint center
    double z = 0.0;          // base height
    int yaw = 0;             // degrees in [0,360), multiple of 45
    double height = 0.0;
    Rect bbox;

    friend bool operator==(const Placement&, const Placement&) = default;
};

struct PlacedScene {
    Room room;
    std::vector<Placement> placements;
    LayoutTree tree; // pruned to placed nodes
    SceneRequest request;
    AuditLog audit;

    const Placement* find_node(int node) const {
        for (const auto& p : placements)
            if (p.node == node) return &p;
        return nullptr;
    }

    friend bool operator==(const PlacedScene&, const PlacedScene&) = default;
};

namespace detail {

inline std::uint64_t place_hash(std::uint64_t seed, int node, const char* what) {
    return text::splitmix64(seed ^ text::fnv1a(what, text::splitmix64(seed + node * 2654435761u)));
}

// Offset along dir so the child's footprint sits at `target` edge-to-edge gap
// from the parent's. Gap grows monotonically with the offset, so bisect.
inline double solve_offset(const Rect& parent, double cw, double cd, Vec2 dir, double target) {
    auto gap_at = [&](double t) {
        Rect c{parent.cx + dir.x * t, parent.cy + dir.y * t, cw, cd};
        return geo::gap(parent, c);
    };
    double lo = 0.0;
    double hi = parent.w + parent.d + cw + cd + target + 1.0;
    int guard = 0;
    while (gap_at(hi) < target && guard++ < 64) hi *= 2;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (gap_at(mid) < target) lo = mid;
        else hi = mid;
    }
    return hi;
}

} // namespace detail

/// Roots take fixed-pitch slots centered on the longest wall, facing inward;
/// children resolve against their parent's relation bundle in breadth-first
/// order. Collision search works on intended footprints (a dropped object
/// still blocks its spot), and room bounds decide what is actually placed, so
/// shrinking the room can only grow the drop set. Objects with no collision-
/// free candidate within 50 attempts, outside the room, or under a dropped
/// parent are dropped and audited; the returned tree is pruned to what was
/// placed.
inline PlacedScene place(const LayoutTree& tree, const Catalog& catalog, const Room& room,
                         std::uint64_t seed, const DistanceMap& dm = {}) {
    if (room.width <= 0 || room.depth <= 0)
        throw Error(ErrorKind::input, "place: room dimensions must be positive");
    tree.check_forest();

    PlacedScene scene;
    scene.room = room;

    struct Intended {
        Vec2 pos;
        double z = 0.0;
        int yaw = 0;
        Rect bbox;
    };
    std::map<int, Intended> intended;
    std::vector<int> order; // BFS emission order

    auto collides = [&](const Rect& bbox, double z) {
        for (const auto& [_, it] : intended)
            if (std::abs(it.z - z) < 1e-9 && geo::overlap(it.bbox, bbox)) return true;
        return false;
    };

    // --- pass 1: intended layout, in wall-anchored coordinates
    const bool along_x = room.width >= room.depth;
    const double wall_mid = (along_x ? room.width : room.depth) / 2;
    const int inward_yaw = along_x ? 90 : 0;
    const std::size_t m = tree.roots.size();
    const std::size_t slot_rot = m > 1 ? detail::place_hash(seed, 0, "slots") % m : 0;

    double pitch = 0.0;
    for (int node : tree.roots) {
        const Asset& asset = catalog.at(tree.nodes.at(node));
        Rect probe = geo::bbox_for(0, 0, asset.dims, inward_yaw);
        if (probe.w > room.width + 1e-9 || probe.d > room.depth + 1e-9)
            throw Error(ErrorKind::pipeline,
                        "place: root \"" + asset.id + "\" footprint exceeds the room",
                        "room-too-small");
        pitch = std::max(pitch, (along_x ? probe.w : probe.d) + 0.4);
    }

    for (std::size_t i = 0; i < m; ++i) {
        int node = tree.roots[i];
        const Asset& asset = catalog.at(tree.nodes.at(node));
        std::size_t slot = (i + slot_rot) % m;
        double t = wall_mid + pitch * (static_cast<double>(slot) -
                                       static_cast<double>(m - 1) / 2.0);
        Rect probe = geo::bbox_for(0, 0, asset.dims, inward_yaw);
        Vec2 pos = along_x ? Vec2{t, probe.d / 2} : Vec2{probe.w / 2, t};
        intended[node] = {pos, 0.0, inward_yaw, Rect{pos.x, pos.y, probe.w, probe.d}};
        order.push_back(node);
    }

    auto kids_map = tree.children_map();
    std::vector<int> queue = tree.roots;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int parent = queue[qi];
        auto kit = kids_map.find(parent);
        if (kit == kids_map.end()) continue;
        for (int node : kit->second) {
            queue.push_back(node);
            auto pit = intended.find(parent);
            if (pit == intended.end()) { // parent had no feasible spot
                scene.audit.note("unplaceable node=" + std::to_string(node) + " asset=" +
                                 tree.nodes.at(node) + " reason=parent-dropped");
                continue;
            }
            const Intended& pp = pit->second;
            const Asset& asset = catalog.at(tree.nodes.at(node));
            const RelationBundle& rel = tree.edge_to(node)->relation;
            int yaw = ((pp.yaw + rel.orientation) % 360 + 360) % 360;
            Rect probe = geo::bbox_for(0, 0, asset.dims, yaw);
            bool done = false;

            if (rel.support) {
                double z = pp.z + catalog.at(tree.nodes.at(parent)).dims.h;
                double step = std::min(pp.bbox.w, pp.bbox.d) / 12.0;
                std::uint64_t start = detail::place_hash(seed, node, "support-spiral") % 8;
                for (int attempt = 0; attempt < 50 && !done; ++attempt) {
                    Vec2 pos = pp.pos;
                    if (attempt > 0) {
                        int ring = (attempt + 7) / 8;
                        int idx = static_cast<int>((attempt - 1 + start) % 8);
                        Vec2 dir = geo::yaw_dir(idx * 45);
                        pos = {pp.pos.x + dir.x * step * ring, pp.pos.y + dir.y * step * ring};
                    }
                    Rect bbox{pos.x, pos.y, probe.w, probe.d};
                    if (!geo::contains(pp.bbox, bbox) || collides(bbox, z)) continue;
                    intended[node] = {pos, z, yaw, bbox};
                    order.push_back(node);
                    done = true;
                }
            } else {
                Vec2 left = geo::yaw_dir((pp.yaw + 90) % 360);
                Vec2 base = rel.side == Side::left ? left : Vec2{-left.x, -left.y};
                double jitter =
                    static_cast<double>(detail::place_hash(seed, node, "jitter") % 11) - 5.0;
                double g = distance_target(rel.distance, dm);
                const double gsteps[5] = {0.0, -0.48 * dm.tolerance, 0.48 * dm.tolerance,
                                          -0.96 * dm.tolerance, 0.96 * dm.tolerance};
                // angled candidates lead with a swing toward the parent's
                // facing so children fan into the room rather than lining the
                // wall; the swing never reaches 90°, keeping the side sign
                const double toward = rel.side == Side::left ? -1.0 : 1.0;
                const double asteps[9] = {toward * 45, 0,           toward * 20,
                                          toward * 60, -toward * 20, toward * 80,
                                          -toward * 45, -toward * 60, -toward * 80};
                for (int gi = 0; gi < 5 && !done; ++gi) {
                    double target = std::max(0.0, g + gsteps[gi]);
                    for (int ai = 0; ai < 9 && !done; ++ai) {
                        Vec2 dir = geo::rotate(base, asteps[ai] + jitter);
                        double t = detail::solve_offset(pp.bbox, probe.w, probe.d, dir, target);
                        Vec2 pos{pp.pos.x + dir.x * t, pp.pos.y + dir.y * t};
                        Rect bbox{pos.x, pos.y, probe.w, probe.d};
                        double lat = (pos.x - pp.pos.x) * left.x + (pos.y - pp.pos.y) * left.y;
                        bool side_ok = rel.side == Side::left ? lat > 1e-9 : lat < -1e-9;
                        if (!side_ok || collides(bbox, 0.0)) continue;
                        if (std::abs(geo::gap(pp.bbox, bbox) - g) > dm.tolerance + 1e-9) continue;
                        intended[node] = {pos, 0.0, yaw, bbox};
                        order.push_back(node);
                        done = true;
                    }
                }
            }
            if (!done)
                scene.audit.note("unplaceable node=" + std::to_string(node) + " asset=" +
                                 catalog.at(tree.nodes.at(node)).id +
                                 " reason=no-feasible-position");
        }
    }

    // --- pass 2: an object is placed iff it is inside the room and its whole
    // ancestor chain is
    std::map<int, bool> placed_flag;
    auto parents = tree.parent_map();
    for (int node : order) {
        const Intended& it = intended.at(node);
        bool ok = geo::inside_room(it.bbox, room);
        if (auto par = parents.find(node); ok && par != parents.end())
            ok = placed_flag.count(par->second) && placed_flag.at(par->second);
        if (!ok) {
            bool parent_gone = parents.count(node) &&
                               (!placed_flag.count(parents.at(node)) ||
                                !placed_flag.at(parents.at(node)));
            scene.audit.note("unplaceable node=" + std::to_string(node) + " asset=" +
                             tree.nodes.at(node) +
                             (parent_gone && geo::inside_room(it.bbox, room)
                                  ? " reason=parent-dropped"
                                  : " reason=out-of-bounds"));
            placed_flag[node] = false;
            continue;
        }
        placed_flag[node] = true;
        const Asset& asset = catalog.at(tree.nodes.at(node));
        Placement p;
        p.node = node;
        p.asset_id = asset.id;
        p.tags = asset.tags;
        p.x = it.pos.x;
        p.y = it.pos.y;
        p.z = it.z;
        p.yaw = it.yaw;
        p.height = asset.dims.h;
        p.bbox = it.bbox;
        scene.placements.push_back(std::move(p));
    }

    std::map<int, Placement> placed;
    for (const auto& p : scene.placements) placed[p.node] = p;

    // --- prune the tree to what was placed
    scene.tree.scene_type = tree.scene_type;
    for (int r : tree.roots)
        if (placed.count(r)) scene.tree.roots.push_back(r);
    for (const auto& [node, asset_id] : tree.nodes)
        if (placed.count(node)) scene.tree.nodes[node] = asset_id;
    for (const auto& e : tree.edges)
        if (placed.count(e.parent) && placed.count(e.child)) scene.tree.edges.push_back(e);
    return scene;
}

// ---------------------------------------------------------------------------
// Scene checker
// ---------------------------------------------------------------------------

struct Violation {
    std::string kind; // overlap | out-of-bounds | support-height | ...
    std::vector<std::string> ids;
    std::string detail;
};

/// Returns every violated placement invariant; empty means the scene honors
/// the solver's contract.
inline std::vector<Violation> validate(const PlacedScene& scene, const DistanceMap& dm = {}) {
    std::vector<Violation> out;
    const double eps = 1e-6;

    std::map<int, const Placement*> by_node;
    for (const auto& p : scene.placements) {
        if (by_node.count(p.node))
            out.push_back({"node-placement", {p.asset_id}, "duplicate placement for node " +
                                                               std::to_string(p.node)});
        by_node[p.node] = &p;
    }
    for (const auto& [node, _] : scene.tree.nodes)
        if (!by_node.count(node))
            out.push_back({"node-placement",
                           {scene.tree.nodes.at(node)},
                           "tree node " + std::to_string(node) + " has no placement"});
    for (const auto& p : scene.placements)
        if (!scene.tree.nodes.count(p.node))
            out.push_back({"node-placement", {p.asset_id}, "placement without tree node"});

    for (const auto& p : scene.placements) {
        if (p.yaw % 45 != 0 || p.yaw < 0 || p.yaw >= 360)
            out.push_back({"yaw-grid", {p.asset_id}, "yaw " + std::to_string(p.yaw)});
        if (!geo::inside_room(p.bbox, scene.room, eps))
            out.push_back({"out-of-bounds", {p.asset_id}, "footprint outside room"});
    }

    for (std::size_t i = 0; i < scene.placements.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.placements.size(); ++j) {
            const Placement& a = scene.placements[i];
            const Placement& b = scene.placements[j];
            if (std::abs(a.z - b.z) < 1e-9 && geo::overlap(a.bbox, b.bbox, 1e-9))
                out.push_back({"overlap", {a.asset_id, b.asset_id}, "footprints intersect"});
        }
    }

    for (const auto& e : scene.tree.edges) {
        auto pit = by_node.find(e.parent);
        auto cit = by_node.find(e.child);
        if (pit == by_node.end() || cit == by_node.end()) continue;
        const Placement& pp = *pit->second;
        const Placement& cp = *cit->second;

        int want_yaw = ((pp.yaw + e.relation.orientation) % 360 + 360) % 360;
        if (cp.yaw != want_yaw)
            out.push_back({"orientation",
                           {pp.asset_id, cp.asset_id},
                           "yaw " + std::to_string(cp.yaw) + " != " + std::to_string(want_yaw)});

        if (e.relation.support) {
            if (std::abs(cp.z - (pp.z + pp.height)) > 1e-9)
                out.push_back({"support-height",
                               {pp.asset_id, cp.asset_id},
                               "z=" + text::format_double(cp.z) + " supporter top=" +
                                   text::format_double(pp.z + pp.height)});
            if (!geo::contains(pp.bbox, cp.bbox, 1e-9))
                out.push_back({"support-containment",
                               {pp.asset_id, cp.asset_id},
                               "child footprint escapes the supporter"});
        } else {
            if (std::abs(cp.z) > 1e-9)
                out.push_back({"ground-height", {cp.asset_id}, "non-supported child off ground"});
            Vec2 left = geo::yaw_dir((pp.yaw + 90) % 360);
            double lat = (cp.x - pp.x) * left.x + (cp.y - pp.y) * left.y;
            bool side_ok = e.relation.side == Side::left ? lat > 1e-9 : lat < -1e-9;
            if (!side_ok)
                out.push_back({"side",
                               {pp.asset_id, cp.asset_id},
                               std::string("expected ") + to_string(e.relation.side)});
            double g = distance_target(e.relation.distance, dm);
            double got = geo::gap(pp.bbox, cp.bbox);
            if (std::abs(got - g) > dm.tolerance + 1e-9)
                out.push_back({"distance",
                               {pp.asset_id, cp.asset_id},
                               "gap " + text::format_double(got) + " target " +
                                   text::format_double(g)});
        }
    }

    for (int r : scene.tree.roots) {
        auto it = by_node.find(r);
        if (it != by_node.end() && std::abs(it->second->z) > 1e-9)
            out.push_back({"ground-height", {it->second->asset_id}, "root off ground"});
    }
    return out;
}

inline void to_json(json& j, const Room& r) {
    j = json{{"width", r.width}, {"depth", r.depth}};
}

inline void from_json(const json& j, Room& r) {
    r.width = j.at("width").get<double>();
    r.depth = j.at("depth").get<double>();
}

inline void to_json(json& j, const Rect& r) {
    j = json{{"cx", r.cx}, {"cy", r.cy}, {"w", r.w}, {"d", r.d}};
}

inline void from_json(const json& j, Rect& r) {
    r.cx = j.at("cx").get<double>();
    r.cy = j.at("cy").get<double>();
    r.w = j.at("w").get<double>();
    r.d = j.at("d").get<double>();
}

inline void to_json(json& j, const Placement& p) {
    j = json{{"node", p.node}, {"asset", p.asset_id}, {"tags", p.tags},
             {"x", p.x},       {"y", p.y},            {"z", p.z},
             {"yaw", p.yaw},   {"height", p.height},  {"bbox", p.bbox}};
}

inline void from_json(const json& j, Placement& p) {
    p.node = j.at("node").get<int>();
    p.asset_id = j.at("asset").get<std::string>();
    for (const auto& t : j.value("tags", std::vector<std::string>{})) p.tags.insert(t);
    p.x = j.at("x").get<double>();
    p.y = j.at("y").get<double>();
    p.z = j.at("z").get<double>();
    p.yaw = j.at("yaw").get<int>();
    p.height = j.at("height").get<double>();
    p.bbox = j.at("bbox").get<Rect>();
}

inline void to_json(json& j, const PlacedScene& s) {
    j = json{{"room", s.room},
             {"placements", s.placements},
             {"tree", s.tree},
             {"request", s.request},
             {"audit", s.audit}};
}

inline void from_json(const json& j, PlacedScene& s) {
    s.room = j.at("room").get<Room>();
    s.placements = j.at("placements").get<std::vector<Placement>>();
    s.tree = j.at("tree").get<LayoutTree>();
    if (j.contains("request")) s.request = j.at("request").get<SceneRequest>();
    if (j.contains("audit")) s.audit = j.at("audit").get<AuditLog>();
}

inline void to_json(json& j, const Violation& v) {
    j = json{{"kind", v.kind}, {"ids", v.ids}, {"detail", v.detail}};
}

} // namespace scenegen
