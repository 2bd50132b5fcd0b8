#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "scenegen/layout.hpp"
#include "support/fixtures.hpp"

using namespace scenegen;
using testsupport::fixture_rulebook;
using testsupport::make_asset;

namespace {

LayoutTree tree_with_edges(std::vector<std::string> roots,
                           std::vector<std::tuple<int, int, RelationBundle>> edges,
                           std::vector<std::string> non_roots,
                           const std::string& scene = "test") {
    LayoutTree t;
    t.scene_type = scene;
    int id = 0;
    for (auto& r : roots) {
        t.nodes[id] = r;
        t.roots.push_back(id);
        ++id;
    }
    for (auto& n : non_roots) t.nodes[id++] = n;
    for (auto& [p, c, rel] : edges) t.edges.push_back({p, c, rel});
    return t;
}

} // namespace

TEST_CASE("distance targets map the three classes") {
    REQUIRE(distance_target(Distance::near) == 0.5);
    REQUIRE(distance_target(Distance::medium) == 1.5);
    REQUIRE(distance_target(Distance::far) == 3.0);
    DistanceMap custom{0.4, 1.0, 2.0, 0.2};
    REQUIRE(distance_target(Distance::far, custom) == 2.0);
}

TEST_CASE("a single root faces the room center from the longest wall") {
    Catalog cat;
    cat.assets = {make_asset("bed_01", {"bed"}, {2.0, 1.6, 0.5})};
    LayoutTree tree = tree_with_edges({"bed_01"}, {}, {});
    PlacedScene scene = place(tree, cat, Room{6, 6}, 0);
    REQUIRE(scene.placements.size() == 1);
    const Placement& p = scene.placements[0];
    REQUIRE(p.z == 0.0);
    REQUIRE(p.yaw == 90); // faces +y toward the center
    REQUIRE(geo::inside_room(p.bbox, scene.room));
    REQUIRE(p.x == 3.0);
}

TEST_CASE("support stacks the child on the parent top") {
    Catalog cat;
    cat.assets = {make_asset("stove_01", {"stove"}, {0.6, 0.6, 0.9}),
                  make_asset("pot_01", {"pot"}, {0.3, 0.3, 0.2})};
    RelationBundle rel;
    rel.support = true;
    rel.distance = Distance::near;
    rel.orientation = 0;
    LayoutTree tree = tree_with_edges({"stove_01"}, {{0, 1, rel}}, {"pot_01"});
    PlacedScene scene = place(tree, cat, Room{6, 6}, 0);
    REQUIRE(scene.placements.size() == 2);
    const Placement& stove = *scene.find_node(0);
    const Placement& pot = *scene.find_node(1);
    REQUIRE(pot.z == stove.z + stove.height);
    REQUIRE(geo::contains(stove.bbox, pot.bbox));
    REQUIRE(geo::gap(stove.bbox, pot.bbox) == 0.0); // contact, no gap target
    REQUIRE(validate(scene).empty());
}

TEST_CASE("left and right children sit on opposite sides within the gap band") {
    Catalog cat;
    cat.assets = {make_asset("sofa_01", {"sofa"}, {2.0, 0.9, 0.8}),
                  make_asset("lamp_01", {"lamp"}, {0.3, 0.3, 1.5}),
                  make_asset("stool_01", {"stool"}, {0.4, 0.4, 0.5})};
    RelationBundle left;
    left.side = Side::left;
    left.distance = Distance::near;
    left.orientation = 0;
    RelationBundle right;
    right.side = Side::right;
    right.distance = Distance::near;
    right.orientation = 0;
    LayoutTree tree =
        tree_with_edges({"sofa_01"}, {{0, 1, left}, {0, 2, right}}, {"lamp_01", "stool_01"});
    PlacedScene scene = place(tree, cat, Room{8, 8}, 3);
    REQUIRE(scene.placements.size() == 3);
    const Placement& sofa = *scene.find_node(0);
    const Placement& lamp = *scene.find_node(1);
    const Placement& stool = *scene.find_node(2);
    Vec2 l = geo::yaw_dir((sofa.yaw + 90) % 360);
    double lat_lamp = (lamp.x - sofa.x) * l.x + (lamp.y - sofa.y) * l.y;
    double lat_stool = (stool.x - sofa.x) * l.x + (stool.y - sofa.y) * l.y;
    REQUIRE(lat_lamp > 0.0);
    REQUIRE(lat_stool < 0.0);
    for (const Placement* c : {&lamp, &stool}) {
        double gap = geo::gap(sofa.bbox, c->bbox);
        REQUIRE(gap >= 0.25);
        REQUIRE(gap <= 0.75);
    }
    REQUIRE(validate(scene).empty());
}

TEST_CASE("a root footprint larger than the room is an error") {
    Catalog cat;
    cat.assets = {make_asset("stage_01", {"stage"}, {7.0, 7.0, 0.4})};
    LayoutTree tree = tree_with_edges({"stage_01"}, {}, {});
    try {
        place(tree, cat, Room{6, 6}, 0);
        FAIL("expected room-too-small");
    } catch (const Error& e) {
        REQUIRE(e.code() == "room-too-small");
    }
}

TEST_CASE("validate flags hand-built violations") {
    PlacedScene scene;
    scene.room = {6, 6};
    scene.tree.scene_type = "test";
    scene.tree.roots = {0, 1};
    scene.tree.nodes = {{0, "a_01"}, {1, "b_01"}};

    Placement a;
    a.node = 0;
    a.asset_id = "a_01";
    a.x = 2.0;
    a.y = 2.0;
    a.yaw = 0;
    a.height = 1.0;
    a.bbox = {2.0, 2.0, 1.0, 1.0};
    Placement b = a;
    b.node = 1;
    b.asset_id = "b_01";
    b.x = 2.4;
    b.bbox.cx = 2.4;
    scene.placements = {a, b};

    auto violations = validate(scene);
    REQUIRE(violations.size() == 1);
    REQUIRE(violations[0].kind == "overlap");
    REQUIRE(violations[0].ids == std::vector<std::string>{"a_01", "b_01"});

    // supported child resting at ground level
    PlacedScene s2;
    s2.room = {6, 6};
    s2.tree.roots = {0};
    s2.tree.nodes = {{0, "a_01"}, {1, "c_01"}};
    RelationBundle rel;
    rel.support = true;
    rel.orientation = 0;
    rel.distance = Distance::near;
    s2.tree.edges = {{0, 1, rel}};
    Placement c;
    c.node = 1;
    c.asset_id = "c_01";
    c.x = 2.0;
    c.y = 2.0;
    c.z = 0.0; // should be at a.z + a.height
    c.yaw = 0;
    c.height = 0.2;
    c.bbox = {2.0, 2.0, 0.4, 0.4};
    s2.placements = {a, c};
    bool saw_support_height = false;
    for (const auto& v : validate(s2))
        if (v.kind == "support-height") saw_support_height = true;
    REQUIRE(saw_support_height);

    // missing placement for a tree node
    PlacedScene s3;
    s3.room = {6, 6};
    s3.tree.roots = {0};
    s3.tree.nodes = {{0, "a_01"}, {1, "gone_01"}};
    s3.tree.edges = {};
    s3.placements = {a};
    bool saw_node = false;
    for (const auto& v : validate(s3))
        if (v.kind == "node-placement") saw_node = true;
    REQUIRE(saw_node);
}

TEST_CASE("place output validates clean over organized fixtures") {
    std::mt19937_64 rng(808);
    RuleOracle oracle(fixture_rulebook(), 2);
    for (int trial = 0; trial < 20; ++trial) {
        auto rr = testsupport::random_retrieved(rng, 3, 5, 8);
        LayoutTree tree = organize(rr.retrieved, rr.catalog, "kitchen", oracle);
        for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
            PlacedScene scene = place(tree, rr.catalog, Room{10, 10}, seed);
            auto violations = validate(scene);
            if (!violations.empty()) {
                for (const auto& v : violations)
                    UNSCOPED_INFO(v.kind << " [" << (v.ids.empty() ? "" : v.ids[0]) << "] "
                                         << v.detail);
            }
            REQUIRE(violations.empty());
        }
    }
}

TEST_CASE("place is deterministic") {
    std::mt19937_64 rng(13);
    RuleOracle oracle(fixture_rulebook(), 4);
    auto rr = testsupport::random_retrieved(rng);
    LayoutTree tree = organize(rr.retrieved, rr.catalog, "bedroom", oracle);
    PlacedScene s1 = place(tree, rr.catalog, Room{9, 7}, 42);
    PlacedScene s2 = place(tree, rr.catalog, Room{9, 7}, 42);
    REQUIRE(s1 == s2);
    json j1 = s1, j2 = s2;
    REQUIRE(j1.dump() == j2.dump());
}

TEST_CASE("shrinking the room never places an object the larger room dropped") {
    std::mt19937_64 rng(606);
    RuleOracle oracle(fixture_rulebook(), 8);
    for (int trial = 0; trial < 15; ++trial) {
        auto rr = testsupport::random_retrieved(rng, 2, 6, 10);
        LayoutTree tree = organize(rr.retrieved, rr.catalog, "living room", oracle);
        for (std::uint64_t seed : {1ull, 2ull}) {
            PlacedScene large = place(tree, rr.catalog, Room{12, 12}, seed);
            PlacedScene small = place(tree, rr.catalog, Room{8, 8}, seed);
            std::set<std::string> placed_large, placed_small;
            for (const auto& p : large.placements) placed_large.insert(p.asset_id);
            for (const auto& p : small.placements) placed_small.insert(p.asset_id);
            for (const auto& id : placed_small) REQUIRE(placed_large.count(id) == 1);
        }
    }
}

TEST_CASE("scene files round-trip") {
    Catalog cat;
    cat.assets = {make_asset("stove_01", {"stove"}, {0.6, 0.6, 0.9}),
                  make_asset("pot_01", {"pot"}, {0.3, 0.3, 0.2})};
    RelationBundle rel;
    rel.support = true;
    rel.orientation = 0;
    rel.distance = Distance::near;
    LayoutTree tree = tree_with_edges({"stove_01"}, {{0, 1, rel}}, {"pot_01"});
    PlacedScene scene = place(tree, cat, Room{6, 6}, 0);
    json j = scene;
    PlacedScene back = j.get<PlacedScene>();
    REQUIRE(back == scene);
}
