#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "scenegen/evalkit.hpp"
#include "support/fixtures.hpp"

using namespace scenegen;

namespace {

PlacedScene scene_with(const std::string& scene_type,
                       std::vector<std::set<std::string>> placed_tags) {
    PlacedScene s;
    s.room = {6, 6};
    s.tree.scene_type = scene_type;
    s.request.scene_type = scene_type;
    int node = 0;
    for (auto& tags : placed_tags) {
        Placement p;
        p.node = node;
        p.asset_id = "asset_" + std::to_string(node);
        p.tags = std::move(tags);
        p.bbox = {1.0 + node, 1.0, 0.5, 0.5};
        p.x = p.bbox.cx;
        p.y = p.bbox.cy;
        s.tree.nodes[node] = p.asset_id;
        s.tree.roots.push_back(node);
        s.placements.push_back(std::move(p));
        ++node;
    }
    return s;
}

SceneSpec spec_of(const std::string& scene_type, std::vector<std::set<std::string>> mains,
                  std::vector<std::pair<std::set<std::string>, std::set<std::string>>> pairs = {}) {
    SceneSpec s;
    s.scene_type = scene_type;
    s.required_mains = std::move(mains);
    s.required_pairs = std::move(pairs);
    return s;
}

} // namespace

TEST_CASE("a present main counts as not missing") {
    PlacedScene s = scene_with("bedroom", {{"bed", "bedroom"}, {"lamp"}});
    SceneMissRecord rec = check_scene(s, spec_of("bedroom", {{"bed"}}));
    REQUIRE(rec.mains_required == 1);
    REQUIRE(rec.mains_missing == 0);
}

TEST_CASE("a pair with one side absent counts missing") {
    PlacedScene s = scene_with("kitchen", {{"stove"}});
    SceneMissRecord rec =
        check_scene(s, spec_of("kitchen", {{"stove"}}, {{{"pot"}, {"stove"}}}));
    REQUIRE(rec.pairs_required == 1);
    REQUIRE(rec.pairs_missing == 1);
    REQUIRE(rec.mains_missing == 0);
}

TEST_CASE("one of two mains present gives a 0.5 rate") {
    PlacedScene s = scene_with("kitchen", {{"stove"}});
    SceneMissRecord rec = check_scene(s, spec_of("kitchen", {{"stove"}, {"fridge"}}));
    REQUIRE(rec.mains_required == 2);
    REQUIRE(rec.mains_missing == 1);
    MissReport report = aggregate({rec});
    REQUIRE(report.main_missing_rate == 0.5);
}

TEST_CASE("scene type must match the spec") {
    PlacedScene s = scene_with("bedroom", {{"bed"}});
    REQUIRE_THROWS_AS(check_scene(s, spec_of("kitchen", {{"stove"}})), Error);
}

TEST_CASE("specs need at least one required main") {
    PlacedScene s = scene_with("bedroom", {{"bed"}});
    REQUIRE_THROWS_AS(check_scene(s, spec_of("bedroom", {})), Error);
}

TEST_CASE("comparing identical batches gives zero deltas") {
    std::vector<PlacedScene> batch = {scene_with("bedroom", {{"bed"}}),
                                      scene_with("bedroom", {{"lamp"}})};
    std::vector<SceneSpec> specs = {spec_of("bedroom", {{"bed"}}),
                                    spec_of("bedroom", {{"bed"}})};
    CompareReport rep = compare(batch, batch, specs);
    REQUIRE(rep.main_delta == 0.0);
    REQUIRE(rep.paired_delta == 0.0);
    REQUIRE(rep.a.main_missing_rate == 0.5);
}

TEST_CASE("compare validates batch shapes") {
    std::vector<PlacedScene> batch = {scene_with("bedroom", {{"bed"}})};
    std::vector<SceneSpec> specs = {spec_of("bedroom", {{"bed"}})};
    REQUIRE_THROWS_AS(compare({}, {}, {}), Error);
    std::vector<PlacedScene> bigger = {batch[0], batch[0]};
    REQUIRE_THROWS_AS(compare(batch, bigger, specs), Error);
    REQUIRE_THROWS_AS(compare(batch, batch, {}), Error);
}

TEST_CASE("rates aggregate exactly from per-scene records") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<PlacedScene> batch;
    std::vector<SceneSpec> specs;
    for (int i = 0; i < 30; ++i) {
        bool has_bed = coin(rng);
        bool has_pot = coin(rng);
        std::vector<std::set<std::string>> tags;
        if (has_bed) tags.push_back({"bed"});
        if (has_pot) tags.push_back({"pot"});
        tags.push_back({"noise"});
        batch.push_back(scene_with("bedroom", tags));
        specs.push_back(spec_of("bedroom", {{"bed"}}, {{{"bed"}, {"pot"}}}));
    }
    std::vector<SceneMissRecord> records;
    int mains_missing = 0, pairs_missing = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        records.push_back(check_scene(batch[i], specs[i]));
        mains_missing += records.back().mains_missing;
        pairs_missing += records.back().pairs_missing;
    }
    MissReport rep = aggregate(records);
    REQUIRE(rep.mains_missing == mains_missing);
    REQUIRE(rep.pairs_missing == pairs_missing);
    REQUIRE(rep.main_missing_rate == static_cast<double>(mains_missing) / 30);
    REQUIRE(rep.paired_missing_rate == static_cast<double>(pairs_missing) / 30);

    // order invariance
    std::vector<std::size_t> perm(batch.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<SceneMissRecord> shuffled;
    for (std::size_t i : perm) shuffled.push_back(check_scene(batch[i], specs[i]));
    MissReport rep2 = aggregate(shuffled);
    REQUIRE(rep2.main_missing_rate == rep.main_missing_rate);
    REQUIRE(rep2.paired_missing_rate == rep.paired_missing_rate);
}

TEST_CASE("check_scene ignores the audit trail") {
    PlacedScene s = scene_with("bedroom", {{"bed"}});
    SceneMissRecord before = check_scene(s, spec_of("bedroom", {{"bed"}}));
    s.audit.note("unplaceable node=99 asset=bed_99 reason=no-feasible-position");
    SceneMissRecord after = check_scene(s, spec_of("bedroom", {{"bed"}}));
    REQUIRE(before == after);
}

TEST_CASE("evaluator prompt template") {
    REQUIRE(prompt_text("bedroom") == "a top-down view of bedroom");
    REQUIRE(prompt_text("living room") == "a top-down view of living room");
    REQUIRE_THROWS_AS(prompt_text(""), Error);
}

TEST_CASE("spec files load") {
    auto specs = load_specs(testsupport::data_dir() / "specs.json");
    REQUIRE(specs.size() == 4);
    REQUIRE(specs[0].scene_type == "bedroom");
    REQUIRE_FALSE(specs[0].required_mains.empty());
}
