#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scenegen/catalog.hpp"
#include "support/fixtures.hpp"

using namespace scenegen;
using testsupport::make_asset;

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
    auto toks = text::tokenize("Living-Room,  SEATING!!x2");
    REQUIRE(toks == std::vector<std::string>{"living", "room", "seating", "x2"});
    REQUIRE(text::tokenize("").empty());
    REQUIRE(text::tokenize("...").empty());
}

TEST_CASE("ingest keeps file order for valid records") {
    Catalog cat = parse_catalog_text(
        "# a comment\n"
        "a_01 | alpha | one,two | 1,2,3\n"
        "b_01 | beta | three | 0.5,0.5,0.5 | other\n"
        "c_01 | gamma | four | 2,2,2 | | \n");
    REQUIRE(cat.assets.size() == 3);
    REQUIRE(cat.assets[0].id == "a_01");
    REQUIRE(cat.assets[1].id == "b_01");
    REQUIRE(cat.assets[2].id == "c_01");
    REQUIRE(cat.assets[1].category_hint == "other");
    REQUIRE(cat.assets[0].tags == std::set<std::string>{"one", "two"});
}

TEST_CASE("duplicate id names both lines") {
    std::string body =
        "x_01 | x | a | 1,1,1\n"
        "sofa_01 | sofa | a | 1,1,1\n"
        "y_01 | y | a | 1,1,1\n"
        "z_01 | z | a | 1,1,1\n"
        "w_01 | w | a | 1,1,1\n"
        "v_01 | v | a | 1,1,1\n"
        "sofa_01 | sofa again | a | 1,1,1\n";
    try {
        parse_catalog_text(body);
        FAIL("expected duplicate-id error");
    } catch (const Error& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("sofa_01") != std::string::npos);
        REQUIRE(msg.find("2") != std::string::npos);
        REQUIRE(msg.find("7") != std::string::npos);
    }
}

TEST_CASE("empty file ingests to an empty catalog") {
    Catalog cat = parse_catalog_text("");
    REQUIRE(cat.assets.empty());
}

TEST_CASE("malformed lines name the line and field") {
    REQUIRE_THROWS_WITH(parse_catalog_text("a | a | t | 1,2\n"),
                        Catch::Matchers::ContainsSubstring("line 1") &&
                            Catch::Matchers::ContainsSubstring("dims"));
    REQUIRE_THROWS_WITH(parse_catalog_text("a | a | t | 1,2,zz\n"),
                        Catch::Matchers::ContainsSubstring("dims"));
    REQUIRE_THROWS_WITH(parse_catalog_text("only two | fields\n"),
                        Catch::Matchers::ContainsSubstring("expected 4-6 fields"));
    REQUIRE_THROWS_WITH(parse_catalog_text("a | a | t | 0,1,1\n"),
                        Catch::Matchers::ContainsSubstring("positive"));
}

TEST_CASE("feature vectors must share dimensionality and be unit length") {
    REQUIRE_THROWS_WITH(
        parse_catalog_text("a | a | t | 1,1,1 | | 1,0\n"
                           "b | b | t | 1,1,1 | | 1,0,0\n"),
        Catch::Matchers::ContainsSubstring("dimensionality"));
    REQUIRE_THROWS_WITH(parse_catalog_text("a | a | t | 1,1,1 | | 2,0\n"),
                        Catch::Matchers::ContainsSubstring("unit-normalized"));
}

TEST_CASE("json catalog variant uses the same field names") {
    json j = {{"version", "v2"},
              {"assets",
               {{{"id", "a_01"},
                 {"name", "alpha"},
                 {"tags", {"one", "two"}},
                 {"dims", {{"w", 1.0}, {"d", 2.0}, {"h", 3.0}}},
                 {"category_hint", ""}}}}};
    Catalog cat = parse_catalog_json(j);
    REQUIRE(cat.version == "v2");
    REQUIRE(cat.assets.size() == 1);
    REQUIRE(cat.assets[0].dims == Dims{1.0, 2.0, 3.0});
}

TEST_CASE("catalog text round-trips") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 25; ++i) {
        Catalog cat = testsupport::random_catalog(rng, 40, i % 2 == 0);
        Catalog back = parse_catalog_text(write_catalog_text(cat));
        REQUIRE(back == cat);
    }
}

TEST_CASE("similarity matches the hand-computed examples") {
    // full token overlap
    Asset stove = make_asset("stove", {"kitchen", "stove"});
    REQUIRE(similarity(stove, {"kitchen stove", {}}) == 1.0);
    // zero overlap
    Asset bed = make_asset("bedroom", {"bedroom"});
    REQUIRE(similarity(bed, {"casino", {}}) == 0.0);
    // |{seating,living}| / |{sofa,seating,living,room}| = 2/4
    Asset sofa = make_asset("sofa", {"sofa", "seating", "living"});
    REQUIRE(similarity(sofa, {"living room seating", {}}) == 0.5);
}

TEST_CASE("similarity rejects an empty query") {
    Asset a = make_asset("a", {"x"});
    REQUIRE_THROWS_AS(similarity(a, {"", {}}), Error);
}

TEST_CASE("similarity blends feature cosine when both sides carry vectors") {
    Asset a = make_asset("x", {"x"}); // name and tag share the one token
    a.feature = std::vector<double>{1.0, 0.0};
    Query q{"x", std::vector<double>{1.0, 0.0}};
    SimilarityWeights w{1.0, 1.0};
    REQUIRE(similarity(a, q, w) == Catch::Approx(1.0)); // lexical 1, cosine01 1
    Query opposite{"x", std::vector<double>{-1.0, 0.0}};
    REQUIRE(similarity(a, opposite, w) == Catch::Approx(0.5)); // (1 + 0) / 2
    // lexical-only when the query has no vector
    REQUIRE(similarity(a, {"x", {}}, w) == 1.0);
}

TEST_CASE("similarity is bounded and token-order free") {
    std::mt19937_64 rng(7);
    Catalog cat = testsupport::random_catalog(rng, 30);
    for (const auto& a : cat.assets) {
        double s1 = similarity(a, {"bed lamp kitchen", {}});
        double s2 = similarity(a, {"kitchen bed lamp", {}});
        REQUIRE(s1 == s2);
        REQUIRE(s1 >= 0.0);
        REQUIRE(s1 <= 1.0);
    }
}
