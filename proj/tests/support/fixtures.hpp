#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scenegen/catalog.hpp"
#include "scenegen/oracle.hpp"
#include "scenegen/retriever.hpp"
#include "scenegen/rulebook.hpp"

namespace testsupport {

using namespace scenegen;

inline std::filesystem::path data_dir() { return SCENEGEN_DATA_DIR; }

inline const RuleBook& fixture_rulebook() {
    static RuleBook book = load_rulebook(data_dir() / "rulebook.json");
    return book;
}

inline const Catalog& fixture_catalog() {
    static Catalog cat = ingest(data_dir() / "catalog_fixture.txt");
    return cat;
}

inline const Catalog& adversarial_catalog() {
    static Catalog cat = ingest(data_dir() / "catalog_adversarial.txt");
    return cat;
}

inline Asset make_asset(std::string id, std::vector<std::string> tags,
                        Dims dims = {1.0, 1.0, 1.0}, std::string hint = "") {
    Asset a;
    a.name = id;
    a.id = std::move(id);
    for (auto& t : tags) a.tags.insert(std::move(t));
    a.dims = dims;
    a.category_hint = std::move(hint);
    return a;
}

// word pool shared by random catalogs; overlaps the fixture rulebook tags so
// rule-oracle paths (mains, pairs, relations) all get exercised
inline const std::vector<std::string>& tag_pool() {
    static std::vector<std::string> pool = {
        "bed",    "sofa",   "stove",  "pot",    "desk",   "monitor", "keyboard",
        "table",  "book",   "mirror", "sink",   "lamp",   "rug",     "plant",
        "chair",  "shelf",  "vase",   "box",    "crate",  "bench",   "stool",
        "screen", "frame",  "basket", "drum",   "easel",  "globe",   "clock",
        "kitchen", "bedroom"};
    return pool;
}

inline Catalog random_catalog(std::mt19937_64& rng, std::size_t max_assets = 100,
                              bool with_features = false) {
    std::uniform_int_distribution<std::size_t> n_dist(1, max_assets);
    std::uniform_int_distribution<std::size_t> ntags(1, 4);
    std::uniform_int_distribution<std::size_t> tag_idx(0, tag_pool().size() - 1);
    std::uniform_real_distribution<double> dim(0.2, 2.4);
    std::uniform_int_distribution<int> hint_roll(0, 9);
    std::uniform_real_distribution<double> feat(-1.0, 1.0);

    Catalog cat;
    std::size_t n = n_dist(rng);
    if (with_features) cat.feature_dim = 4;
    for (std::size_t i = 0; i < n; ++i) {
        Asset a;
        a.id = "asset_" + std::to_string(i);
        std::size_t k = ntags(rng);
        for (std::size_t t = 0; t < k; ++t) a.tags.insert(tag_pool()[tag_idx(rng)]);
        a.name = *a.tags.begin();
        a.dims = {dim(rng), dim(rng), dim(rng)};
        int roll = hint_roll(rng);
        if (roll == 0) a.category_hint = "main";
        else if (roll == 1) a.category_hint = "other";
        if (with_features) {
            std::vector<double> v(4);
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (auto& x : v) {
                    x = feat(rng);
                    norm2 += x * x;
                }
            } while (norm2 < 1e-6);
            double norm = std::sqrt(norm2);
            for (auto& x : v) x /= norm;
            a.feature = std::move(v);
        }
        cat.assets.push_back(std::move(a));
    }
    return cat;
}

// retrieved set over unique synthetic assets; returns the backing catalog too
struct RandomRetrieved {
    Catalog catalog;
    RetrievedSet retrieved;
};

inline RandomRetrieved random_retrieved(std::mt19937_64& rng, int max_mains = 4,
                                        int max_paired = 8, int max_other = 12) {
    std::uniform_int_distribution<int> mains_dist(1, max_mains);
    std::uniform_int_distribution<int> paired_dist(0, max_paired);
    std::uniform_int_distribution<int> other_dist(0, max_other);
    std::uniform_int_distribution<std::size_t> tag_idx(0, tag_pool().size() - 1);
    std::uniform_real_distribution<double> dim(0.2, 1.6);
    std::uniform_real_distribution<double> score(0.2, 1.0);

    RandomRetrieved out;
    out.retrieved.category_order = {"main", "paired", "other"};
    int counts[3] = {mains_dist(rng), paired_dist(rng), other_dist(rng)};
    const char* cats[3] = {"main", "paired", "other"};
    int serial = 0;
    for (int c = 0; c < 3; ++c) {
        std::vector<ScoredItem> items;
        for (int i = 0; i < counts[c]; ++i) {
            Asset a;
            a.id = std::string(cats[c]) + "_" + std::to_string(serial++);
            a.tags.insert(tag_pool()[tag_idx(rng)]);
            a.name = *a.tags.begin();
            a.dims = {dim(rng), dim(rng), dim(rng)};
            out.catalog.assets.push_back(a);
            items.push_back({a.id, score(rng)});
        }
        detail::sort_items(items);
        out.retrieved.accepted[cats[c]] = std::move(items);
    }
    return out;
}

/// Forwards to an inner oracle, counting dispatched asks per kind.
class CountingOracle : public DecisionOracle {
public:
    explicit CountingOracle(DecisionOracle& inner) : inner_(inner) {}

    std::uint64_t count(QueryKind k) const { return counts_[static_cast<int>(k)]; }

protected:
    OracleReply::Source source() const override { return OracleReply::Source::rule; }

    OracleReply do_ask(const OracleQuery& q) override {
        ++counts_[static_cast<int>(q.kind())];
        return inner_.ask(q);
    }

private:
    DecisionOracle& inner_;
    std::uint64_t counts_[4] = {0, 0, 0, 0};
};

/// Multiplies every score answer by a positive constant; other kinds pass
/// through. Used to check argmax scale invariance.
class ScaledOracle : public DecisionOracle {
public:
    ScaledOracle(DecisionOracle& inner, double factor) : inner_(inner), factor_(factor) {}

protected:
    OracleReply::Source source() const override { return OracleReply::Source::rule; }

    OracleReply do_ask(const OracleQuery& q) override {
        OracleReply r = inner_.ask(q);
        if (q.kind() == QueryKind::score)
            r.answer["score"] = r.answer.at("score").get<double>() * factor_;
        return r;
    }

private:
    DecisionOracle& inner_;
    double factor_;
};

} // namespace testsupport
