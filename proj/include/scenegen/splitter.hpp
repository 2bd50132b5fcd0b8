#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/catalog.hpp"
#include "scenegen/error.hpp"
#include "scenegen/oracle.hpp"

namespace scenegen {

struct Category {
    std::string name;
    std::string profile; // free text describing the category, used for alignment

    friend bool operator==(const Category&, const Category&) = default;
};

struct CategorySet {
    std::vector<Category> categories;

    void validate() const {
        if (categories.empty())
            throw Error(ErrorKind::input, "category set: at least one category required");
        std::set<std::string> names;
        for (const auto& c : categories) {
            if (c.name.empty())
                throw Error(ErrorKind::input, "category set: empty category name");
            if (!names.insert(c.name).second)
                throw Error(ErrorKind::input, "category set: duplicate name \"" + c.name + "\"");
        }
    }

    // The three-way split used for scene generation.
    static CategorySet standard() {
        return CategorySet{{
            {"main", "scene-defining central object the environment cannot do without"},
            {"paired", "object that habitually co-occurs with a partner object"},
            {"other", "decor and miscellaneous objects"},
        }};
    }

    friend bool operator==(const CategorySet&, const CategorySet&) = default;
};

struct AssignmentProvenance {
    std::string category;
    double score = 0.0;
    std::string source; // "rule" | "remote"

    friend bool operator==(const AssignmentProvenance&, const AssignmentProvenance&) = default;
};

/// Total partition of a catalog into named knowledge paths.
struct KnowledgePaths {
    std::string scene_context;
    std::vector<std::string> category_order;
    std::map<std::string, std::vector<std::string>> partition; // category -> asset ids
    std::map<std::string, AssignmentProvenance> provenance;    // asset id -> record

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [_, ids] : partition) n += ids.size();
        return n;
    }

    const std::string& category_of(const std::string& asset_id) const {
        auto it = provenance.find(asset_id);
        if (it == provenance.end())
            throw Error(ErrorKind::input, "partition: unknown asset id \"" + asset_id + "\"");
        return it->second.category;
    }
};

/// AlignmentScore realization: membership score of `asset` in `category` for
/// the given scene context, answered by the decision oracle.
inline double align(const Asset& asset, const Category& category,
                    const std::string& scene_context, DecisionOracle& oracle,
                    OracleReply::Source* source_out = nullptr) {
    if (category.profile.empty())
        throw Error(ErrorKind::input, "align: category \"" + category.name + "\" has no profile");
    OracleQuery q;
    q.scene_type = scene_context;
    q.budget_id = "align/" + asset.id + "/" + category.name;
    q.payload = ScoreQuery{AssetRef::from(asset), CategoryRef{category.name, category.profile},
                           {}, {}};
    OracleReply r = oracle.ask(q);
    double s = r.score();
    if (s < 0.0 || s > 1.0)
        throw Error(ErrorKind::oracle,
                    "align: score " + text::format_double(s) + " outside [0,1]; " + r.raw);
    if (source_out) *source_out = r.source;
    return s;
}

/// Assigns every asset to its argmax-aligned category; ties go to the category
/// declared first.
inline KnowledgePaths split(const Catalog& catalog, const CategorySet& categories,
                            const std::string& scene_context, DecisionOracle& oracle) {
    categories.validate();
    if (catalog.assets.empty())
        throw Error(ErrorKind::input, "split: empty catalog");
    KnowledgePaths paths;
    paths.scene_context = scene_context;
    for (const auto& c : categories.categories) {
        paths.category_order.push_back(c.name);
        paths.partition[c.name]; // keep empty categories present
    }
    for (const auto& asset : catalog.assets) {
        std::size_t best = 0;
        double best_score = -1.0;
        OracleReply::Source best_source = OracleReply::Source::rule;
        for (std::size_t i = 0; i < categories.categories.size(); ++i) {
            OracleReply::Source src;
            double s = align(asset, categories.categories[i], scene_context, oracle, &src);
            if (s > best_score) {
                best_score = s;
                best = i;
                best_source = src;
            }
        }
        const std::string& winner = categories.categories[best].name;
        paths.partition[winner].push_back(asset.id);
        paths.provenance[asset.id] =
            AssignmentProvenance{winner, best_score, to_string(best_source)};
    }
    return paths;
}

inline void to_json(json& j, const AssignmentProvenance& p) {
    j = json{{"category", p.category}, {"score", p.score}, {"source", p.source}};
}

inline void from_json(const json& j, AssignmentProvenance& p) {
    p.category = j.at("category").get<std::string>();
    p.score = j.at("score").get<double>();
    p.source = j.at("source").get<std::string>();
}

inline void to_json(json& j, const KnowledgePaths& p) {
    j = json{{"scene_context", p.scene_context},
             {"categories", p.category_order},
             {"partition", p.partition},
             {"provenance", p.provenance}};
}

inline void from_json(const json& j, KnowledgePaths& p) {
    p.scene_context = j.at("scene_context").get<std::string>();
    p.category_order = j.at("categories").get<std::vector<std::string>>();
    p.partition = j.at("partition").get<std::map<std::string, std::vector<std::string>>>();
    p.provenance = j.at("provenance").get<std::map<std::string, AssignmentProvenance>>();
}

inline void to_json(json& j, const Category& c) {
    j = json{{"name", c.name}, {"profile", c.profile}};
}

inline void from_json(const json& j, Category& c) {
    c.name = j.at("name").get<std::string>();
    c.profile = j.at("profile").get<std::string>();
}

inline void to_json(json& j, const CategorySet& c) { j = json{{"categories", c.categories}}; }

inline void from_json(const json& j, CategorySet& c) {
    c.categories = j.at("categories").get<std::vector<Category>>();
    c.validate();
}

} // namespace scenegen
