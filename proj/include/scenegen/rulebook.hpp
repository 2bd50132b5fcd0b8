#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scenegen/error.hpp"
#include "scenegen/relations.hpp"
#include "scenegen/text.hpp"

namespace scenegen {

/// Per-scene rules: which tags are scene-defining mains, and which tag pairs
/// habitually co-occur. Pairs are ordered (host, attachment).
struct SceneRules {
    std::vector<std::string> mains;
    std::vector<std::pair<std::string, std::string>> pairs;
};

/// Deterministic answer tables backing the rule oracle. Relation lookups fall
/// back to `relation_default`; category scores fall back to `default_scores`.
struct RuleBook {
    std::string version;
    std::map<std::string, SceneRules> scenes;
    std::map<std::pair<std::string, std::string>, RelationBundle> relations;
    RelationBundle relation_default;
    std::map<std::string, double> default_scores;

    bool pair_member(const std::string& scene, const std::string& tag) const {
        auto it = scenes.find(scene);
        if (it == scenes.end()) return false;
        for (const auto& [a, b] : it->second.pairs)
            if (a == tag || b == tag) return true;
        return false;
    }

    bool main_tag(const std::string& scene, const std::string& tag) const {
        auto it = scenes.find(scene);
        if (it == scenes.end()) return false;
        for (const auto& m : it->second.mains)
            if (m == tag) return true;
        return false;
    }
};

namespace detail {

inline bool valid_tag(const std::string& t) {
    if (t.empty()) return false;
    if (!std::islower(static_cast<unsigned char>(t[0]))) return false;
    for (unsigned char c : t)
        if (!std::islower(c) && !std::isdigit(c) && c != '_') return false;
    return true;
}

} // namespace detail

inline RuleBook parse_rulebook(const nlohmann::ordered_json& j) {
    RuleBook book;
    book.version = j.value("version", std::string{"1"});

    if (!j.contains("relation_default"))
        throw Error(ErrorKind::input, "rulebook: missing relation_default");
    book.relation_default = j.at("relation_default").get<RelationBundle>();

    if (!j.contains("default_scores") || j.at("default_scores").empty())
        throw Error(ErrorKind::input, "rulebook: missing default_scores");
    for (const auto& [name, v] : j.at("default_scores").items())
        book.default_scores[name] = v.get<double>();

    std::set<std::string> known_tags;
    const nlohmann::ordered_json scenes_json = j.value("scenes", nlohmann::ordered_json::object());
    for (const auto& [scene, sj] : scenes_json.items()) {
        SceneRules rules;
        for (const auto& m : sj.value("mains", std::vector<std::string>{})) {
            if (!detail::valid_tag(m))
                throw Error(ErrorKind::input,
                            "rulebook scene \"" + scene + "\": main \"" + m + "\" is not a tag");
            rules.mains.push_back(m);
            known_tags.insert(m);
        }
        if (sj.contains("pairs")) {
            for (const auto& pj : sj.at("pairs")) {
                if (!pj.is_array() || pj.size() != 2)
                    throw Error(ErrorKind::input,
                                "rulebook scene \"" + scene + "\": pair must be [host, attachment]");
                std::string a = pj[0].get<std::string>(), b = pj[1].get<std::string>();
                if (!detail::valid_tag(a) || !detail::valid_tag(b))
                    throw Error(ErrorKind::input, "rulebook scene \"" + scene + "\": pair [" + a +
                                                      ", " + b + "] must reference tags");
                rules.pairs.emplace_back(a, b);
                known_tags.insert(a);
                known_tags.insert(b);
            }
        }
        book.scenes[scene] = std::move(rules);
    }
    if (book.scenes.empty()) throw Error(ErrorKind::input, "rulebook: no scenes defined");

    for (const auto& rj : j.value("relations", nlohmann::ordered_json::array())) {
        std::string parent = rj.at("parent").get<std::string>();
        std::string child = rj.at("child").get<std::string>();
        if (!detail::valid_tag(parent) || !detail::valid_tag(child))
            throw Error(ErrorKind::input, "rulebook relation (" + parent + ", " + child +
                                              ") must reference tags");
        if (!known_tags.count(parent))
            throw Error(ErrorKind::input,
                        "rulebook relation references dangling tag \"" + parent + "\"");
        if (!known_tags.count(child))
            throw Error(ErrorKind::input,
                        "rulebook relation references dangling tag \"" + child + "\"");
        RelationBundle r;
        r.side = side_from_string(rj.value("side", std::string{to_string(book.relation_default.side)}));
        r.orientation = rj.value("orientation", book.relation_default.orientation);
        r.distance = distance_from_string(
            rj.value("distance", std::string{to_string(book.relation_default.distance)}));
        r.support = rj.value("support", book.relation_default.support);
        validate(r);
        book.relations[{parent, child}] = r;
    }
    return book;
}

inline RuleBook load_rulebook(const std::filesystem::path& source) {
    std::ifstream in(source);
    if (!in) throw Error(ErrorKind::input, "rulebook: cannot open \"" + source.string() + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    if (text::trim(buf.str()).empty())
        throw Error(ErrorKind::input, "rulebook \"" + source.string() + "\": empty file");
    try {
        return parse_rulebook(nlohmann::ordered_json::parse(buf.str()));
    } catch (const nlohmann::ordered_json::exception& e) {
        throw Error(ErrorKind::input, "rulebook \"" + source.string() + "\": " + e.what());
    }
}

} // namespace scenegen
