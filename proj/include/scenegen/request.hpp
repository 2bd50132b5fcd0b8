#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "scenegen/catalog.hpp"

namespace scenegen {

struct RetrievalConfig {
    std::map<std::string, int> k_per_path; // category -> top-k, every k >= 1
    double tau = 0.2;                      // acceptance threshold
    bool baseline_mode = false;            // single-corpus top-(sum k) retrieval
    std::uint64_t seed = 0;
    SimilarityWeights weights;

    int total_k() const {
        int n = 0;
        for (const auto& [_, k] : k_per_path) n += k;
        return n;
    }

    friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
};

struct SceneRequest {
    std::string scene_type;
    double room_width = 6.0;
    double room_depth = 6.0;
    std::uint64_t seed = 0;
    RetrievalConfig retrieval;
    std::string category_set = "standard";
    std::string oracle = "rule"; // rule | remote

    Query prompt() const { return Query{scene_type, {}}; }

    friend bool operator==(const SceneRequest&, const SceneRequest&) = default;
};

inline void to_json(json& j, const RetrievalConfig& c) {
    j = json{{"k_per_path", c.k_per_path},
             {"tau", c.tau},
             {"baseline_mode", c.baseline_mode},
             {"seed", c.seed},
             {"weights", {{"lexical", c.weights.lexical}, {"feature", c.weights.feature}}}};
}

inline void from_json(const json& j, RetrievalConfig& c) {
    c.k_per_path = j.at("k_per_path").get<std::map<std::string, int>>();
    c.tau = j.value("tau", 0.2);
    c.baseline_mode = j.value("baseline_mode", false);
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("weights")) {
        c.weights.lexical = j.at("weights").value("lexical", 1.0);
        c.weights.feature = j.at("weights").value("feature", 0.0);
    }
}

inline void to_json(json& j, const SceneRequest& r) {
    j = json{{"scene_type", r.scene_type},
             {"room_width", r.room_width},
             {"room_depth", r.room_depth},
             {"seed", r.seed},
             {"retrieval", r.retrieval},
             {"category_set", r.category_set},
             {"oracle", r.oracle}};
}

inline void from_json(const json& j, SceneRequest& r) {
    r.scene_type = j.at("scene_type").get<std::string>();
    r.room_width = j.value("room_width", 6.0);
    r.room_depth = j.value("room_depth", 6.0);
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("retrieval")) r.retrieval = j.at("retrieval").get<RetrievalConfig>();
    r.category_set = j.value("category_set", std::string{"standard"});
    r.oracle = j.value("oracle", std::string{"rule"});
}

} // namespace scenegen
