#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/error.hpp"
#include "scenegen/layout.hpp"

namespace scenegen {

/// What a finished scene must contain to count as complete. A main is present
/// if any placement's tags intersect its tag set; a pair needs both sides.
struct SceneSpec {
    std::string scene_type;
    std::vector<std::set<std::string>> required_mains;
    std::vector<std::pair<std::set<std::string>, std::set<std::string>>> required_pairs;

    void validate() const {
        if (required_mains.empty())
            throw Error(ErrorKind::input,
                        "scene spec \"" + scene_type + "\": at least one required main");
    }
};

struct SceneMissRecord {
    std::string scene_type;
    int mains_required = 0;
    int mains_missing = 0;
    int pairs_required = 0;
    int pairs_missing = 0;
    std::vector<std::string> missing; // human-readable details

    friend bool operator==(const SceneMissRecord&, const SceneMissRecord&) = default;
};

struct MissReport {
    int n_scenes = 0;
    int mains_required = 0;
    int mains_missing = 0;
    int pairs_required = 0;
    int pairs_missing = 0;
    double main_missing_rate = 0.0;   // mains_missing / mains_required
    double paired_missing_rate = 0.0; // pairs_missing / pairs_required (0 when none required)
    std::vector<SceneMissRecord> per_scene;
};

struct CompareReport {
    MissReport a; // first batch (e.g. baseline)
    MissReport b; // second batch (e.g. multi-path)
    double main_delta = 0.0;   // a - b
    double paired_delta = 0.0; // a - b
    int n = 0;
};

namespace detail {

inline bool tags_match(const std::set<std::string>& placement_tags,
                       const std::set<std::string>& wanted) {
    for (const auto& t : wanted)
        if (placement_tags.count(t)) return true;
    return false;
}

inline std::string join_tags(const std::set<std::string>& tags) {
    std::string out;
    for (const auto& t : tags) {
        if (!out.empty()) out += "|";
        out += t;
    }
    return out;
}

} // namespace detail

/// Counts required mains and pairs absent from the scene's placements.
inline SceneMissRecord check_scene(const PlacedScene& scene, const SceneSpec& spec) {
    spec.validate();
    const std::string& scene_type =
        scene.tree.scene_type.empty() ? scene.request.scene_type : scene.tree.scene_type;
    if (scene_type != spec.scene_type)
        throw Error(ErrorKind::input, "check_scene: scene type \"" + scene_type +
                                          "\" does not match spec \"" + spec.scene_type + "\"");
    SceneMissRecord rec;
    rec.scene_type = spec.scene_type;
    auto present = [&](const std::set<std::string>& wanted) {
        for (const auto& p : scene.placements)
            if (detail::tags_match(p.tags, wanted)) return true;
        return false;
    };
    rec.mains_required = static_cast<int>(spec.required_mains.size());
    for (const auto& want : spec.required_mains) {
        if (!present(want)) {
            ++rec.mains_missing;
            rec.missing.push_back("main " + detail::join_tags(want));
        }
    }
    rec.pairs_required = static_cast<int>(spec.required_pairs.size());
    for (const auto& [a, b] : spec.required_pairs) {
        if (!present(a) || !present(b)) {
            ++rec.pairs_missing;
            rec.missing.push_back("pair " + detail::join_tags(a) + " + " + detail::join_tags(b));
        }
    }
    return rec;
}

inline MissReport aggregate(const std::vector<SceneMissRecord>& records) {
    MissReport r;
    r.n_scenes = static_cast<int>(records.size());
    for (const auto& rec : records) {
        r.mains_required += rec.mains_required;
        r.mains_missing += rec.mains_missing;
        r.pairs_required += rec.pairs_required;
        r.pairs_missing += rec.pairs_missing;
    }
    r.main_missing_rate =
        r.mains_required ? static_cast<double>(r.mains_missing) / r.mains_required : 0.0;
    r.paired_missing_rate =
        r.pairs_required ? static_cast<double>(r.pairs_missing) / r.pairs_required : 0.0;
    r.per_scene = records;
    return r;
}

/// Paired comparison of two batches generated from identical requests.
inline CompareReport compare(const std::vector<PlacedScene>& batch_a,
                             const std::vector<PlacedScene>& batch_b,
                             const std::vector<SceneSpec>& specs) {
    if (batch_a.empty())
        throw Error(ErrorKind::input, "compare: empty batch");
    if (batch_a.size() != batch_b.size())
        throw Error(ErrorKind::input, "compare: batch sizes differ (" +
                                          std::to_string(batch_a.size()) + " vs " +
                                          std::to_string(batch_b.size()) + ")");
    if (specs.size() != batch_a.size())
        throw Error(ErrorKind::input, "compare: need one spec per scene");
    std::vector<SceneMissRecord> ra, rb;
    for (std::size_t i = 0; i < batch_a.size(); ++i) {
        ra.push_back(check_scene(batch_a[i], specs[i]));
        rb.push_back(check_scene(batch_b[i], specs[i]));
    }
    CompareReport out;
    out.a = aggregate(ra);
    out.b = aggregate(rb);
    out.main_delta = out.a.main_missing_rate - out.b.main_missing_rate;
    out.paired_delta = out.a.paired_missing_rate - out.b.paired_missing_rate;
    out.n = static_cast<int>(batch_a.size());
    return out;
}

/// Prompt fed to external visual evaluators.
inline std::string prompt_text(const std::string& scene_type) {
    if (scene_type.empty()) throw Error(ErrorKind::input, "prompt_text: empty scene type");
    return "a top-down view of " + scene_type;
}

inline void to_json(json& j, const SceneMissRecord& r) {
    j = json{{"scene_type", r.scene_type},
             {"mains_required", r.mains_required},
             {"mains_missing", r.mains_missing},
             {"pairs_required", r.pairs_required},
             {"pairs_missing", r.pairs_missing},
             {"missing", r.missing}};
}

inline void to_json(json& j, const MissReport& r) {
    j = json{{"n_scenes", r.n_scenes},
             {"mains_required", r.mains_required},
             {"mains_missing", r.mains_missing},
             {"pairs_required", r.pairs_required},
             {"pairs_missing", r.pairs_missing},
             {"main_missing_rate", r.main_missing_rate},
             {"paired_missing_rate", r.paired_missing_rate},
             {"per_scene", r.per_scene}};
}

inline void to_json(json& j, const CompareReport& r) {
    j = json{{"n", r.n},
             {"baseline", r.a},
             {"multi_path", r.b},
             {"main_delta", r.main_delta},
             {"paired_delta", r.paired_delta}};
}

inline std::string summary_table(const MissReport& r) {
    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%6.2f%%", v * 100.0);
        return std::string(buf);
    };
    std::string out;
    out += "scenes: " + std::to_string(r.n_scenes) + "\n";
    out += "main missing   " + std::to_string(r.mains_missing) + "/" +
           std::to_string(r.mains_required) + " (" + pct(r.main_missing_rate) + ")\n";
    out += "paired missing " + std::to_string(r.pairs_missing) + "/" +
           std::to_string(r.pairs_required) + " (" + pct(r.paired_missing_rate) + ")\n";
    for (const auto& rec : r.per_scene)
        for (const auto& m : rec.missing) out += "  " + rec.scene_type + ": missing " + m + "\n";
    return out;
}

inline std::string summary_table(const CompareReport& r) {
    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%6.2f%%", v * 100.0);
        return std::string(buf);
    };
    std::string out;
    out += "metric           baseline   multi-path   delta\n";
    out += "main missing   " + pct(r.a.main_missing_rate) + "    " + pct(r.b.main_missing_rate) +
           "   " + pct(r.main_delta) + "\n";
    out += "paired missing " + pct(r.a.paired_missing_rate) + "    " +
           pct(r.b.paired_missing_rate) + "   " + pct(r.paired_delta) + "\n";
    out += "scenes per side: " + std::to_string(r.n) + "\n";
    return out;
}

inline void to_json(json& j, const SceneSpec& s) {
    json mains = json::array();
    for (const auto& m : s.required_mains) mains.push_back(m);
    json pairs = json::array();
    for (const auto& [a, b] : s.required_pairs) pairs.push_back(json::array({a, b}));
    j = json{{"scene_type", s.scene_type}, {"required_mains", mains}, {"required_pairs", pairs}};
}

inline void from_json(const json& j, SceneSpec& s) {
    s.scene_type = j.at("scene_type").get<std::string>();
    s.required_mains.clear();
    for (const auto& m : j.at("required_mains"))
        s.required_mains.push_back(m.get<std::set<std::string>>());
    s.required_pairs.clear();
    for (const auto& p : j.value("required_pairs", json::array()))
        s.required_pairs.emplace_back(p.at(0).get<std::set<std::string>>(),
                                      p.at(1).get<std::set<std::string>>());
    s.validate();
}

inline std::vector<SceneSpec> load_specs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::input, "specs: cannot open \"" + path.string() + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        json j = json::parse(buf.str());
        return j.at("specs").get<std::vector<SceneSpec>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::input, "specs \"" + path.string() + "\": " + e.what());
    }
}

} // namespace scenegen
