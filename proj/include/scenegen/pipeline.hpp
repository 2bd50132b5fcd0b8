#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/catalog.hpp"
#include "scenegen/error.hpp"
#include "scenegen/evalkit.hpp"
#include "scenegen/layout.hpp"
#include "scenegen/oracle.hpp"
#include "scenegen/organizer.hpp"
#include "scenegen/remote_oracle.hpp"
#include "scenegen/request.hpp"
#include "scenegen/retriever.hpp"
#include "scenegen/rulebook.hpp"
#include "scenegen/splitter.hpp"

namespace scenegen {

/// Everything the CLI reads from one self-describing config file; flags
/// override individual fields. Relative paths resolve against the config
/// file's directory.
struct PipelineConfig {
    std::filesystem::path catalog_path = "data/catalog_fixture.txt";
    std::filesystem::path rulebook_path = "data/rulebook.json";
    std::filesystem::path prompts_dir = "data/prompts";
    RetrievalConfig retrieval;
    double room_width = 6.0;
    double room_depth = 6.0;
    DistanceMap distances;
    OrganizeLimits limits;
    CategorySet categories = CategorySet::standard();
    std::string oracle = "rule";
    RemoteOracleConfig remote;

    static PipelineConfig defaults() {
        PipelineConfig c;
        c.retrieval.k_per_path = {{"main", 2}, {"paired", 2}, {"other", 3}};
        c.retrieval.tau = 0.2;
        return c;
    }

    static PipelineConfig load(const std::filesystem::path& file) {
        std::ifstream in(file);
        if (!in) throw Error(ErrorKind::input, "config: cannot open \"" + file.string() + "\"");
        std::stringstream buf;
        buf << in.rdbuf();
        json j;
        try {
            j = json::parse(buf.str());
        } catch (const json::exception& e) {
            throw Error(ErrorKind::input, "config \"" + file.string() + "\": " + e.what());
        }
        PipelineConfig c = defaults();
        auto base = file.parent_path();
        auto path_of = [&](const std::string& key, std::filesystem::path fallback) {
            if (!j.contains(key)) return fallback;
            std::filesystem::path p = j.at(key).get<std::string>();
            return p.is_absolute() ? p : base / p;
        };
        c.catalog_path = path_of("catalog", base / c.catalog_path.filename());
        c.rulebook_path = path_of("rulebook", base / c.rulebook_path.filename());
        c.prompts_dir = path_of("prompts_dir", base / "prompts");
        if (j.contains("tau")) c.retrieval.tau = j.at("tau").get<double>();
        if (j.contains("k_per_path"))
            c.retrieval.k_per_path = j.at("k_per_path").get<std::map<std::string, int>>();
        if (j.contains("similarity")) {
            c.retrieval.weights.lexical = j.at("similarity").value("lexical", 1.0);
            c.retrieval.weights.feature = j.at("similarity").value("feature", 0.0);
        }
        if (j.contains("room")) {
            c.room_width = j.at("room").value("width", 6.0);
            c.room_depth = j.at("room").value("depth", 6.0);
        }
        if (j.contains("distances")) {
            const auto& d = j.at("distances");
            c.distances.near_m = d.value("near", 0.5);
            c.distances.medium_m = d.value("medium", 1.5);
            c.distances.far_m = d.value("far", 3.0);
            c.distances.tolerance = d.value("tolerance", 0.25);
        }
        if (j.contains("limits")) {
            const auto& l = j.at("limits");
            c.limits.max_depth = l.value("max_depth", 3);
            c.limits.max_children = l.value("max_children", 6);
            c.limits.max_rounds = l.value("max_rounds", 4);
        }
        if (j.contains("categories"))
            c.categories.categories = j.at("categories").get<std::vector<Category>>();
        c.categories.validate();
        c.oracle = j.value("oracle", std::string{"rule"});
        if (j.contains("remote")) {
            const auto& r = j.at("remote");
            c.remote.host = r.value("host", std::string{"127.0.0.1"});
            c.remote.port = r.value("port", 0);
            c.remote.path = r.value("path", std::string{"/oracle"});
            c.remote.token_env = r.value("token_env", std::string{"SCENEGEN_ORACLE_TOKEN"});
            c.remote.timeout_s = r.value("timeout_s", 30);
        }
        return c;
    }

    SceneRequest make_request(const std::string& scene_type, std::uint64_t seed) const {
        SceneRequest r;
        r.scene_type = scene_type;
        r.room_width = room_width;
        r.room_depth = room_depth;
        r.seed = seed;
        r.retrieval = retrieval;
        r.retrieval.seed = seed;
        r.oracle = oracle;
        return r;
    }
};

inline std::unique_ptr<DecisionOracle> make_oracle(const PipelineConfig& config,
                                                   const RuleBook& book, std::uint64_t seed) {
    if (config.oracle == "rule")
        return std::make_unique<RuleOracle>(book, seed);
    if (config.oracle == "remote")
        return std::make_unique<RemoteOracle>(config.remote,
                                              PromptLibrary::load_dir(config.prompts_dir));
    throw Error(ErrorKind::input, "unknown oracle \"" + config.oracle + "\"");
}

struct PipelineResult {
    KnowledgePaths paths;
    RetrievedSet retrieved; // after access filter
    LayoutTree tree;
    PlacedScene scene;
    std::vector<std::pair<std::string, double>> timings_ms;
};

/// split -> retrieve -> access_filter -> organize -> place. The scene's audit
/// records rejected items, oracle fallbacks, and dropped placements. Passing
/// `preset_paths` skips the splitting stage and consumes an offline partition
/// instead.
inline PipelineResult run_pipeline(const Catalog& catalog, DecisionOracle& oracle,
                                   const SceneRequest& request, const PipelineConfig& config,
                                   const KnowledgePaths* preset_paths = nullptr) {
    PipelineResult out;
    AuditLog audit;
    using clock = std::chrono::steady_clock;
    auto timed = [&](const char* stage, auto&& fn) {
        auto t0 = clock::now();
        fn();
        out.timings_ms.emplace_back(
            stage, std::chrono::duration<double, std::milli>(clock::now() - t0).count());
    };

    RetrievedSet raw;
    if (preset_paths) {
        timed("split", [&] { out.paths = *preset_paths; });
        audit.note("split: using preset partition (" + std::to_string(out.paths.total()) +
                   " assets)");
    } else {
        timed("split",
              [&] { out.paths = split(catalog, config.categories, request.scene_type, oracle); });
    }
    timed("retrieve", [&] { raw = retrieve(out.paths, catalog, request, request.retrieval); });
    timed("access_filter", [&] { out.retrieved = access_filter(raw, request.retrieval); });
    for (const auto& rej : out.retrieved.rejected)
        audit.note("rejected " + rej.id + " (" + rej.category + "): " + rej.reason +
                   " score=" + text::format_double(rej.score));
    timed("organize", [&] {
        out.tree = organize(out.retrieved, catalog, request.scene_type, oracle, config.limits,
                            &audit);
    });
    timed("place", [&] {
        out.scene = place(out.tree, catalog, Room{request.room_width, request.room_depth},
                          request.seed, config.distances);
    });
    out.scene.request = request;
    audit.merge(out.scene.audit);
    out.scene.audit = std::move(audit);
    return out;
}

/// A scene that failed before layout (e.g. no root retrieved); evaluates as
/// missing everything it should have had.
inline PlacedScene failed_scene(const SceneRequest& request, const std::string& note) {
    PlacedScene scene;
    scene.room = {request.room_width, request.room_depth};
    scene.tree.scene_type = request.scene_type;
    scene.request = request;
    scene.audit.note(note);
    return scene;
}

struct BenchResult {
    CompareReport report;
    std::vector<PlacedScene> baseline;
    std::vector<PlacedScene> multi_path;
    std::vector<SceneSpec> specs; // one per scene, parallel to the batches
};

/// Generates matched batches (same seeds) in baseline and multi-path mode and
/// compares their miss rates.
inline BenchResult run_bench(const Catalog& catalog, const RuleBook& book,
                             const std::vector<SceneSpec>& specs, int n,
                             const PipelineConfig& config, std::uint64_t base_seed = 1) {
    if (n < 1) throw Error(ErrorKind::input, "bench: n must be >= 1");
    if (specs.empty()) throw Error(ErrorKind::input, "bench: no scene specs");
    BenchResult out;
    for (const auto& spec : specs) {
        for (int i = 0; i < n; ++i) {
            std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
            for (bool baseline : {true, false}) {
                SceneRequest req = config.make_request(spec.scene_type, seed);
                req.retrieval.baseline_mode = baseline;
                auto oracle = make_oracle(config, book, seed);
                PlacedScene scene;
                try {
                    scene = run_pipeline(catalog, *oracle, req, config).scene;
                } catch (const Error& e) {
                    if (e.code() != "no-root") throw;
                    scene = failed_scene(req, std::string("no-root: ") + e.what());
                }
                (baseline ? out.baseline : out.multi_path).push_back(std::move(scene));
            }
            out.specs.push_back(spec);
        }
    }
    out.report = compare(out.baseline, out.multi_path, out.specs);
    return out;
}

} // namespace scenegen
