// scenegen: generate indoor scenes from a scene-type prompt via multi-path
// retrieval over a partitioned asset catalog, and benchmark the missing-object
// rate against single-corpus retrieval.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenegen/evalkit.hpp"
#include "scenegen/pipeline.hpp"
#include "scenegen/render.hpp"

namespace fs = std::filesystem;
using namespace scenegen;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitOracle = 4;
constexpr int kExitPipeline = 5;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return kExitUsage;
        case ErrorKind::input: return kExitInput;
        case ErrorKind::oracle: return kExitOracle;
        case ErrorKind::pipeline: return kExitPipeline;
    }
    return 1;
}

void write_file(const fs::path& path, const std::string& body) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::input, "cannot write \"" + path.string() + "\"");
    out << body;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open \"" + path.string() + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CommonOpts {
    std::string config_path = "data/config.json";
    std::string catalog_path;
    std::string oracle;
    double tau = -1.0;
    int k_main = 0, k_paired = 0, k_other = 0;

    PipelineConfig resolve() const {
        PipelineConfig c = fs::exists(config_path) ? PipelineConfig::load(config_path)
                                                   : PipelineConfig::defaults();
        if (!catalog_path.empty()) c.catalog_path = catalog_path;
        if (!oracle.empty()) c.oracle = oracle;
        if (tau >= 0.0) c.retrieval.tau = tau;
        if (k_main > 0) c.retrieval.k_per_path["main"] = k_main;
        if (k_paired > 0) c.retrieval.k_per_path["paired"] = k_paired;
        if (k_other > 0) c.retrieval.k_per_path["other"] = k_other;
        return c;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline configuration file");
    cmd->add_option("--catalog", opts.catalog_path, "catalog file (overrides config)");
    cmd->add_option("--oracle", opts.oracle, "decision oracle: rule or remote");
    cmd->add_option("--tau", opts.tau, "selection threshold in [0,1]");
    cmd->add_option("--k-main", opts.k_main, "top-k for the main path");
    cmd->add_option("--k-paired", opts.k_paired, "top-k for the paired path");
    cmd->add_option("--k-other", opts.k_other, "top-k for the other path");
}

void print_timings(const std::vector<std::pair<std::string, double>>& timings) {
    std::cout << "stage timings:";
    for (const auto& [stage, ms] : timings) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %s=%.2fms", stage.c_str(), ms);
        std::cout << buf;
    }
    std::cout << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenegen: multi-path retrieval scene generator"};
    app.require_subcommand(1);

    CommonOpts opts;

    // --- ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "load and validate a catalog file");
    std::string ingest_source, ingest_out;
    ingest_cmd->add_option("source", ingest_source, "catalog file")->required();
    ingest_cmd->add_option("--out", ingest_out, "write normalized JSON catalog");

    // --- split
    auto* split_cmd = app.add_subcommand("split", "partition the catalog into knowledge paths");
    std::string split_scene, split_out;
    split_cmd->add_option("--scene", split_scene, "scene type")->required();
    split_cmd->add_option("--out", split_out, "partition output file");
    add_common(split_cmd, opts);

    // --- generate
    auto* gen_cmd = app.add_subcommand("generate", "run the full pipeline for one scene");
    std::string gen_scene, gen_out = "scene.json", gen_render, gen_partition, gen_dump;
    std::uint64_t gen_seed = 0;
    double gen_rw = 0, gen_rd = 0;
    bool gen_baseline = false;
    gen_cmd->add_option("--scene", gen_scene, "scene type prompt")->required();
    gen_cmd->add_option("--seed", gen_seed, "generation seed");
    gen_cmd->add_option("--out", gen_out, "scene output file");
    gen_cmd->add_option("--render", gen_render, "also write a top-down SVG");
    gen_cmd->add_option("--room-width", gen_rw, "room width in meters");
    gen_cmd->add_option("--room-depth", gen_rd, "room depth in meters");
    gen_cmd->add_flag("--baseline", gen_baseline, "single-corpus retrieval");
    gen_cmd->add_option("--partition", gen_partition,
                        "use an offline partition file instead of splitting per request");
    gen_cmd->add_option("--dump-artifacts", gen_dump,
                        "directory for intermediate artifacts (partition, retrieved, tree)");
    add_common(gen_cmd, opts);

    // --- render
    auto* render_cmd = app.add_subcommand("render", "render a scene file to SVG");
    std::string render_in, render_out = "scene.svg";
    int render_rot = 0;
    render_cmd->add_option("scene", render_in, "scene JSON file")->required();
    render_cmd->add_option("--out", render_out, "SVG output file");
    render_cmd->add_option("--rotation", render_rot, "view rotation: 0, 90, 180 or 270");

    // --- bench
    auto* bench_cmd = app.add_subcommand(
        "bench", "compare baseline vs multi-path missing rates on matched seeds");
    std::string bench_specs, bench_out = "bench_report.json", bench_dump;
    int bench_n = 20;
    std::uint64_t bench_seed = 1;
    bench_cmd->add_option("--specs", bench_specs, "scene specs file")->required();
    bench_cmd->add_option("-n,--scenes", bench_n, "scenes per spec");
    bench_cmd->add_option("--seed", bench_seed, "base seed");
    bench_cmd->add_option("--out", bench_out, "report output file");
    bench_cmd->add_option("--dump-scenes", bench_dump,
                          "directory for per-scene files named by (spec, seed, mode)");
    add_common(bench_cmd, opts);

    // --- evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "miss-rate report for scene files");
    std::string eval_specs, eval_out;
    std::vector<std::string> eval_scenes;
    std::string eval_remote_host;
    int eval_remote_port = 0;
    eval_cmd->add_option("--specs", eval_specs, "scene specs file")->required();
    eval_cmd->add_option("scenes", eval_scenes, "scene JSON files")->required();
    eval_cmd->add_option("--out", eval_out, "report output file");
    eval_cmd->add_option("--remote-host", eval_remote_host,
                         "also score scenes via a remote evaluator");
    eval_cmd->add_option("--remote-port", eval_remote_port, "remote evaluator port");
    add_common(eval_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*ingest_cmd) {
            Catalog cat = ingest(ingest_source);
            std::cout << "catalog ok: " << cat.assets.size() << " assets";
            if (cat.feature_dim) std::cout << ", feature_dim " << *cat.feature_dim;
            std::cout << ", version " << cat.version << "\n";
            if (!ingest_out.empty()) {
                json j = cat;
                write_file(ingest_out, j.dump(2) + "\n");
                std::cout << "wrote " << ingest_out << "\n";
            }
            return 0;
        }

        if (*split_cmd) {
            if (split_scene.empty())
                throw Error(ErrorKind::usage, "split: --scene must be non-empty");
            PipelineConfig config = opts.resolve();
            Catalog cat = ingest(config.catalog_path);
            RuleBook book = load_rulebook(config.rulebook_path);
            auto oracle = make_oracle(config, book, 0);
            KnowledgePaths paths = split(cat, config.categories, split_scene, *oracle);
            json j = paths;
            std::string body = j.dump(2) + "\n";
            if (!split_out.empty()) {
                write_file(split_out, body);
                std::cout << "wrote " << split_out << "\n";
            } else {
                std::cout << body;
            }
            return 0;
        }

        if (*gen_cmd) {
            if (gen_scene.empty())
                throw Error(ErrorKind::usage, "generate: --scene must be non-empty");
            PipelineConfig config = opts.resolve();
            Catalog cat = ingest(config.catalog_path);
            RuleBook book = load_rulebook(config.rulebook_path);
            SceneRequest req = config.make_request(gen_scene, gen_seed);
            if (gen_rw > 0) req.room_width = gen_rw;
            if (gen_rd > 0) req.room_depth = gen_rd;
            req.retrieval.baseline_mode = gen_baseline;
            auto oracle = make_oracle(config, book, gen_seed);
            std::optional<KnowledgePaths> preset;
            if (!gen_partition.empty())
                preset = json::parse(read_file(gen_partition)).get<KnowledgePaths>();
            PipelineResult result;
            try {
                result = run_pipeline(cat, *oracle, req, config, preset ? &*preset : nullptr);
            } catch (const Error& e) {
                if (e.code() == "no-root") {
                    PlacedScene failed = failed_scene(req, std::string("no-root: ") + e.what());
                    json j = failed;
                    write_file(gen_out, j.dump(2) + "\n");
                    std::cerr << "reply-missing failure (no main object retrieved); audit written to "
                              << gen_out << "\n";
                }
                throw;
            }
            json j = result.scene;
            write_file(gen_out, j.dump(2) + "\n");
            print_timings(result.timings_ms);
            std::cout << "placed " << result.scene.placements.size() << " of "
                      << result.tree.nodes.size() << " objects; wrote " << gen_out << "\n";
            if (!gen_render.empty()) {
                write_file(gen_render, render_svg(result.scene));
                std::cout << "wrote " << gen_render << "\n";
            }
            if (!gen_dump.empty()) {
                fs::path dir = gen_dump;
                write_file(dir / "partition.json", json(result.paths).dump(2) + "\n");
                write_file(dir / "retrieved.json", json(result.retrieved).dump(2) + "\n");
                write_file(dir / "tree.json", json(result.tree).dump(2) + "\n");
                std::cout << "wrote stage artifacts to " << dir.string() << "\n";
            }
            return 0;
        }

        if (*render_cmd) {
            PlacedScene scene = json::parse(read_file(render_in)).get<PlacedScene>();
            write_file(render_out, render_svg(scene, render_rot));
            std::cout << "wrote " << render_out << "\n";
            return 0;
        }

        if (*bench_cmd) {
            PipelineConfig config = opts.resolve();
            Catalog cat = ingest(config.catalog_path);
            RuleBook book = load_rulebook(config.rulebook_path);
            std::vector<SceneSpec> specs = load_specs(bench_specs);
            BenchResult result = run_bench(cat, book, specs, bench_n, config, bench_seed);
            std::cout << summary_table(result.report);
            json j = result.report;
            write_file(bench_out, j.dump(2) + "\n");
            std::cout << "wrote " << bench_out << "\n";
            if (!bench_dump.empty()) {
                fs::path dir = bench_dump;
                auto slug = [](std::string s) {
                    for (auto& c : s)
                        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
                    return s;
                };
                auto dump = [&](const std::vector<PlacedScene>& batch, const char* mode) {
                    for (const auto& scene : batch)
                        write_file(dir / (slug(scene.request.scene_type) + "_" +
                                          std::to_string(scene.request.seed) + "_" + mode +
                                          ".json"),
                                   json(scene).dump(2) + "\n");
                };
                dump(result.baseline, "baseline");
                dump(result.multi_path, "multi");
                std::cout << "wrote per-scene files to " << dir.string() << "\n";
            }
            return 0;
        }

        if (*eval_cmd) {
            std::vector<SceneSpec> specs = load_specs(eval_specs);
            std::vector<SceneMissRecord> records;
            std::vector<PlacedScene> scenes;
            for (const auto& path : eval_scenes)
                scenes.push_back(json::parse(read_file(path)).get<PlacedScene>());
            for (const auto& scene : scenes) {
                const SceneSpec* spec = nullptr;
                for (const auto& s : specs)
                    if (s.scene_type == scene.request.scene_type ||
                        s.scene_type == scene.tree.scene_type)
                        spec = &s;
                if (!spec)
                    throw Error(ErrorKind::input, "evaluate: no spec for scene type \"" +
                                                      scene.request.scene_type + "\"");
                records.push_back(check_scene(scene, *spec));
            }
            MissReport report = aggregate(records);
            std::cout << summary_table(report);
            if (!eval_out.empty()) {
                json j = report;
                write_file(eval_out, j.dump(2) + "\n");
                std::cout << "wrote " << eval_out << "\n";
            }

            if (!eval_remote_host.empty()) {
                // external-evaluator client: four rotated views per scene, scored
                // over the oracle wire protocol (kind=score)
                RemoteOracleConfig rc;
                rc.host = eval_remote_host;
                rc.port = eval_remote_port;
                RemoteOracle evaluator(rc);
                for (const auto& scene : scenes) {
                    OracleQuery q;
                    q.scene_type = scene.request.scene_type;
                    q.budget_id = "evaluate/" + scene.request.scene_type;
                    ScoreQuery sq;
                    sq.prompt = prompt_text(scene.request.scene_type);
                    for (int rot : {0, 90, 180, 270}) sq.views.push_back(render_svg(scene, rot));
                    q.payload = std::move(sq);
                    std::cout << "remote score " << scene.request.scene_type << ": "
                              << evaluator.ask(q).score() << "\n";
                }
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitUsage;
}
