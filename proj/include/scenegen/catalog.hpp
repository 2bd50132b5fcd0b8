#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/error.hpp"
#include "scenegen/text.hpp"

namespace scenegen {

using json = nlohmann::ordered_json;

struct Dims {
    double w = 0.0;
    double d = 0.0;
    double h = 0.0;

    friend bool operator==(const Dims&, const Dims&) = default;
};

/// One catalog entry. Tags are lowercase tokens; `feature`, when present, is
/// unit-normalized and shares the catalog-wide dimensionality.
struct Asset {
    std::string id;
    std::string name;
    std::set<std::string> tags;
    Dims dims;
    std::optional<std::vector<double>> feature;
    std::string category_hint; // empty = none

    // tags plus name tokens; multi-word tags contribute each word
    std::set<std::string> token_set() const {
        std::set<std::string> out;
        for (const auto& t : tags) {
            for (auto& tok : text::tokenize(t)) out.insert(std::move(tok));
        }
        for (auto& tok : text::tokenize(name)) out.insert(std::move(tok));
        return out;
    }

    friend bool operator==(const Asset&, const Asset&) = default;
};

struct Catalog {
    std::vector<Asset> assets;
    std::optional<std::size_t> feature_dim;
    std::string version = "1";

    const Asset* find(const std::string& id) const {
        for (const auto& a : assets)
            if (a.id == id) return &a;
        return nullptr;
    }

    const Asset& at(const std::string& id) const {
        if (const Asset* a = find(id)) return *a;
        throw Error(ErrorKind::input, "catalog: unknown asset id \"" + id + "\"");
    }

    friend bool operator==(const Catalog&, const Catalog&) = default;
};

namespace detail {

inline double parse_real(const std::string& s, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::input,
                    "catalog line " + std::to_string(line) + ": malformed " + field +
                        " \"" + s + "\"");
    }
}

inline void check_asset(Asset& a, int line, std::optional<std::size_t>& feature_dim) {
    if (a.id.empty())
        throw Error(ErrorKind::input, "catalog line " + std::to_string(line) + ": empty id");
    if (a.dims.w <= 0 || a.dims.d <= 0 || a.dims.h <= 0)
        throw Error(ErrorKind::input,
                    "catalog line " + std::to_string(line) + ": dims must be positive");
    if (a.feature) {
        if (feature_dim && a.feature->size() != *feature_dim)
            throw Error(ErrorKind::input,
                        "catalog line " + std::to_string(line) +
                            ": feature dimensionality " + std::to_string(a.feature->size()) +
                            " != " + std::to_string(*feature_dim));
        if (!feature_dim) feature_dim = a.feature->size();
        double norm2 = 0.0;
        for (double v : *a.feature) norm2 += v * v;
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6)
            throw Error(ErrorKind::input,
                        "catalog line " + std::to_string(line) + ": feature not unit-normalized");
    }
}

} // namespace detail

// Line format: id | name | tags(comma) | w,d,h | category_hint(optional) | feature(optional).
// '#'-prefixed lines are comments; "# version:" and "# feature_dim:" are
// writer-emitted metadata the parser recognizes.
inline Catalog parse_catalog_text(std::string_view body) {
    Catalog cat;
    std::map<std::string, int> seen; // id -> first line
    int line_no = 0;
    for (const auto& raw : text::split(body, '\n')) {
        ++line_no;
        std::string line = text::trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string rest = text::trim(line.substr(1));
            if (rest.rfind("version:", 0) == 0)
                cat.version = text::trim(rest.substr(8));
            else if (rest.rfind("feature_dim:", 0) == 0)
                cat.feature_dim = static_cast<std::size_t>(
                    detail::parse_real(text::trim(rest.substr(12)), line_no, "feature_dim"));
            continue;
        }
        auto fields = text::split(line, '|');
        if (fields.size() < 4 || fields.size() > 6)
            throw Error(ErrorKind::input,
                        "catalog line " + std::to_string(line_no) + ": expected 4-6 fields, got " +
                            std::to_string(fields.size()));
        Asset a;
        a.id = text::trim(fields[0]);
        a.name = text::trim(fields[1]);
        for (const auto& t : text::split(fields[2], ',')) {
            std::string tag = text::to_lower(text::trim(t));
            if (!tag.empty()) a.tags.insert(tag);
        }
        auto dims = text::split(fields[3], ',');
        if (dims.size() != 3)
            throw Error(ErrorKind::input,
                        "catalog line " + std::to_string(line_no) + ": malformed dims \"" +
                            text::trim(fields[3]) + "\"");
        a.dims.w = detail::parse_real(text::trim(dims[0]), line_no, "dims");
        a.dims.d = detail::parse_real(text::trim(dims[1]), line_no, "dims");
        a.dims.h = detail::parse_real(text::trim(dims[2]), line_no, "dims");
        if (fields.size() >= 5) a.category_hint = text::to_lower(text::trim(fields[4]));
        if (fields.size() == 6) {
            std::string f = text::trim(fields[5]);
            if (!f.empty()) {
                std::vector<double> vec;
                for (const auto& v : text::split(f, ','))
                    vec.push_back(detail::parse_real(text::trim(v), line_no, "feature"));
                a.feature = std::move(vec);
            }
        }
        detail::check_asset(a, line_no, cat.feature_dim);
        if (auto it = seen.find(a.id); it != seen.end())
            throw Error(ErrorKind::input, "catalog: duplicate id \"" + a.id + "\" (lines " +
                                              std::to_string(it->second) + " and " +
                                              std::to_string(line_no) + ")");
        seen.emplace(a.id, line_no);
        cat.assets.push_back(std::move(a));
    }
    return cat;
}

inline std::string write_catalog_text(const Catalog& cat) {
    std::ostringstream out;
    out << "# version: " << cat.version << "\n";
    if (cat.feature_dim) out << "# feature_dim: " << *cat.feature_dim << "\n";
    for (const auto& a : cat.assets) {
        out << a.id << " | " << a.name << " | ";
        bool first = true;
        for (const auto& t : a.tags) {
            if (!first) out << ",";
            out << t;
            first = false;
        }
        out << " | " << text::format_double(a.dims.w) << "," << text::format_double(a.dims.d)
            << "," << text::format_double(a.dims.h);
        out << " | " << a.category_hint;
        if (a.feature) {
            out << " | ";
            first = true;
            for (double v : *a.feature) {
                if (!first) out << ",";
                out << text::format_double(v);
                first = false;
            }
        }
        out << "\n";
    }
    return out.str();
}

inline void to_json(json& j, const Asset& a) {
    j = json{{"id", a.id},
             {"name", a.name},
             {"tags", a.tags},
             {"dims", {{"w", a.dims.w}, {"d", a.dims.d}, {"h", a.dims.h}}},
             {"category_hint", a.category_hint}};
    if (a.feature) j["feature"] = *a.feature;
}

inline void from_json(const json& j, Asset& a) {
    a.id = j.at("id").get<std::string>();
    a.name = j.value("name", std::string{});
    a.tags.clear();
    for (const auto& t : j.value("tags", std::vector<std::string>{}))
        a.tags.insert(text::to_lower(t));
    const auto& d = j.at("dims");
    a.dims = {d.at("w").get<double>(), d.at("d").get<double>(), d.at("h").get<double>()};
    a.category_hint = text::to_lower(j.value("category_hint", std::string{}));
    if (j.contains("feature") && !j.at("feature").is_null())
        a.feature = j.at("feature").get<std::vector<double>>();
    else
        a.feature.reset();
}

inline void to_json(json& j, const Catalog& c) {
    j = json{{"version", c.version}, {"assets", c.assets}};
    if (c.feature_dim) j["feature_dim"] = *c.feature_dim;
}

inline Catalog parse_catalog_json(const json& j) {
    Catalog cat;
    cat.version = j.value("version", std::string{"1"});
    if (j.contains("feature_dim") && !j.at("feature_dim").is_null())
        cat.feature_dim = j.at("feature_dim").get<std::size_t>();
    std::map<std::string, int> seen;
    int idx = 0;
    for (const auto& aj : j.at("assets")) {
        ++idx;
        Asset a = aj.get<Asset>();
        detail::check_asset(a, idx, cat.feature_dim);
        if (auto it = seen.find(a.id); it != seen.end())
            throw Error(ErrorKind::input, "catalog: duplicate id \"" + a.id + "\" (entries " +
                                              std::to_string(it->second) + " and " +
                                              std::to_string(idx) + ")");
        seen.emplace(a.id, idx);
        cat.assets.push_back(std::move(a));
    }
    return cat;
}

inline Catalog ingest(const std::filesystem::path& source) {
    std::ifstream in(source);
    if (!in)
        throw Error(ErrorKind::input, "catalog: cannot open \"" + source.string() + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string body = buf.str();
    std::size_t first = body.find_first_not_of(" \t\r\n");
    bool looks_json = source.extension() == ".json" ||
                      (first != std::string::npos && (body[first] == '{' || body[first] == '['));
    try {
        if (looks_json) return parse_catalog_json(json::parse(body));
        return parse_catalog_text(body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::input, "catalog \"" + source.string() + "\": " + e.what());
    } catch (const Error& e) {
        throw Error(e.kind(), source.string() + ": " + e.what(), e.code());
    }
}

// ---------------------------------------------------------------------------
// Similarity scoring
// ---------------------------------------------------------------------------

struct Query {
    std::string text;
    std::optional<std::vector<double>> feature;
};

struct SimilarityWeights {
    double lexical = 1.0;
    double feature = 0.0;

    friend bool operator==(const SimilarityWeights&, const SimilarityWeights&) = default;
};

/// Blend of tag-overlap Jaccard and (when both sides carry vectors) cosine
/// similarity mapped to [0,1]. Lexical-only unless the query has a vector.
inline double similarity(const Asset& a, const Query& q, const SimilarityWeights& w = {}) {
    if (q.text.empty()) throw Error(ErrorKind::input, "similarity: empty query");
    double lex = text::jaccard(text::token_set(q.text), a.token_set());
    if (!q.feature || !a.feature || w.feature <= 0.0) return lex;
    if (q.feature->size() != a.feature->size())
        throw Error(ErrorKind::input, "similarity: feature dimensionality mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.feature->size(); ++i) dot += (*q.feature)[i] * (*a.feature)[i];
    double cos01 = 0.5 * (1.0 + std::clamp(dot, -1.0, 1.0));
    double denom = w.lexical + w.feature;
    if (denom <= 0.0) return 0.0;
    return std::clamp((w.lexical * lex + w.feature * cos01) / denom, 0.0, 1.0);
}

} // namespace scenegen
