#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/catalog.hpp"
#include "scenegen/error.hpp"
#include "scenegen/request.hpp"
#include "scenegen/splitter.hpp"

namespace scenegen {

struct ScoredItem {
    std::string id;
    double score = 0.0;

    friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

struct RejectedItem {
    std::string id;
    double score = 0.0;
    std::string reason;   // "below-threshold" | "duplicate"
    std::string category; // category it was rejected from

    friend bool operator==(const RejectedItem&, const RejectedItem&) = default;
};

/// Per-category candidates, score-descending (ties by id ascending), plus the
/// audit trail of rejections.
struct RetrievedSet {
    std::vector<std::string> category_order;
    std::map<std::string, std::vector<ScoredItem>> accepted;
    std::vector<RejectedItem> rejected;

    std::size_t accepted_count() const {
        std::size_t n = 0;
        for (const auto& [_, items] : accepted) n += items.size();
        return n;
    }

    friend bool operator==(const RetrievedSet&, const RetrievedSet&) = default;
};

namespace detail {

inline void sort_items(std::vector<ScoredItem>& items) {
    std::sort(items.begin(), items.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

} // namespace detail

/// Top-k retrieval per knowledge path; in baseline mode, top-(sum k) over the
/// whole catalog with results binned under their partition category.
inline RetrievedSet retrieve(const KnowledgePaths& paths, const Catalog& catalog,
                             const SceneRequest& request, const RetrievalConfig& config) {
    if (request.scene_type.empty())
        throw Error(ErrorKind::input, "retrieve: empty request prompt");
    if (config.tau < 0.0 || config.tau > 1.0)
        throw Error(ErrorKind::input, "retrieve: tau must be in [0,1]");
    if (paths.total() != catalog.assets.size())
        throw Error(ErrorKind::input, "retrieve: paths do not partition the catalog (" +
                                          std::to_string(paths.total()) + " of " +
                                          std::to_string(catalog.assets.size()) + " assets)");
    for (const auto& [cat, k] : config.k_per_path) {
        if (!paths.partition.count(cat))
            throw Error(ErrorKind::input, "retrieve: unknown category \"" + cat + "\" in config");
        if (k < 1)
            throw Error(ErrorKind::input, "retrieve: k for \"" + cat + "\" must be >= 1");
    }
    for (const auto& cat : paths.category_order)
        if (!config.k_per_path.count(cat))
            throw Error(ErrorKind::input, "retrieve: no k configured for category \"" + cat + "\"");

    Query prompt = request.prompt();
    RetrievedSet out;
    out.category_order = paths.category_order;
    for (const auto& cat : paths.category_order) out.accepted[cat];

    if (config.baseline_mode) {
        std::vector<ScoredItem> all;
        all.reserve(catalog.assets.size());
        for (const auto& a : catalog.assets)
            all.push_back({a.id, similarity(a, prompt, config.weights)});
        detail::sort_items(all);
        std::size_t keep = std::min<std::size_t>(all.size(), config.total_k());
        for (std::size_t i = 0; i < keep; ++i)
            out.accepted[paths.category_of(all[i].id)].push_back(all[i]);
        for (auto& [_, items] : out.accepted) detail::sort_items(items);
        return out;
    }

    for (const auto& cat : paths.category_order) {
        std::vector<ScoredItem> items;
        for (const auto& id : paths.partition.at(cat))
            items.push_back({id, similarity(catalog.at(id), prompt, config.weights)});
        detail::sort_items(items);
        std::size_t keep = std::min<std::size_t>(items.size(), config.k_per_path.at(cat));
        items.resize(keep);
        out.accepted[cat] = std::move(items);
    }
    return out;
}

/// Access policy: drop entries scoring below tau (boundary score == tau is
/// accepted) and resolve duplicate ids across categories by score, then by
/// category priority in declared order.
inline RetrievedSet access_filter(const RetrievedSet& retrieved, const RetrievalConfig& config) {
    RetrievedSet out;
    out.category_order = retrieved.category_order;
    out.rejected = retrieved.rejected;

    std::map<std::string, std::size_t> cat_rank;
    for (std::size_t i = 0; i < retrieved.category_order.size(); ++i)
        cat_rank[retrieved.category_order[i]] = i;

    // winner per asset id across categories
    std::map<std::string, std::pair<std::string, double>> best; // id -> (category, score)
    for (const auto& cat : retrieved.category_order) {
        auto it = retrieved.accepted.find(cat);
        if (it == retrieved.accepted.end()) continue;
        for (const auto& item : it->second) {
            auto bit = best.find(item.id);
            if (bit == best.end()) {
                best[item.id] = {cat, item.score};
                continue;
            }
            auto& [bcat, bscore] = bit->second;
            bool wins = item.score > bscore ||
                        (item.score == bscore && cat_rank[cat] < cat_rank[bcat]);
            if (wins) bit->second = {cat, item.score};
        }
    }

    for (const auto& cat : retrieved.category_order) {
        out.accepted[cat];
        auto it = retrieved.accepted.find(cat);
        if (it == retrieved.accepted.end()) continue;
        for (const auto& item : it->second) {
            if (item.score < config.tau) {
                out.rejected.push_back({item.id, item.score, "below-threshold", cat});
                continue;
            }
            const auto& [bcat, bscore] = best.at(item.id);
            if (bcat != cat) {
                out.rejected.push_back({item.id, item.score, "duplicate", cat});
                continue;
            }
            out.accepted[cat].push_back(item);
        }
        detail::sort_items(out.accepted[cat]);
    }
    return out;
}

inline void to_json(json& j, const ScoredItem& s) { j = json{{"id", s.id}, {"score", s.score}}; }

inline void from_json(const json& j, ScoredItem& s) {
    s.id = j.at("id").get<std::string>();
    s.score = j.at("score").get<double>();
}

inline void to_json(json& j, const RejectedItem& r) {
    j = json{{"id", r.id}, {"score", r.score}, {"reason", r.reason}, {"category", r.category}};
}

inline void from_json(const json& j, RejectedItem& r) {
    r.id = j.at("id").get<std::string>();
    r.score = j.at("score").get<double>();
    r.reason = j.at("reason").get<std::string>();
    r.category = j.at("category").get<std::string>();
}

inline void to_json(json& j, const RetrievedSet& r) {
    j = json{{"categories", r.category_order},
             {"accepted", r.accepted},
             {"rejected", r.rejected}};
}

inline void from_json(const json& j, RetrievedSet& r) {
    r.category_order = j.at("categories").get<std::vector<std::string>>();
    r.accepted = j.at("accepted").get<std::map<std::string, std::vector<ScoredItem>>>();
    r.rejected = j.at("rejected").get<std::vector<RejectedItem>>();
}

} // namespace scenegen
