#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "scenegen/catalog.hpp"
#include "scenegen/error.hpp"
#include "scenegen/rulebook.hpp"
#include "scenegen/text.hpp"

namespace scenegen {

enum class QueryKind { categorize, score, children, relation };

inline const char* to_string(QueryKind k) {
    switch (k) {
        case QueryKind::categorize: return "categorize";
        case QueryKind::score: return "score";
        case QueryKind::children: return "children";
        case QueryKind::relation: return "relation";
    }
    return "unknown";
}

inline QueryKind query_kind_from_string(const std::string& s) {
    if (s == "categorize") return QueryKind::categorize;
    if (s == "score") return QueryKind::score;
    if (s == "children") return QueryKind::children;
    if (s == "relation") return QueryKind::relation;
    throw Error(ErrorKind::oracle, "unknown query kind \"" + s + "\"");
}

/// Asset descriptor as oracles see it; no dims or features, just identity.
struct AssetRef {
    std::string id;
    std::string name;
    std::vector<std::string> tags; // sorted
    std::string category_hint;

    static AssetRef from(const Asset& a) {
        return AssetRef{a.id, a.name, {a.tags.begin(), a.tags.end()}, a.category_hint};
    }

    friend bool operator==(const AssetRef&, const AssetRef&) = default;
};

struct CategoryRef {
    std::string name;
    std::string profile;

    friend bool operator==(const CategoryRef&, const CategoryRef&) = default;
};

struct CategorizeQuery {
    AssetRef asset;
    std::vector<CategoryRef> categories;
};

/// Membership scoring (asset + category) or free prompt scoring (prompt,
/// optionally with rendered views) — the latter serves the remote evaluator.
struct ScoreQuery {
    std::optional<AssetRef> asset;
    std::optional<CategoryRef> category;
    std::string prompt;
    std::vector<std::string> views;
};

struct ChildrenQuery {
    AssetRef parent;
    std::vector<AssetRef> candidates;
};

struct RelationQuery {
    AssetRef parent;
    AssetRef child;
    std::string relation; // side | orientation | distance | support
};

using QueryPayload = std::variant<CategorizeQuery, ScoreQuery, ChildrenQuery, RelationQuery>;

struct OracleQuery {
    std::string scene_type;
    std::string budget_id; // correlates retries in logs
    QueryPayload payload;

    QueryKind kind() const {
        return static_cast<QueryKind>(payload.index());
    }
};

static_assert(std::variant_size_v<QueryPayload> == 4);

inline void validate_query(const OracleQuery& q) {
    switch (q.kind()) {
        case QueryKind::categorize:
            if (std::get<CategorizeQuery>(q.payload).categories.empty())
                throw Error(ErrorKind::oracle, "categorize query without categories");
            break;
        case QueryKind::score: {
            const auto& s = std::get<ScoreQuery>(q.payload);
            if (s.asset.has_value() != s.category.has_value())
                throw Error(ErrorKind::oracle, "score query needs both asset and category");
            if (!s.asset && s.prompt.empty())
                throw Error(ErrorKind::oracle, "score query needs asset+category or a prompt");
            break;
        }
        case QueryKind::children:
            break;
        case QueryKind::relation: {
            const auto& r = std::get<RelationQuery>(q.payload).relation;
            if (r != "side" && r != "orientation" && r != "distance" && r != "support")
                throw Error(ErrorKind::oracle, "unknown relation \"" + r + "\"");
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Wire schema (shared by the remote client, the scripted stub, and any real
// model-backed service). Request: {kind, scene_type, budget_id, payload,
// instructions}. Response: {"answer": {...}} with a kind-specific block.
// ---------------------------------------------------------------------------

inline void to_json(json& j, const AssetRef& a) {
    j = json{{"id", a.id}, {"name", a.name}, {"tags", a.tags}, {"category_hint", a.category_hint}};
}

inline void from_json(const json& j, AssetRef& a) {
    a.id = j.at("id").get<std::string>();
    a.name = j.at("name").get<std::string>();
    a.tags = j.at("tags").get<std::vector<std::string>>();
    a.category_hint = j.at("category_hint").get<std::string>();
}

inline void to_json(json& j, const CategoryRef& c) {
    j = json{{"name", c.name}, {"profile", c.profile}};
}

inline void from_json(const json& j, CategoryRef& c) {
    c.name = j.at("name").get<std::string>();
    c.profile = j.at("profile").get<std::string>();
}

inline json payload_to_wire(const QueryPayload& p) {
    json j;
    std::visit(
        [&](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, CategorizeQuery>) {
                j["asset"] = q.asset;
                j["categories"] = q.categories;
            } else if constexpr (std::is_same_v<T, ScoreQuery>) {
                if (q.asset) j["asset"] = *q.asset;
                if (q.category) j["category"] = *q.category;
                if (!q.prompt.empty()) j["prompt"] = q.prompt;
                if (!q.views.empty()) j["views"] = q.views;
            } else if constexpr (std::is_same_v<T, ChildrenQuery>) {
                j["parent"] = q.parent;
                j["candidates"] = q.candidates;
            } else {
                j["parent"] = q.parent;
                j["child"] = q.child;
                j["relation"] = q.relation;
            }
        },
        p);
    return j;
}

inline json wire_request(const OracleQuery& q, const std::string& instructions = "") {
    json j;
    j["kind"] = to_string(q.kind());
    j["scene_type"] = q.scene_type;
    j["budget_id"] = q.budget_id;
    j["payload"] = payload_to_wire(q.payload);
    j["instructions"] = instructions;
    return j;
}

inline OracleQuery query_from_wire(const json& j) {
    OracleQuery q;
    q.scene_type = j.at("scene_type").get<std::string>();
    q.budget_id = j.value("budget_id", std::string{});
    const json& p = j.at("payload");
    switch (query_kind_from_string(j.at("kind").get<std::string>())) {
        case QueryKind::categorize: {
            CategorizeQuery c;
            c.asset = p.at("asset").get<AssetRef>();
            c.categories = p.at("categories").get<std::vector<CategoryRef>>();
            q.payload = std::move(c);
            break;
        }
        case QueryKind::score: {
            ScoreQuery s;
            if (p.contains("asset")) s.asset = p.at("asset").get<AssetRef>();
            if (p.contains("category")) s.category = p.at("category").get<CategoryRef>();
            s.prompt = p.value("prompt", std::string{});
            s.views = p.value("views", std::vector<std::string>{});
            q.payload = std::move(s);
            break;
        }
        case QueryKind::children: {
            ChildrenQuery c;
            c.parent = p.at("parent").get<AssetRef>();
            c.candidates = p.at("candidates").get<std::vector<AssetRef>>();
            q.payload = std::move(c);
            break;
        }
        case QueryKind::relation: {
            RelationQuery r;
            r.parent = p.at("parent").get<AssetRef>();
            r.child = p.at("child").get<AssetRef>();
            r.relation = p.at("relation").get<std::string>();
            q.payload = std::move(r);
            break;
        }
    }
    validate_query(q);
    return q;
}

inline bool answer_matches_kind(QueryKind kind, const json& answer) {
    if (!answer.is_object()) return false;
    switch (kind) {
        case QueryKind::categorize:
            return answer.contains("category") && answer.at("category").is_string();
        case QueryKind::score:
            return answer.contains("score") && answer.at("score").is_number();
        case QueryKind::children: {
            if (!answer.contains("children") || !answer.at("children").is_array()) return false;
            for (const auto& c : answer.at("children"))
                if (!c.is_string()) return false;
            return true;
        }
        case QueryKind::relation:
            return answer.contains("value");
    }
    return false;
}

struct OracleReply {
    enum class Source { rule, remote };

    QueryKind kind{};
    json answer;     // kind-specific block, e.g. {"category": "main"}
    std::string raw; // transcript
    double latency_ms = 0.0;
    Source source = Source::rule;

    std::string category() const { return field("category").get<std::string>(); }
    double score() const { return field("score").get<double>(); }
    std::vector<std::string> children() const {
        return field("children").get<std::vector<std::string>>();
    }
    json relation_value() const { return field("value"); }

private:
    const json& field(const char* name) const {
        if (!answer.is_object() || !answer.contains(name))
            throw Error(ErrorKind::oracle,
                        std::string("oracle reply missing \"") + name + "\": " + answer.dump());
        return answer.at(name);
    }
};

inline const char* to_string(OracleReply::Source s) {
    return s == OracleReply::Source::rule ? "rule" : "remote";
}

// ---------------------------------------------------------------------------
// DecisionOracle: the single entry point behind every "query the LLM" step.
// ---------------------------------------------------------------------------

class DecisionOracle {
public:
    virtual ~DecisionOracle() = default;

    OracleReply ask(const OracleQuery& q) {
        validate_query(q);
        if (q.kind() == QueryKind::children &&
            std::get<ChildrenQuery>(q.payload).candidates.empty()) {
            OracleReply r;
            r.kind = QueryKind::children;
            r.answer = json{{"children", json::array()}};
            r.raw = "short-circuit: empty candidate list";
            r.source = source();
            return r;
        }
        calls_.fetch_add(1, std::memory_order_relaxed);
        return do_ask(q);
    }

    std::uint64_t call_count() const { return calls_.load(std::memory_order_relaxed); }

protected:
    virtual OracleReply do_ask(const OracleQuery& q) = 0;
    virtual OracleReply::Source source() const = 0;

private:
    std::atomic<std::uint64_t> calls_{0};
};

/// Deterministic oracle answering from a RuleBook. Pure function of
/// (query, rulebook, seed); uncovered relation keys get a seeded pick and are
/// counted as fallbacks.
class RuleOracle : public DecisionOracle {
public:
    RuleOracle(RuleBook book, std::uint64_t seed = 0) : book_(std::move(book)), seed_(seed) {}

    const RuleBook& book() const { return book_; }
    std::uint64_t fallback_count() const { return fallbacks_.load(std::memory_order_relaxed); }

    double membership_score(const AssetRef& a, const CategoryRef& c,
                            const std::string& scene) const {
        if (!a.category_hint.empty()) return a.category_hint == c.name ? 1.0 : 0.0;
        if (c.name == "main") {
            for (const auto& t : a.tags)
                if (book_.main_tag(scene, t)) return 1.0;
        } else if (c.name == "paired") {
            for (const auto& t : a.tags)
                if (book_.pair_member(scene, t)) return 1.0;
        }
        if (auto it = book_.default_scores.find(c.name); it != book_.default_scores.end())
            return it->second;
        // user-defined category: lexical overlap with its profile
        std::set<std::string> asset_tokens;
        for (const auto& t : a.tags)
            for (auto& tok : text::tokenize(t)) asset_tokens.insert(std::move(tok));
        for (auto& tok : text::tokenize(a.name)) asset_tokens.insert(std::move(tok));
        return text::jaccard(asset_tokens, text::token_set(c.profile));
    }

protected:
    OracleReply::Source source() const override { return OracleReply::Source::rule; }

    OracleReply do_ask(const OracleQuery& q) override {
        OracleReply r;
        r.kind = q.kind();
        r.source = OracleReply::Source::rule;
        std::visit([&](const auto& p) { answer(q, p, r); }, q.payload);
        return r;
    }

private:
    void answer(const OracleQuery& q, const CategorizeQuery& c, OracleReply& r) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < c.categories.size(); ++i) {
            double s = membership_score(c.asset, c.categories[i], q.scene_type);
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        r.answer = json{{"category", c.categories[best].name}};
        r.raw = "rule:categorize " + c.asset.id + " -> " + c.categories[best].name;
    }

    void answer(const OracleQuery& q, const ScoreQuery& s, OracleReply& r) {
        double v = 0.0;
        if (s.asset) {
            v = membership_score(*s.asset, *s.category, q.scene_type);
        } else {
            // prompt scoring has no rule table; neutral fixed value
            v = 0.5;
        }
        r.answer = json{{"score", v}};
        r.raw = "rule:score -> " + text::format_double(v);
    }

    void answer(const OracleQuery& q, const ChildrenQuery& c, OracleReply& r) {
        std::vector<std::string> ids;
        for (const auto& cand : c.candidates)
            if (is_child(c.parent, cand, q.scene_type)) ids.push_back(cand.id);
        r.answer = json{{"children", ids}};
        r.raw = "rule:children of " + c.parent.id + " -> " + std::to_string(ids.size());
    }

    void answer(const OracleQuery& q, const RelationQuery& rel, OracleReply& r) {
        json value;
        const RelationBundle* entry = lookup(rel.parent, rel.child);
        RelationBundle bundle;
        if (entry) {
            bundle = *entry;
        } else {
            bundle = book_.relation_default;
            std::uint64_t h = text::splitmix64(
                seed_ ^ text::fnv1a(q.scene_type + "|" + rel.parent.id + "|" + rel.child.id +
                                    "|" + rel.relation));
            bundle.side = (h & 1) ? Side::left : Side::right;
            bundle.orientation = static_cast<int>((h >> 8) % 8) * 45;
            fallbacks_.fetch_add(1, std::memory_order_relaxed);
        }
        if (rel.relation == "side") value = to_string(bundle.side);
        else if (rel.relation == "orientation") value = bundle.orientation;
        else if (rel.relation == "distance") value = to_string(bundle.distance);
        else value = bundle.support;
        r.answer = json{{"value", value}};
        r.raw = "rule:relation " + rel.relation + "(" + rel.parent.id + ", " + rel.child.id +
                ") -> " + value.dump() + (entry ? "" : " [fallback]");
    }

    const RelationBundle* lookup(const AssetRef& parent, const AssetRef& child) const {
        for (const auto& pt : parent.tags)
            for (const auto& ct : child.tags)
                if (auto it = book_.relations.find({pt, ct}); it != book_.relations.end())
                    return &it->second;
        return nullptr;
    }

    bool is_child(const AssetRef& parent, const AssetRef& cand, const std::string& scene) const {
        auto sit = book_.scenes.find(scene);
        for (const auto& pt : parent.tags) {
            for (const auto& ct : cand.tags) {
                if (sit != book_.scenes.end()) {
                    for (const auto& [a, b] : sit->second.pairs)
                        if (a == pt && b == ct) return true;
                }
                if (book_.relations.count({pt, ct})) return true;
            }
        }
        return false;
    }

    RuleBook book_;
    std::uint64_t seed_;
    std::atomic<std::uint64_t> fallbacks_{0};
};

} // namespace scenegen
