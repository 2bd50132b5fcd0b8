#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenegen/audit.hpp"
#include "scenegen/catalog.hpp"
#include "scenegen/error.hpp"
#include "scenegen/oracle.hpp"
#include "scenegen/relations.hpp"
#include "scenegen/retriever.hpp"

namespace scenegen {

struct OrganizeLimits {
    int max_depth = 3;    // root is depth 0
    int max_children = 6; // per node
    int max_rounds = 4;   // oracle querying rounds

    friend bool operator==(const OrganizeLimits&, const OrganizeLimits&) = default;
};

struct TreeEdge {
    int parent = 0;
    int child = 0;
    RelationBundle relation;

    friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

/// Forest of retrieved objects; roots are the main objects, edges carry the
/// four spatial relations.
struct LayoutTree {
    std::string scene_type;
    std::vector<int> roots;
    std::map<int, std::string> nodes; // node id -> asset id
    std::vector<TreeEdge> edges;

    friend bool operator==(const LayoutTree&, const LayoutTree&) = default;

    std::map<int, int> parent_map() const {
        std::map<int, int> out;
        for (const auto& e : edges) out[e.child] = e.parent;
        return out;
    }

    std::map<int, std::vector<int>> children_map() const {
        std::map<int, std::vector<int>> out;
        for (const auto& e : edges) out[e.parent].push_back(e.child);
        return out;
    }

    int depth_of(int node) const {
        auto parents = parent_map();
        int d = 0;
        while (true) {
            auto it = parents.find(node);
            if (it == parents.end()) return d;
            node = it->second;
            if (++d > static_cast<int>(nodes.size()))
                throw Error(ErrorKind::input, "tree: cycle detected");
        }
    }

    int root_of(int node) const {
        auto parents = parent_map();
        int hops = 0;
        while (true) {
            auto it = parents.find(node);
            if (it == parents.end()) return node;
            node = it->second;
            if (++hops > static_cast<int>(nodes.size()))
                throw Error(ErrorKind::input, "tree: cycle detected");
        }
    }

    const TreeEdge* edge_to(int child) const {
        for (const auto& e : edges)
            if (e.child == child) return &e;
        return nullptr;
    }

    // Throws unless this is a well-formed forest whose roots are exactly the
    // parentless nodes.
    void check_forest() const {
        std::map<int, int> parent_count;
        for (const auto& e : edges) {
            if (!nodes.count(e.parent) || !nodes.count(e.child))
                throw Error(ErrorKind::input, "tree: edge references unknown node");
            ++parent_count[e.child];
        }
        for (const auto& [node, n] : parent_count)
            if (n != 1)
                throw Error(ErrorKind::input,
                            "tree: node " + std::to_string(node) + " has " + std::to_string(n) +
                                " parents");
        std::map<int, bool> is_root;
        for (int r : roots) {
            if (!nodes.count(r)) throw Error(ErrorKind::input, "tree: unknown root");
            if (parent_count.count(r))
                throw Error(ErrorKind::input, "tree: root " + std::to_string(r) + " has a parent");
            if (is_root[r]) throw Error(ErrorKind::input, "tree: duplicate root");
            is_root[r] = true;
        }
        for (const auto& [node, _] : nodes) {
            if (!parent_count.count(node) && !is_root.count(node))
                throw Error(ErrorKind::input,
                            "tree: node " + std::to_string(node) + " is neither root nor child");
            depth_of(node); // cycle check
        }
    }
};

/// Queries the oracle for the four relations of one edge. Unparseable answers
/// are retried, then fall back to fixed defaults (right / facing parent /
/// near / no support).
inline RelationBundle relations_for_edge(const Asset& parent, const Asset& child,
                                         const std::string& scene_type, DecisionOracle& oracle,
                                         AuditLog* audit = nullptr) {
    if (parent.id == child.id)
        throw Error(ErrorKind::input, "relations_for_edge: parent and child must differ (\"" +
                                          parent.id + "\")");
    RelationBundle bundle;
    const AssetRef pref = AssetRef::from(parent);
    const AssetRef cref = AssetRef::from(child);
    static const char* names[4] = {"side", "orientation", "distance", "support"};
    for (const char* name : names) {
        OracleQuery q;
        q.scene_type = scene_type;
        q.budget_id = "rel/" + parent.id + "->" + child.id + "/" + name;
        q.payload = RelationQuery{pref, cref, name};
        bool ok = false;
        std::string last;
        for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
            try {
                json v = oracle.ask(q).relation_value();
                std::string n(name);
                if (n == "side") bundle.side = side_from_string(v.get<std::string>());
                else if (n == "distance") bundle.distance = distance_from_string(v.get<std::string>());
                else if (n == "support") bundle.support = v.get<bool>();
                else {
                    int deg = v.get<int>();
                    if (deg % 45 != 0 || deg < 0 || deg >= 360)
                        throw Error(ErrorKind::oracle,
                                    "orientation " + std::to_string(deg) + " not a 45-degree step");
                    bundle.orientation = deg;
                }
                ok = true;
            } catch (const std::exception& e) {
                last = e.what();
            }
        }
        if (!ok) {
            // fixed defaults, not rulebook defaults
            std::string n(name);
            if (n == "side") bundle.side = Side::right;
            else if (n == "orientation") bundle.orientation = 180;
            else if (n == "distance") bundle.distance = Distance::near;
            else bundle.support = false;
            if (audit)
                audit->note("relation-fallback " + q.budget_id + ": " + last);
        }
    }
    if (bundle.support && bundle.distance == Distance::far) {
        bundle.distance = Distance::near;
        if (audit)
            audit->note("relation-clamp " + parent.id + "->" + child.id +
                        ": support forbids far, using near");
    }
    validate(bundle);
    return bundle;
}

/// Builds one tree per retrieved main object, assigning the remaining assets
/// by iterative child queries; whatever the rounds leave unassigned attaches
/// to the smallest tree so the forest stays total.
inline LayoutTree organize(const RetrievedSet& retrieved, const Catalog& catalog,
                           const std::string& scene_type, DecisionOracle& oracle,
                           const OrganizeLimits& limits = {}, AuditLog* audit = nullptr) {
    if (limits.max_depth < 1 || limits.max_children < 1 || limits.max_rounds < 1)
        throw Error(ErrorKind::input, "organize: caps must be positive");

    std::string root_cat = "main";
    if (std::find(retrieved.category_order.begin(), retrieved.category_order.end(), root_cat) ==
        retrieved.category_order.end()) {
        if (retrieved.category_order.empty())
            throw Error(ErrorKind::input, "organize: retrieved set has no categories");
        root_cat = retrieved.category_order.front();
    }
    auto mit = retrieved.accepted.find(root_cat);
    if (mit == retrieved.accepted.end() || mit->second.empty())
        throw Error(ErrorKind::pipeline,
                    "organize: no main objects retrieved for \"" + scene_type + "\"", "no-root");

    LayoutTree tree;
    tree.scene_type = scene_type;
    std::map<int, int> depth;
    std::map<int, int> child_count;
    int next_id = 0;

    for (const auto& item : mit->second) {
        int id = next_id++;
        tree.nodes[id] = item.id;
        tree.roots.push_back(id);
        depth[id] = 0;
    }

    std::vector<std::string> unassigned;
    for (const auto& cat : retrieved.category_order) {
        if (cat == root_cat) continue;
        auto it = retrieved.accepted.find(cat);
        if (it == retrieved.accepted.end()) continue;
        for (const auto& item : it->second) unassigned.push_back(item.id);
    }

    auto make_ref = [&](int node) { return AssetRef::from(catalog.at(tree.nodes.at(node))); };

    auto attach = [&](int parent, const std::string& asset_id) {
        RelationBundle rel = relations_for_edge(catalog.at(tree.nodes.at(parent)),
                                                catalog.at(asset_id), scene_type, oracle, audit);
        int id = next_id++;
        tree.nodes[id] = asset_id;
        tree.edges.push_back({parent, id, rel});
        depth[id] = depth[parent] + 1;
        ++child_count[parent];
        return id;
    };

    auto open_parents = [&]() {
        std::vector<int> out;
        for (const auto& [node, _] : tree.nodes)
            if (depth[node] < limits.max_depth && child_count[node] < limits.max_children)
                out.push_back(node);
        return out; // node-id order == creation order
    };

    for (int round = 1; round <= limits.max_rounds && !unassigned.empty(); ++round) {
        bool progress = false;
        std::vector<int> open = open_parents();
        if (open.empty()) break;
        for (int parent : open) {
            if (unassigned.empty()) break;
            int slots = limits.max_children - child_count[parent];
            if (slots <= 0) continue;
            OracleQuery q;
            q.scene_type = scene_type;
            q.budget_id = "org/round" + std::to_string(round) + "/node" +
                          std::to_string(parent) + "/children";
            ChildrenQuery cq;
            cq.parent = make_ref(parent);
            for (const auto& id : unassigned) cq.candidates.push_back(AssetRef::from(catalog.at(id)));
            q.payload = std::move(cq);
            std::vector<std::string> picks = oracle.ask(q).children();
            int taken = 0;
            for (const auto& pick : picks) {
                if (taken >= slots) break;
                auto uit = std::find(unassigned.begin(), unassigned.end(), pick);
                if (uit == unassigned.end()) continue; // ignore ids outside the candidate list
                attach(parent, pick);
                unassigned.erase(uit);
                ++taken;
                progress = true;
            }
        }
        if (!progress) break;
    }

    // Orphan policy: leftovers attach to the smallest tree, at the shallowest
    // node that still has capacity; only as a last resort is a cap exceeded.
    auto subtree_nodes = [&](int root) {
        std::vector<int> out{root};
        auto kids = tree.children_map();
        for (std::size_t i = 0; i < out.size(); ++i) {
            auto it = kids.find(out[i]);
            if (it == kids.end()) continue;
            for (int c : it->second) out.push_back(c);
        }
        return out;
    };

    for (const auto& id : unassigned) {
        std::vector<int> order = tree.roots;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return subtree_nodes(a).size() < subtree_nodes(b).size();
        });
        int target = -1;
        for (int root : order) {
            for (int node : subtree_nodes(root)) { // BFS order within the tree
                if (depth[node] < limits.max_depth && child_count[node] < limits.max_children) {
                    target = node;
                    break;
                }
            }
            if (target >= 0) break;
        }
        if (target < 0) {
            target = order.front();
            if (audit) audit->note("organize: caps exceeded attaching " + id);
        }
        attach(target, id);
        if (audit)
            audit->note("organize: orphan " + id + " attached to node " + std::to_string(target));
    }

    tree.check_forest();
    return tree;
}

inline void to_json(json& j, const TreeEdge& e) {
    j = json{{"parent", e.parent}, {"child", e.child}, {"relation", e.relation}};
}

inline void from_json(const json& j, TreeEdge& e) {
    e.parent = j.at("parent").get<int>();
    e.child = j.at("child").get<int>();
    e.relation = j.at("relation").get<RelationBundle>();
}

inline void to_json(json& j, const LayoutTree& t) {
    json nodes = json::array();
    for (const auto& [id, asset] : t.nodes) nodes.push_back(json{{"id", id}, {"asset", asset}});
    j = json{{"scene_type", t.scene_type}, {"roots", t.roots}, {"nodes", nodes},
             {"edges", t.edges}};
}

inline void from_json(const json& j, LayoutTree& t) {
    t.scene_type = j.at("scene_type").get<std::string>();
    t.roots = j.at("roots").get<std::vector<int>>();
    t.nodes.clear();
    for (const auto& nj : j.at("nodes"))
        t.nodes[nj.at("id").get<int>()] = nj.at("asset").get<std::string>();
    t.edges = j.at("edges").get<std::vector<TreeEdge>>();
}

} // namespace scenegen
