#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace scenegen {

/// Deterministic provenance trail carried through the pipeline (no wall-clock
/// data, so serialized artifacts stay byte-reproducible).
struct AuditLog {
    std::vector<std::string> entries;

    void note(std::string entry) { entries.push_back(std::move(entry)); }

    void merge(const AuditLog& other) {
        entries.insert(entries.end(), other.entries.begin(), other.entries.end());
    }

    bool contains(const std::string& needle) const {
        for (const auto& e : entries)
            if (e.find(needle) != std::string::npos) return true;
        return false;
    }

    friend bool operator==(const AuditLog&, const AuditLog&) = default;
};

inline void to_json(nlohmann::ordered_json& j, const AuditLog& a) { j = a.entries; }

inline void from_json(const nlohmann::ordered_json& j, AuditLog& a) {
    a.entries = j.get<std::vector<std::string>>();
}

} // namespace scenegen
