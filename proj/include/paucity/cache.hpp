#pragma once

// Append-only journal of count results, one JSON object per line.

#include "paucity/core.hpp"
#include "paucity/enumeration.hpp"
#include "paucity/systems.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

namespace paucity {

inline nlohmann::json to_json(const CountResult& r) {
    return {{"variant", std::string(to_string(r.spec.variant))},
            {"k", std::to_string(r.spec.k)},
            {"d", std::to_string(r.spec.d)},
            {"P", std::to_string(r.P)},
            {"V", r.V.get_str()},
            {"L", r.L.get_str()},
            {"delta", r.delta.get_str()},
            {"wall_time", r.wall_time},
            {"tool_version", r.tool_version}};
}

inline CountResult count_result_from_json(const nlohmann::json& j) {
    CountResult r;
    r.spec.variant = parse_variant(j.at("variant").get<std::string>());
    r.spec.k = static_cast<unsigned>(parse_integer(j.at("k").get<std::string>()).get_ui());
    r.spec.d = static_cast<unsigned>(parse_integer(j.at("d").get<std::string>()).get_ui());
    r.P = parse_integer(j.at("P").get<std::string>()).get_ui();
    r.V = parse_integer(j.at("V").get<std::string>());
    r.L = parse_integer(j.at("L").get<std::string>());
    r.delta = parse_integer(j.at("delta").get<std::string>());
    r.wall_time = j.at("wall_time").get<double>();
    r.tool_version = j.at("tool_version").get<std::string>();
    return r;
}

class CountCache {
public:
    explicit CountCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path journal() const { return dir_ / "counts.jsonl"; }

    /// Newest record for (spec, P, version); duplicates must agree.
    std::optional<CountResult> get(const SystemSpec& spec, unsigned long P,
                                   std::string_view version = tool_version) const {
        std::ifstream in(journal());
        if (!in) return std::nullopt;
        std::optional<CountResult> found;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            CountResult r;
            try {
                r = count_result_from_json(nlohmann::json::parse(line));
            } catch (const std::exception& e) {
                throw IntegrityError(journal().string() + ":" + std::to_string(lineno) + ": unreadable record (" +
                                     e.what() + ")");
            }
            if (!(r.spec == spec && r.P == P && r.tool_version == version)) continue;
            if (found && !found->same_counts(r))
                throw IntegrityError(journal().string() + ":" + std::to_string(lineno) +
                                     ": conflicting records for the same key");
            found = std::move(r);
        }
        return found;
    }

    /// Appends the record; refuses when it contradicts an existing one.
    void put(const CountResult& r) const {
        if (auto prev = get(r.spec, r.P, r.tool_version); prev && !prev->same_counts(r))
            throw IntegrityError("cached record for " + std::string(to_string(r.spec.variant)) +
                                 " k=" + std::to_string(r.spec.k) + " d=" + std::to_string(r.spec.d) +
                                 " P=" + std::to_string(r.P) + " disagrees with the new count");
        std::filesystem::create_directories(dir_);
        std::ofstream out(journal(), std::ios::app);
        if (!out) throw std::runtime_error("cannot open " + journal().string() + " for appending");
        out << to_json(r).dump() << '\n';
        if (!out) throw std::runtime_error("write to " + journal().string() + " failed");
    }

private:
    std::filesystem::path dir_;
};

inline void cache_put(const CountCache& cache, const CountResult& r) { cache.put(r); }

inline std::optional<CountResult> cache_get(const CountCache& cache, const SystemSpec& spec, unsigned long P) {
    return cache.get(spec, P);
}

} // namespace paucity
