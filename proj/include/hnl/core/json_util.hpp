#pragma once

#include "hnl/core/error.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>

namespace hnl {

/// Dotted path of a field for error messages.
inline std::string field_path(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

/// Throws ConfigError naming the first key of `j` not in `allowed`.
inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                                const std::string& path) {
    if (!j.is_object()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) throw ConfigError("unknown key '" + field_path(path, key) + "'");
    }
}

template <typename T>
T json_get(const nlohmann::json& j, std::string_view key, const std::string& path) {
    const std::string k(key);
    if (!j.contains(k)) throw ConfigError("missing required field '" + field_path(path, key) + "'");
    try {
        return j.at(k).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("field '" + field_path(path, key) + "' has the wrong type");
    }
}

template <typename T>
T json_get_or(const nlohmann::json& j, std::string_view key, T fallback, const std::string& path) {
    const std::string k(key);
    if (!j.contains(k)) return fallback;
    return json_get<T>(j, key, path);
}

}  // namespace hnl
