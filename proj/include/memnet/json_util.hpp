#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"  // nlohmann/json, vendored

#include "memnet/errors.hpp"

namespace memnet::detail {

using ordered_json = nlohmann::ordered_json;

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline ordered_json parse_document(std::string_view text) {
    try {
        return ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is the 1-based offset of the offending character.
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("malformed document (" + std::string(e.what()) + ")", line, column);
    }
}

inline const ordered_json& require_key(const ordered_json& obj, const char* key,
                                       const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    return *it;
}

inline double require_number(const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = require_key(obj, key, where);
    if (!v.is_number()) throw ParseError(where + "/" + key + ": expected a number");
    return v.get<double>();
}

inline int require_integer(const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = require_key(obj, key, where);
    if (!v.is_number_integer()) throw ParseError(where + "/" + key + ": expected an integer");
    return v.get<int>();
}

inline std::string require_string(const ordered_json& obj, const char* key,
                                  const std::string& where) {
    const auto& v = require_key(obj, key, where);
    if (!v.is_string()) throw ParseError(where + "/" + key + ": expected a string");
    return v.get<std::string>();
}

inline const ordered_json& require_array(const ordered_json& obj, const char* key,
                                         const std::string& where) {
    const auto& v = require_key(obj, key, where);
    if (!v.is_array()) throw ParseError(where + "/" + key + ": expected an array");
    return v;
}

}  // namespace memnet::detail
