#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace memnet {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

inline void append_number(std::string& out, double value) { out += format_number(value); }

}  // namespace memnet
