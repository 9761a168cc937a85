#pragma once

// Drive documents are JSON:
//
//   {"drives": [
//     {"node": 1, "kind": "sine", "amplitude": 1.0, "frequency": 2.0, "phase": 0.0, "offset": 0.0},
//     ...
//   ]}
//
// kind is one of sine, cosine, square, sawtooth, constant. frequency, phase
// and offset default to 0 when omitted.

#include <string>
#include <string_view>

#include "memnet/dynamics.hpp"
#include "memnet/json_util.hpp"
#include "memnet/signals.hpp"

namespace memnet {

[[nodiscard]] inline Signal signal_from_json(const detail::ordered_json& j, const std::string& where) {
    Signal s;
    const std::string kind = detail::require_string(j, "kind", where);
    const auto parsed = parse_kind(kind);
    if (!parsed) throw ParseError(where + "/kind: unknown signal kind \"" + kind + "\"");
    s.kind = *parsed;
    s.amplitude = detail::require_number(j, "amplitude", where);
    if (j.contains("frequency")) s.frequency = detail::require_number(j, "frequency", where);
    if (j.contains("phase")) s.phase = detail::require_number(j, "phase", where);
    if (j.contains("offset")) s.offset = detail::require_number(j, "offset", where);
    if (!(s.frequency >= 0.0)) throw ParseError(where + "/frequency: must be >= 0");
    return s;
}

[[nodiscard]] inline detail::ordered_json signal_to_json(const Signal& s) {
    detail::ordered_json j;
    j["kind"] = kind_name(s.kind);
    j["amplitude"] = s.amplitude;
    j["frequency"] = s.frequency;
    j["phase"] = s.phase;
    j["offset"] = s.offset;
    return j;
}

[[nodiscard]] inline DriveAssignment load_drives(std::string_view text) {
    const auto doc = detail::parse_document(text);
    const auto& list = detail::require_array(doc, "drives", "");
    DriveAssignment out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "/drives/" + std::to_string(i);
        const int node = detail::require_integer(list[i], "node", where);
        if (!out.emplace(node, signal_from_json(list[i], where)).second) {
            throw ParseError(where + "/node: node " + std::to_string(node) + " is driven twice");
        }
    }
    return out;
}

[[nodiscard]] inline std::string store_drives(const DriveAssignment& drives) {
    std::string out = "{\"drives\": [";
    bool first = true;
    for (const auto& [node, signal] : drives) {
        detail::ordered_json j;
        j["node"] = node;
        const auto fields = signal_to_json(signal);
        for (const auto& [key, value] : fields.items()) j[key] = value;
        out += (first ? "\n  " : ",\n  ") + j.dump();
        first = false;
    }
    out += drives.empty() ? "]}\n" : "\n]}\n";
    return out;
}

}  // namespace memnet
