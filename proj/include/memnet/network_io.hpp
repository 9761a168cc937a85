#pragma once

// Network documents are JSON:
//
//   {
//     "format": "memnet-network",
//     "version": 1,
//     "nodes": [
//       {"id":1,"role":"external"},
//       ...
//     ],
//     "links": [
//       {"from":10,"to":1,"v_t":0.374442,"alpha":0.339527,"beta":0.76859,"r_min":1.45,"r_max":1.55,"r_init":1.5},
//       ...
//     ]
//   }
//
// store() writes exactly this layout: two-space indent, one node or link per
// line, nodes in ascending id order, links in declaration order, floats in
// shortest round-trip form. "format" and "version" are optional on load.

#include <algorithm>
#include <string>
#include <string_view>

#include "memnet/json_util.hpp"
#include "memnet/network.hpp"

namespace memnet {

[[nodiscard]] inline std::string store(const Network& network) {
    using detail::ordered_json;
    std::vector<Node> nodes = network.nodes;
    std::stable_sort(nodes.begin(), nodes.end(),
                     [](const Node& a, const Node& b) { return a.id < b.id; });

    std::string out = "{\n  \"format\": \"memnet-network\",\n  \"version\": 1,\n  \"nodes\": [";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        ordered_json j;
        j["id"] = nodes[i].id;
        j["role"] = role_name(nodes[i].role);
        out += (i == 0 ? "\n    " : ",\n    ") + j.dump();
    }
    out += nodes.empty() ? "],\n  \"links\": [" : "\n  ],\n  \"links\": [";
    for (std::size_t i = 0; i < network.links.size(); ++i) {
        const auto& l = network.links[i];
        ordered_json j;
        j["from"] = l.from;
        j["to"] = l.to;
        j["v_t"] = l.params.v_threshold;
        j["alpha"] = l.params.alpha;
        j["beta"] = l.params.beta;
        j["r_min"] = l.params.r_min;
        j["r_max"] = l.params.r_max;
        j["r_init"] = l.params.r_init;
        out += (i == 0 ? "\n    " : ",\n    ") + j.dump();
    }
    out += network.links.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

/// Parses and validates. Syntax problems raise ParseError with a line and
/// column, schema problems raise ParseError naming the document path, and
/// structural problems raise ValidationError.
[[nodiscard]] inline Network load(std::string_view text) {
    const auto doc = detail::parse_document(text);
    if (!doc.is_object()) throw ParseError("network document must be an object");
    if (auto it = doc.find("format"); it != doc.end() && *it != "memnet-network") {
        throw ParseError("/format: expected \"memnet-network\"");
    }
    if (auto it = doc.find("version"); it != doc.end() && *it != 1) {
        throw ParseError("/version: unsupported version " + it->dump());
    }

    Network net;
    const auto& nodes = detail::require_array(doc, "nodes", "");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string where = "/nodes/" + std::to_string(i);
        const int id = detail::require_integer(nodes[i], "id", where);
        const std::string role_text = detail::require_string(nodes[i], "role", where);
        const auto role = parse_role(role_text);
        if (!role) throw ParseError(where + "/role: unknown role \"" + role_text + "\"");
        net.nodes.push_back({id, *role});
    }
    const auto& links = detail::require_array(doc, "links", "");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string where = "/links/" + std::to_string(i);
        const auto& j = links[i];
        Link l;
        l.from = detail::require_integer(j, "from", where);
        l.to = detail::require_integer(j, "to", where);
        l.params.v_threshold = detail::require_number(j, "v_t", where);
        l.params.alpha = detail::require_number(j, "alpha", where);
        l.params.beta = detail::require_number(j, "beta", where);
        l.params.r_min = detail::require_number(j, "r_min", where);
        l.params.r_max = detail::require_number(j, "r_max", where);
        l.params.r_init = detail::require_number(j, "r_init", where);
        net.links.push_back(l);
    }
    std::stable_sort(net.nodes.begin(), net.nodes.end(),
                     [](const Node& a, const Node& b) { return a.id < b.id; });
    require_valid(net);
    return net;
}

}  // namespace memnet
