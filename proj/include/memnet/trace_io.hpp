#pragma once

// Trace export.
//
// CSV: header `t,V_node_<id>...,R_link_<k>...,I_link_<k>...,VM_link_<k>...`,
// one row per sample. Node columns follow network node order, link index k is
// the 0-based declaration order. Numbers are shortest round-trip decimals.
//
// JSON: {"times": [...], "nodes": [{"id", "voltage": [...]}...],
//        "links": [{"index", "from", "to", "resistance", "current", "drop"}...]}

#include <string>

#include "memnet/csv.hpp"
#include "memnet/dynamics.hpp"
#include "memnet/json_util.hpp"

namespace memnet {

[[nodiscard]] inline std::string trace_to_csv(const SimulationTrace& trace) {
    std::string out = "t";
    for (NodeId id : trace.node_ids) out += ",V_node_" + std::to_string(id);
    const std::size_t links = trace.resistances.size();
    for (const char* prefix : {",R_link_", ",I_link_", ",VM_link_"}) {
        for (std::size_t k = 0; k < links; ++k) out += prefix + std::to_string(k);
    }
    out += '\n';
    for (std::size_t n = 0; n < trace.samples(); ++n) {
        append_number(out, trace.times[n]);
        for (const auto& s : trace.node_voltages) {
            out += ',';
            append_number(out, s[n]);
        }
        for (const auto* group : {&trace.resistances, &trace.currents, &trace.drops}) {
            for (const auto& s : *group) {
                out += ',';
                append_number(out, s[n]);
            }
        }
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline std::string trace_to_json(const Network& network,
                                               const SimulationTrace& trace) {
    detail::ordered_json doc;
    doc["times"] = trace.times;
    auto& nodes = doc["nodes"] = detail::ordered_json::array();
    for (std::size_t i = 0; i < trace.node_ids.size(); ++i) {
        nodes.push_back({{"id", trace.node_ids[i]},
                         {"role", role_name(network.nodes[i].role)},
                         {"voltage", trace.node_voltages[i]}});
    }
    auto& links = doc["links"] = detail::ordered_json::array();
    for (std::size_t k = 0; k < trace.resistances.size(); ++k) {
        links.push_back({{"index", k},
                         {"from", network.links[k].from},
                         {"to", network.links[k].to},
                         {"resistance", trace.resistances[k]},
                         {"current", trace.currents[k]},
                         {"drop", trace.drops[k]}});
    }
    return doc.dump(1) + "\n";
}

}  // namespace memnet
