#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "memnet/errors.hpp"
#include "memnet/memristor.hpp"

namespace memnet {

using NodeId = int;

enum class NodeRole { External, Grounded, Internal };

inline const char* role_name(NodeRole role) {
    switch (role) {
        case NodeRole::External: return "external";
        case NodeRole::Grounded: return "grounded";
        case NodeRole::Internal: return "internal";
    }
    return "internal";
}

inline std::optional<NodeRole> parse_role(const std::string& text) {
    if (text == "external") return NodeRole::External;
    if (text == "grounded") return NodeRole::Grounded;
    if (text == "internal") return NodeRole::Internal;
    return std::nullopt;
}

inline bool is_fixed(NodeRole role) { return role != NodeRole::Internal; }

struct Node {
    NodeId id = 0;
    NodeRole role = NodeRole::Internal;

    friend bool operator==(const Node&, const Node&) = default;
};

/// A directed memristive link. The rate law sees V = V_from - V_to.
struct Link {
    NodeId from = 0;
    NodeId to = 0;
    MemristorParams params;

    friend bool operator==(const Link&, const Link&) = default;
};

/// Plain aggregate; call validate() before handing one to the solver.
/// Nodes are kept in ascending id order by the builders and by load().
struct Network {
    std::vector<Node> nodes;
    std::vector<Link> links;

    friend bool operator==(const Network&, const Network&) = default;

    [[nodiscard]] std::optional<std::size_t> index_of(NodeId id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].id == id) return i;
        }
        return std::nullopt;
    }

    [[nodiscard]] std::vector<NodeId> ids_with_role(NodeRole role) const {
        std::vector<NodeId> out;
        for (const auto& n : nodes) {
            if (n.role == role) out.push_back(n.id);
        }
        return out;
    }
};

/// Every structural problem in `network`, in a stable order. Empty means valid.
[[nodiscard]] inline std::vector<Violation> validate(const Network& network) {
    using Rule = Violation::Rule;
    std::vector<Violation> out;

    std::map<NodeId, NodeRole> roles;
    for (const auto& n : network.nodes) {
        if (!roles.emplace(n.id, n.role).second) {
            out.push_back({Rule::DuplicateNodeId, "duplicate node id " + std::to_string(n.id)});
        }
    }

    bool any_fixed = false;
    for (const auto& [id, role] : roles) any_fixed = any_fixed || is_fixed(role);
    if (!any_fixed) {
        out.push_back({Rule::NoFixedVoltageNode,
                       "network has no external or grounded node; the nodal system is singular"});
    }

    std::set<std::pair<NodeId, NodeId>> seen;
    std::map<NodeId, std::vector<NodeId>> adjacency;
    for (std::size_t k = 0; k < network.links.size(); ++k) {
        const auto& link = network.links[k];
        const std::string label = "link " + std::to_string(k) + " (" + std::to_string(link.from) +
                                  "->" + std::to_string(link.to) + ")";
        bool endpoints_ok = true;
        for (NodeId end : {link.from, link.to}) {
            if (!roles.contains(end)) {
                out.push_back({Rule::MissingEndpoint,
                               label + " references missing node " + std::to_string(end)});
                endpoints_ok = false;
            }
        }
        if (link.from == link.to) {
            out.push_back({Rule::SelfLoop, "self-loop at node " + std::to_string(link.from)});
            endpoints_ok = false;
        }
        if (!seen.emplace(link.from, link.to).second) {
            out.push_back({Rule::DuplicateLink, label + " duplicates an earlier link"});
        }
        if (!link.params.valid()) {
            out.push_back({Rule::InvalidParams,
                           label + " needs r_min > 0, r_min <= r_init <= r_max, v_t >= 0"});
        }
        if (endpoints_ok) {
            adjacency[link.from].push_back(link.to);
            adjacency[link.to].push_back(link.from);
        }
    }

    // Every internal node must reach a fixed-voltage node through some link.
    std::set<NodeId> reached;
    std::queue<NodeId> frontier;
    for (const auto& [id, role] : roles) {
        if (is_fixed(role)) {
            reached.insert(id);
            frontier.push(id);
        }
    }
    while (!frontier.empty()) {
        const NodeId id = frontier.front();
        frontier.pop();
        for (NodeId next : adjacency[id]) {
            if (reached.insert(next).second) frontier.push(next);
        }
    }
    if (any_fixed) {
        for (const auto& [id, role] : roles) {
            if (!reached.contains(id)) {
                out.push_back({Rule::Disconnected, "internal node " + std::to_string(id) +
                                                       " has no path to a fixed-voltage node"});
            }
        }
    }
    return out;
}

inline void require_valid(const Network& network) {
    auto violations = validate(network);
    if (!violations.empty()) throw ValidationError(std::move(violations));
}

/// Passive series resistor feeding one memristor: 1 (external) -> 2 (internal) -> 3 (grounded).
[[nodiscard]] inline Network build_series_benchmark() {
    Network net;
    net.nodes = {{1, NodeRole::External}, {2, NodeRole::Internal}, {3, NodeRole::Grounded}};
    MemristorParams memristor;
    memristor.alpha = 146'000.0;
    memristor.beta = 146'000.0;
    memristor.v_threshold = 4.0;
    memristor.r_min = 675.0;
    memristor.r_max = 10'000.0;
    memristor.r_init = 10'000.0;
    net.links = {{1, 2, MemristorParams::passive(10'000.0)}, {2, 3, memristor}};
    return net;
}

namespace detail {

struct CubeRow {
    NodeId from;
    NodeId to;
    double v_threshold;
    double alpha;
    double beta;
};

// Link table of the 3x3x3 cube: direction, V_T [V], alpha and beta [Ω/(V·s)].
inline constexpr std::array<CubeRow, 54> kCubeLinks{{
    {10, 1, 0.374442, 0.339527, 0.76859},   {1, 2, 0.338867, 0.766728, 1.681},
    {4, 1, 0.916852, 0.190449, 1.01836},    {2, 3, 0.395556, 0.59712, 0.715665},
    {2, 5, 0.957822, 0.552519, 1.38086},    {2, 11, 0.456982, 0.197251, 0.499046},
    {12, 3, 0.509442, 0.193125, 0.38095},   {3, 6, 0.129586, 0.379953, 0.580798},
    {4, 7, 0.63842, 0.816642, 1.21164},     {4, 5, 0.497659, 0.89305, 1.24712},
    {4, 13, 0.812996, 0.836584, 1.11225},   {5, 8, 0.312802, 0.599889, 0.799181},
    {14, 5, 0.424215, 0.973887, 1.53969},   {5, 6, 0.211621, 0.656048, 0.761047},
    {9, 6, 0.95086, 0.670889, 0.970032},    {6, 15, 0.501306, 0.433332, 0.782898},
    {16, 7, 0.746284, 0.571936, 1.28032},   {7, 8, 0.367929, 0.584094, 1.23548},
    {8, 17, 0.607931, 0.824092, 1.78827},   {8, 9, 0.955427, 0.970764, 1.62366},
    {9, 18, 0.734346, 0.553811, 0.963794},  {10, 19, 0.348097, 0.603011, 0.71191},
    {10, 11, 0.63911, 0.522766, 0.656083},  {13, 10, 0.983575, 0.770146, 1.51798},
    {11, 14, 0.125702, 0.702939, 1.50984},  {11, 12, 0.292193, 0.603787, 1.14385},
    {20, 11, 0.363118, 0.711326, 1.61589},  {15, 12, 0.459023, 0.830813, 1.71065},
    {12, 21, 0.248844, 0.716935, 0.964279}, {13, 22, 0.591142, 0.685118, 0.850874},
    {14, 13, 0.417162, 0.503876, 1.20527},  {16, 13, 0.330005, 0.188323, 1.12526},
    {14, 15, 0.640415, 0.889584, 1.77304},  {14, 17, 0.268105, 0.826208, 0.946175},
    {14, 23, 0.976, 0.920302, 1.71634},     {24, 15, 0.124989, 0.257296, 0.473974},
    {15, 18, 0.761428, 0.73645, 1.17762},   {25, 16, 0.848135, 0.475557, 1.45515},
    {17, 16, 0.134474, 0.606631, 1.58427},  {26, 17, 0.879447, 0.610327, 0.764154},
    {17, 18, 0.80575, 0.205049, 0.8331},    {18, 27, 0.164033, 0.458028, 1.00478},
    {20, 19, 0.263635, 0.958362, 1.59943},  {19, 22, 0.319153, 0.679248, 0.933867},
    {23, 20, 0.374859, 0.436996, 0.831076}, {21, 20, 0.110315, 0.223772, 0.589538},
    {21, 24, 0.448737, 0.352571, 0.710772}, {22, 23, 0.803082, 0.646101, 0.806519},
    {25, 22, 0.655003, 0.947564, 1.39472},  {23, 24, 0.394366, 0.693992, 1.68974},
    {23, 26, 0.790899, 0.792383, 1.54045},  {24, 27, 0.587119, 0.493326, 0.967518},
    {26, 25, 0.253639, 0.787869, 1.65719},  {27, 26, 0.388202, 0.511768, 0.809962},
}};

inline constexpr double kCubeRMin = 1.45;
inline constexpr double kCubeRMax = 1.55;
inline constexpr double kCubeRInit = 1.5;

}  // namespace detail

/// The 27-node, 54-link cube: nodes 1-3 driven, node 4 grounded, the rest internal.
/// Links are in table order (left column, then right column).
[[nodiscard]] inline Network build_cube() {
    Network net;
    for (NodeId id = 1; id <= 27; ++id) {
        const NodeRole role = id <= 3 ? NodeRole::External
                              : id == 4 ? NodeRole::Grounded
                                        : NodeRole::Internal;
        net.nodes.push_back({id, role});
    }
    for (const auto& row : detail::kCubeLinks) {
        MemristorParams p;
        p.alpha = row.alpha;
        p.beta = row.beta;
        p.v_threshold = row.v_threshold;
        p.r_min = detail::kCubeRMin;
        p.r_max = detail::kCubeRMax;
        p.r_init = detail::kCubeRInit;
        net.links.push_back({row.from, row.to, p});
    }
    return net;
}

}  // namespace memnet
