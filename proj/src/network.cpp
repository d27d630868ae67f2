#include "carpool/network.hpp"

#include "carpool/error.hpp"

#include <algorithm>
#include <cstdint>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <set>

namespace carpool {

std::optional<std::size_t> CarpoolNetwork::index_of(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const MeetingPoint& CarpoolNetwork::node(std::string_view id) const {
    const auto idx = index_of(id);
    if (!idx) {
        throw Error(ErrorCode::UnknownNode, fmt::format("unknown meeting point '{}'", id));
    }
    return nodes_[*idx];
}

bool CarpoolNetwork::has_edge(std::string_view from, std::string_view to) const {
    const auto a = index_of(from);
    const auto b = index_of(to);
    if (!a || !b) {
        return false;
    }
    const auto& succ = adjacency_[*a];
    return std::find(succ.begin(), succ.end(), *b) != succ.end();
}

CarpoolNetwork build_network(std::vector<MeetingPoint> points, std::vector<EdgeSpec> edges) {
    CarpoolNetwork net;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].location.valid()) {
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("meeting point '{}' has out-of-range coordinates", points[i].id));
        }
        if (!net.index_.emplace(points[i].id, i).second) {
            throw Error(ErrorCode::DuplicateId, fmt::format("duplicate meeting point id '{}'", points[i].id));
        }
    }
    net.nodes_ = std::move(points);
    net.adjacency_.resize(net.nodes_.size());

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto& [from, to] : edges) {
        const auto a = net.index_of(from);
        const auto b = net.index_of(to);
        if (!a || !b) {
            throw Error(ErrorCode::UnknownEndpoint,
                        fmt::format("edge {}->{} references unknown meeting point '{}'", from, to, !a ? from : to));
        }
        if (*a == *b) {
            throw Error(ErrorCode::SelfLoop, fmt::format("self-loop edge on '{}'", from));
        }
        if (seen.emplace(*a, *b).second) {
            net.adjacency_[*a].push_back(*b);
            net.edges_.emplace_back(std::move(from), std::move(to));
        }
    }
    for (auto& succ : net.adjacency_) {
        std::sort(succ.begin(), succ.end());
    }
    return net;
}

CarpoolLine::CarpoolLine(std::vector<std::string> node_ids) : node_ids_(std::move(node_ids)) {
    if (node_ids_.size() < 2) {
        throw Error(ErrorCode::InvalidLine, "a carpooling line needs at least two meeting points");
    }
    std::vector<std::string> sorted = node_ids_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::InvalidLine, fmt::format("line '{}' repeats a meeting point", label()));
    }
}

CarpoolLine CarpoolLine::parse(std::string_view text) {
    std::vector<std::string> ids;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find('>', start);
        std::string_view part = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        if (part.empty()) {
            throw Error(ErrorCode::InvalidLine, fmt::format("malformed line '{}'", text));
        }
        ids.emplace_back(part);
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return CarpoolLine(std::move(ids));
}

std::string CarpoolLine::label() const {
    return fmt::format("{}", fmt::join(node_ids_, ">"));
}

namespace {

struct VariantSearch {
    const CarpoolNetwork& network;
    std::vector<std::size_t> waypoints;      // line nodes as indices, including first and last
    std::vector<int> waypoint_rank;          // -1 for non-line nodes
    std::vector<std::size_t> path;
    std::vector<std::vector<std::size_t>> found;

    void dfs(std::size_t node, std::size_t next_waypoint, std::uint64_t visited) {
        if (node == waypoints.back()) {
            found.push_back(path);
            return;
        }
        for (const std::size_t succ : network.successors(node)) {
            if (visited & (std::uint64_t{1} << succ)) {
                continue;
            }
            const int rank = waypoint_rank[succ];
            std::size_t advanced = next_waypoint;
            if (rank >= 0) {
                // Line nodes must come in line order.
                if (static_cast<std::size_t>(rank) != next_waypoint) {
                    continue;
                }
                ++advanced;
            }
            path.push_back(succ);
            dfs(succ, advanced, visited | (std::uint64_t{1} << succ));
            path.pop_back();
        }
    }
};

}  // namespace

std::vector<CarpoolLine> line_variants(const CarpoolNetwork& network, const CarpoolLine& line) {
    if (network.size() > CarpoolNetwork::kMaxEnumerableNodes) {
        throw Error(ErrorCode::NetworkTooLarge,
                    fmt::format("path enumeration is limited to {} meeting points, network has {}",
                                CarpoolNetwork::kMaxEnumerableNodes, network.size()));
    }
    VariantSearch search{network, {}, std::vector<int>(network.size(), -1), {}, {}};
    for (const auto& id : line.node_ids()) {
        const auto idx = network.index_of(id);
        if (!idx) {
            throw Error(ErrorCode::UnknownNode, fmt::format("line '{}' references unknown meeting point '{}'",
                                                             line.label(), id));
        }
        search.waypoint_rank[*idx] = static_cast<int>(search.waypoints.size());
        search.waypoints.push_back(*idx);
    }

    const std::size_t start = search.waypoints.front();
    search.path.push_back(start);
    search.dfs(start, 1, std::uint64_t{1} << start);

    std::vector<CarpoolLine> variants;
    variants.reserve(search.found.size());
    for (const auto& p : search.found) {
        std::vector<std::string> ids;
        ids.reserve(p.size());
        for (const std::size_t i : p) {
            ids.push_back(network.node(i).id);
        }
        variants.emplace_back(std::move(ids));
    }
    std::sort(variants.begin(), variants.end(), [](const CarpoolLine& a, const CarpoolLine& b) {
        if (a.size() != b.size()) {
            return a.size() < b.size();
        }
        return a < b;
    });
    return variants;
}

}  // namespace carpool
