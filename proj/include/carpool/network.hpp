#ifndef CARPOOL_NETWORK_HPP
#define CARPOOL_NETWORK_HPP

#include "carpool/geo.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace carpool {

struct MeetingPoint {
    std::string id;
    std::string name;
    GeoPoint location;

    friend bool operator==(const MeetingPoint&, const MeetingPoint&) = default;
};

using EdgeSpec = std::pair<std::string, std::string>;

/// Directed graph of meeting points. Immutable once built.
class CarpoolNetwork {
public:
    /// Largest network line_variants will enumerate paths on.
    static constexpr std::size_t kMaxEnumerableNodes = 64;

    CarpoolNetwork() = default;

    std::span<const MeetingPoint> nodes() const noexcept { return nodes_; }
    std::span<const EdgeSpec> edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    std::optional<std::size_t> index_of(std::string_view id) const;
    /// Throws UnknownNode.
    const MeetingPoint& node(std::string_view id) const;
    const MeetingPoint& node(std::size_t index) const { return nodes_.at(index); }
    std::span<const std::size_t> successors(std::size_t index) const { return adjacency_.at(index); }
    bool has_edge(std::string_view from, std::string_view to) const;

private:
    friend CarpoolNetwork build_network(std::vector<MeetingPoint> points, std::vector<EdgeSpec> edges);

    std::vector<MeetingPoint> nodes_;
    std::vector<EdgeSpec> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

/// Validates ids and edges. Throws DuplicateId, UnknownEndpoint or SelfLoop.
/// Duplicate edges are collapsed.
CarpoolNetwork build_network(std::vector<MeetingPoint> points, std::vector<EdgeSpec> edges);

/// An ordered sequence of at least two distinct meeting-point ids. Consecutive
/// ids need a directed path between them, not necessarily a direct edge.
class CarpoolLine {
public:
    /// Throws InvalidLine for fewer than two ids or a repeated id.
    explicit CarpoolLine(std::vector<std::string> node_ids);

    /// Parses "B>V>S".
    static CarpoolLine parse(std::string_view text);

    std::span<const std::string> node_ids() const noexcept { return node_ids_; }
    const std::string& first() const noexcept { return node_ids_.front(); }
    const std::string& last() const noexcept { return node_ids_.back(); }
    std::size_t size() const noexcept { return node_ids_.size(); }
    std::string label() const;

    friend bool operator==(const CarpoolLine&, const CarpoolLine&) = default;
    friend auto operator<=>(const CarpoolLine&, const CarpoolLine&) = default;

private:
    std::vector<std::string> node_ids_;
};

/// Every simple directed path from the line's first to last node that visits
/// the line's intermediate nodes in order, other network nodes possibly
/// interleaved. Sorted by length, then lexicographically.
/// Throws UnknownNode, or NetworkTooLarge above kMaxEnumerableNodes.
std::vector<CarpoolLine> line_variants(const CarpoolNetwork& network, const CarpoolLine& line);

}  // namespace carpool

#endif  // CARPOOL_NETWORK_HPP
