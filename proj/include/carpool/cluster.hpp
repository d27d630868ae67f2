#ifndef CARPOOL_CLUSTER_HPP
#define CARPOOL_CLUSTER_HPP

#include "carpool/execution.hpp"
#include "carpool/geo.hpp"
#include "carpool/simplify.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace carpool {

inline constexpr double kDefaultCutHeight = 6000.0;

/// (origin x, origin y, destination x, destination y) in meters about a
/// reference point.
using OdVector = std::array<double, 4>;

OdVector od_vector(const Trace& trace, const GeoPoint& reference);
OdVector od_vector(const SimplifiedTrace& trace, const GeoPoint& reference);

double od_distance(const OdVector& a, const OdVector& b) noexcept;

/// Scipy-style merge record: leaves are clusters 0..n-1, the k-th merge
/// creates cluster n+k. `a < b`.
struct Merge {
    std::size_t a = 0;
    std::size_t b = 0;
    double height = 0.0;
    std::size_t size = 0;

    friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
    std::size_t leaf_count = 0;
    std::vector<Merge> merges;
};

/// Agglomerative clustering, complete linkage (max pairwise distance).
/// Ties in the minimum are broken by the smallest (a, b) cluster-id pair, so
/// the serial and parallel paths return identical dendrograms.
Dendrogram complete_linkage(std::span<const OdVector> vectors, Execution exec = Execution::parallel);

struct ClusterLabels {
    std::vector<std::string> trace_ids;
    std::vector<std::size_t> labels;  ///< per trace; clusters numbered by first member
    std::vector<std::size_t> sizes;   ///< per cluster

    std::size_t cluster_count() const noexcept { return sizes.size(); }
};

/// Connected components after dropping merges above `h`. `ids` names the
/// leaves; when empty, leaves are named by index.
ClusterLabels cut(const Dendrogram& dendrogram, double h, std::span<const std::string> ids = {});

/// Members of the largest cluster, sorted. Ties go to the cluster holding the
/// lexicographically smallest id.
std::vector<std::string> door_to_door_matches(const ClusterLabels& labels);

/// od_vector + complete_linkage + cut for a batch of simplified traces.
ClusterLabels cluster_traces(std::span<const SimplifiedTrace> traces, const GeoPoint& reference,
                             double h = kDefaultCutHeight, Execution exec = Execution::parallel);

}  // namespace carpool

#endif  // CARPOOL_CLUSTER_HPP
