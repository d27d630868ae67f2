// Slow, obviously-correct reference implementations used only by tests.
#ifndef CARPOOL_TESTS_ORACLES_HPP
#define CARPOOL_TESTS_ORACLES_HPP

#include "carpool/cluster.hpp"
#include "carpool/flow.hpp"
#include "carpool/geo.hpp"
#include "carpool/network.hpp"
#include "carpool/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

inline double haversine(const carpool::GeoPoint& a, const carpool::GeoPoint& b) {
    constexpr double r = 6371000.0;
    const double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad;
    const double dlon = (b.lon - a.lon) * rad;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2 * r * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Point `meters` away from `origin` along `bearing_deg` (0 = north), on the
/// equirectangular plane of the origin.
inline carpool::GeoPoint offset(const carpool::GeoPoint& origin, double meters, double bearing_deg) {
    constexpr double r = 6371000.0;
    const double rad = std::numbers::pi / 180.0;
    const double dy = meters * std::cos(bearing_deg * rad);
    const double dx = meters * std::sin(bearing_deg * rad);
    return {origin.lon + dx / (r * std::cos(origin.lat * rad)) / rad, origin.lat + dy / r / rad};
}

/// All simple paths first..last visiting the line's waypoints in order, by
/// trying every subset permutation of the other nodes. Only for tiny graphs.
inline std::vector<std::vector<std::string>> variants(const carpool::CarpoolNetwork& net,
                                                      const carpool::CarpoolLine& line) {
    const auto ids = line.node_ids();
    std::vector<std::string> others;
    for (const auto& n : net.nodes()) {
        if (std::find(ids.begin(), ids.end(), n.id) == ids.end()) {
            others.push_back(n.id);
        }
    }
    std::set<std::vector<std::string>> found;
    const std::size_t m = others.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        std::vector<std::string> chosen;
        for (std::size_t k = 0; k < m; ++k) {
            if (mask & (std::size_t{1} << k)) {
                chosen.push_back(others[k]);
            }
        }
        // Interior = waypoints + chosen, in any order that keeps waypoints ordered.
        std::vector<std::string> interior(ids.begin() + 1, ids.end() - 1);
        interior.insert(interior.end(), chosen.begin(), chosen.end());
        std::sort(interior.begin(), interior.end());
        do {
            std::vector<std::string> path{ids.front()};
            path.insert(path.end(), interior.begin(), interior.end());
            path.push_back(ids.back());
            std::size_t next = 1;
            for (const auto& p : path) {
                if (next + 1 < ids.size() && p == ids[next]) {
                    ++next;
                }
            }
            if (next + 1 != ids.size()) {
                continue;
            }
            bool ok = true;
            for (std::size_t i = 0; i + 1 < path.size() && ok; ++i) {
                ok = net.has_edge(path[i], path[i + 1]);
            }
            if (ok) {
                found.insert(path);
            }
        } while (std::next_permutation(interior.begin(), interior.end()));
    }
    std::vector<std::vector<std::string>> out(found.begin(), found.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return out;
}

/// Exhaustive simplification: every (sample, meeting point) pair is measured
/// again for every variant.
inline std::optional<carpool::SimplifiedTrace> simplify(const carpool::Trace& trace, const carpool::CarpoolLine& line,
                                                        const carpool::CarpoolNetwork& net, double radius,
                                                        const carpool::DailyWindow& window) {
    struct Candidate {
        std::vector<std::string> variant;
        std::vector<carpool::MeetingPointPass> passes;
    };
    std::vector<Candidate> valid;
    const auto samples = trace.samples();
    for (const auto& variant : variants(net, line)) {
        std::vector<carpool::MeetingPointPass> passes;
        bool ok = true;
        for (const auto& id : variant) {
            const auto& mp = net.node(id);
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const double d = carpool::planar_distance(samples[i].position, mp.location);
                if (d < best_d || (d == best_d && samples[i].timestamp < samples[best].timestamp)) {
                    best = i;
                    best_d = d;
                }
            }
            if (best_d > radius || !window.contains(samples[best].timestamp)) {
                ok = false;
                break;
            }
            passes.push_back({id, samples[best], best_d});
        }
        for (std::size_t k = 1; ok && k < passes.size(); ++k) {
            ok = passes[k - 1].arrival_time() < passes[k].arrival_time();
        }
        if (ok) {
            valid.push_back({variant, passes});
        }
    }
    if (valid.empty()) {
        return std::nullopt;
    }
    const auto best = std::min_element(valid.begin(), valid.end(), [](const Candidate& a, const Candidate& b) {
        if (a.variant.size() != b.variant.size()) {
            return a.variant.size() > b.variant.size();
        }
        if (a.passes.back().arrival_time() != b.passes.back().arrival_time()) {
            return a.passes.back().arrival_time() < b.passes.back().arrival_time();
        }
        return a.variant < b.variant;
    });
    carpool::SimplifiedTrace out;
    out.trace_id = trace.id();
    out.line = line.label();
    out.variant = carpool::CarpoolLine(best->variant).label();
    out.origin = samples.front();
    out.destination = samples.back();
    out.passes = best->passes;
    out.source_length = samples.size();
    return out;
}

/// O(n^3) complete linkage: every step recomputes every inter-cluster
/// maximum from the raw points.
inline carpool::Dendrogram linkage(const std::vector<carpool::OdVector>& pts) {
    auto dist = [](const carpool::OdVector& a, const carpool::OdVector& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            s += (a[k] - b[k]) * (a[k] - b[k]);
        }
        return std::sqrt(s);
    };
    struct Cluster {
        std::size_t id;
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> live;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        live.push_back({i, {i}});
    }
    carpool::Dendrogram out{pts.size(), {}};
    while (live.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        std::pair<std::size_t, std::size_t> best_ids{SIZE_MAX, SIZE_MAX};
        for (std::size_t i = 0; i < live.size(); ++i) {
            for (std::size_t j = i + 1; j < live.size(); ++j) {
                double d = 0.0;
                for (const auto a : live[i].members) {
                    for (const auto b : live[j].members) {
                        d = std::max(d, dist(pts[a], pts[b]));
                    }
                }
                const std::pair ids{std::min(live[i].id, live[j].id), std::max(live[i].id, live[j].id)};
                if (d < best || (d == best && ids < best_ids)) {
                    best = d;
                    bi = i;
                    bj = j;
                    best_ids = ids;
                }
            }
        }
        Cluster merged{pts.size() + out.merges.size(), live[bi].members};
        merged.members.insert(merged.members.end(), live[bj].members.begin(), live[bj].members.end());
        out.merges.push_back({best_ids.first, best_ids.second, best, merged.members.size()});
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(bj));
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(bi));
        live.push_back(std::move(merged));
    }
    return out;
}

/// Cluster membership as a set of sets, ignoring label numbering.
inline std::set<std::set<std::string>> partition(const carpool::ClusterLabels& labels) {
    std::vector<std::set<std::string>> groups(labels.sizes.size());
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        groups[labels.labels[i]].insert(labels.trace_ids[i]);
    }
    return {groups.begin(), groups.end()};
}

/// Per-bin RMSE recomputed observation by observation.
inline std::vector<carpool::BinRmse> rmse(const std::vector<carpool::ObservedWait>& observed,
                                          const carpool::WaitProfile& predicted) {
    std::vector<carpool::BinRmse> out;
    for (std::size_t j = 0; j < predicted.waits.size(); ++j) {
        if (!predicted.waits[j]) {
            continue;
        }
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& o : observed) {
            const auto bin = predicted.grid.bin_of(o.request);
            if (bin && *bin == j) {
                sum += (o.wait_minutes - *predicted.waits[j]) * (o.wait_minutes - *predicted.waits[j]);
                ++count;
            }
        }
        if (count > 0) {
            out.push_back({j, count, std::sqrt(sum / static_cast<double>(count))});
        }
    }
    return out;
}

}  // namespace oracle

#endif  // CARPOOL_TESTS_ORACLES_HPP
