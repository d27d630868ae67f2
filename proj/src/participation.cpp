#include "carpool/participation.hpp"

#include "carpool/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <optional>
#include <set>
#include <thread>

namespace carpool {

namespace {

constexpr double kSegmentSampling = 50.0;
constexpr double kEndpointTolerance = 100.0;

}  // namespace

OdMatrix::OdMatrix(std::vector<OdEntry> entries) : entries_(std::move(entries)) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : entries_) {
        if (!seen.emplace(e.origin_id, e.destination_id).second) {
            throw Error(ErrorCode::DuplicateId,
                        fmt::format("duplicate OD pair {} -> {}", e.origin_id, e.destination_id));
        }
        if (!std::isfinite(e.count) || e.count < 0) {
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("OD pair {} -> {} has invalid count {}", e.origin_id, e.destination_id, e.count));
        }
        if (!e.origin.valid() || !e.destination.valid()) {
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("OD pair {} -> {} has out-of-range centroids", e.origin_id, e.destination_id));
        }
    }
}

const OdEntry* OdMatrix::find(std::string_view origin_id, std::string_view destination_id) const {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const OdEntry& e) {
        return e.origin_id == origin_id && e.destination_id == destination_id;
    });
    return it == entries_.end() ? nullptr : &*it;
}

std::vector<GeoPoint> StraightLineRouter::route(const GeoPoint& from, const GeoPoint& to, Instant) const {
    if (!from.valid() || !to.valid()) {
        throw Error(ErrorCode::RoutingFailed, "endpoint out of range");
    }
    const double d = great_circle_distance(from, to);
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(d / spacing_m_)));
    std::vector<GeoPoint> out;
    out.reserve(pieces + 1);
    for (std::size_t i = 0; i <= pieces; ++i) {
        out.push_back(great_circle_interpolate(from, to, static_cast<double>(i) / static_cast<double>(pieces)));
    }
    out.front() = from;
    out.back() = to;
    return out;
}

RouteInference infer_routes(const OdMatrix& od, const RouterClient& router, Instant departure,
                            std::size_t max_in_flight) {
    std::vector<const OdEntry*> todo;
    for (const auto& e : od.entries()) {
        if (e.count > 0) {
            todo.push_back(&e);
        }
    }
    std::vector<std::optional<RoutePlan>> plans(todo.size());
    std::vector<std::optional<std::string>> errors(todo.size());

    auto work = [&](std::size_t i) {
        const OdEntry& e = *todo[i];
        try {
            auto polyline = router.route(e.origin, e.destination, departure);
            if (polyline.size() < 2) {
                throw Error(ErrorCode::RoutingFailed, "router returned fewer than two points");
            }
            if (planar_distance(polyline.front(), e.origin) > kEndpointTolerance ||
                planar_distance(polyline.back(), e.destination) > kEndpointTolerance) {
                throw Error(ErrorCode::RoutingFailed, "route endpoints are more than 100 m from the centroids");
            }
            plans[i] = RoutePlan{e.origin_id, e.destination_id, std::move(polyline), router.name()};
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(1, todo.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < todo.size(); i = next++) {
                work(i);
            }
        });
    }
    pool.clear();  // joins

    RouteInference out;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        if (plans[i]) {
            out.plans.push_back(std::move(*plans[i]));
        } else {
            out.failures.push_back({todo[i]->origin_id, todo[i]->destination_id, errors[i].value_or("unknown")});
        }
    }
    return out;
}

std::vector<GeoPoint> densify(std::span<const GeoPoint> polyline, double max_spacing_m) {
    std::vector<GeoPoint> out;
    if (polyline.empty()) {
        return out;
    }
    out.push_back(polyline.front());
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const GeoPoint& a = polyline[i - 1];
        const GeoPoint& b = polyline[i];
        const double d = planar_distance(a, b);
        auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(d / max_spacing_m)));
        auto at = [&](std::size_t k) {
            const double t = static_cast<double>(k) / static_cast<double>(pieces);
            return GeoPoint{a.lon + t * (b.lon - a.lon), a.lat + t * (b.lat - a.lat)};
        };
        // Interpolating in degrees is not uniform in metres; the widest piece
        // is at one end, so grow until both ends fit.
        while (planar_distance(at(0), at(1)) > max_spacing_m ||
               planar_distance(at(pieces - 1), at(pieces)) > max_spacing_m) {
            ++pieces;
        }
        for (std::size_t k = 1; k <= pieces; ++k) {
            out.push_back(at(k));
        }
    }
    return out;
}

bool passes_in_order(std::span<const GeoPoint> polyline, std::span<const GeoPoint> nodes, double radius_m) {
    const auto dense = densify(polyline, kSegmentSampling);
    std::size_t next = 0;
    // Earliest entry into each buffer in turn; greedy is optimal for subsequences.
    for (const GeoPoint& p : dense) {
        if (next == nodes.size()) {
            break;
        }
        if (planar_distance(p, nodes[next]) <= radius_m) {
            ++next;
        }
    }
    return next == nodes.size();
}

double coincident_flow(std::span<const RoutePlan> routes, const OdMatrix& od, const CarpoolLine& line,
                       const CarpoolNetwork& network, double radius_m, Execution exec) {
    if (!(radius_m > 0)) {
        throw Error(ErrorCode::InvalidArgument, "buffer radius must be positive");
    }
    std::vector<std::vector<GeoPoint>> variant_points;
    for (const auto& v : line_variants(network, line)) {
        std::vector<GeoPoint> pts;
        for (const auto& id : v.node_ids()) {
            pts.push_back(network.node(id).location);
        }
        variant_points.push_back(std::move(pts));
    }

    std::vector<double> contribution(routes.size(), 0.0);
    auto evaluate = [&](std::size_t i) {
        const RoutePlan& r = routes[i];
        const OdEntry* e = od.find(r.origin_id, r.destination_id);
        if (e == nullptr) {
            return;
        }
        for (const auto& pts : variant_points) {
            if (passes_in_order(r.polyline, pts, radius_m)) {
                contribution[i] = e->count;
                return;
            }
        }
    };
    const auto n = static_cast<std::ptrdiff_t>(routes.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            evaluate(static_cast<std::size_t>(i));
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            evaluate(static_cast<std::size_t>(i));
        }
    }
    // Summed in route order so the total does not depend on scheduling.
    double total = 0.0;
    for (const double c : contribution) {
        total += c;
    }
    return total;
}

double participation_rate(double n, double n0) {
    if (!(n0 > 0)) {
        throw Error(ErrorCode::ZeroPopulation, "route-inferred driver population is zero");
    }
    if (!(n >= 0)) {
        throw Error(ErrorCode::InvalidArgument, "driver count must be non-negative");
    }
    return n / n0;
}

ParticipationReport participation_report(double n, double n0) {
    ParticipationReport r{n, n0, participation_rate(n, n0), {}};
    if (r.rate > 1.0) {
        r.warnings.push_back(
            fmt::format("participation rate {:.4f} exceeds 1: more geolocated drivers than the OD population", r.rate));
    }
    return r;
}

}  // namespace carpool
