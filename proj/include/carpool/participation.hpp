#ifndef CARPOOL_PARTICIPATION_HPP
#define CARPOOL_PARTICIPATION_HPP

#include "carpool/execution.hpp"
#include "carpool/geo.hpp"
#include "carpool/network.hpp"
#include "carpool/time.hpp"

#include <span>
#include <string>
#include <vector>

namespace carpool {

struct OdEntry {
    std::string origin_id;
    std::string destination_id;
    double count = 0.0;
    GeoPoint origin;       ///< zone centroid
    GeoPoint destination;  ///< zone centroid

    friend bool operator==(const OdEntry&, const OdEntry&) = default;
};

/// Origin-destination journey counts. Pairs are unique, counts finite and >= 0.
class OdMatrix {
public:
    OdMatrix() = default;
    /// Throws DuplicateId or InvariantViolation.
    explicit OdMatrix(std::vector<OdEntry> entries);

    std::span<const OdEntry> entries() const noexcept { return entries_; }
    const OdEntry* find(std::string_view origin_id, std::string_view destination_id) const;

private:
    std::vector<OdEntry> entries_;
};

struct RoutePlan {
    std::string origin_id;
    std::string destination_id;
    std::vector<GeoPoint> polyline;
    std::string source;
};

/// Anything that can produce a driving polyline between two points.
/// Implementations signal failure by throwing Error(RoutingFailed).
class RouterClient {
public:
    virtual ~RouterClient() = default;
    virtual std::vector<GeoPoint> route(const GeoPoint& from, const GeoPoint& to, Instant departure) const = 0;
    virtual std::string name() const = 0;
};

/// Offline router: the great circle between the endpoints, densified so that
/// consecutive points are at most `spacing_m` apart.
class StraightLineRouter final : public RouterClient {
public:
    explicit StraightLineRouter(double spacing_m = 100.0) : spacing_m_(spacing_m) {}

    std::vector<GeoPoint> route(const GeoPoint& from, const GeoPoint& to, Instant departure) const override;
    std::string name() const override { return "straight-line"; }

private:
    double spacing_m_;
};

struct RoutingFailure {
    std::string origin_id;
    std::string destination_id;
    std::string message;
};

struct RouteInference {
    std::vector<RoutePlan> plans;  ///< in OD-matrix order
    std::vector<RoutingFailure> failures;
};

/// Routes every OD entry with a positive count. Failures are collected per
/// entry; the batch never aborts. At most `max_in_flight` requests run at
/// once.
RouteInference infer_routes(const OdMatrix& od, const RouterClient& router, Instant departure,
                            std::size_t max_in_flight = 4);

/// Densifies a polyline so no gap exceeds `max_spacing_m`.
std::vector<GeoPoint> densify(std::span<const GeoPoint> polyline, double max_spacing_m);

/// True when the polyline, sampled at <= 50 m, enters the buffers of `nodes`
/// in that order.
bool passes_in_order(std::span<const GeoPoint> polyline, std::span<const GeoPoint> nodes, double radius_m);

/// Sum of OD counts whose route passes within `radius_m` of every node of some
/// line variant, in variant order.
double coincident_flow(std::span<const RoutePlan> routes, const OdMatrix& od, const CarpoolLine& line,
                       const CarpoolNetwork& network, double radius_m = 1000.0,
                       Execution exec = Execution::parallel);

/// n / n0. Throws ZeroPopulation when n0 <= 0.
double participation_rate(double n, double n0);

struct ParticipationReport {
    double n = 0.0;   ///< geolocated drivers per day
    double n0 = 0.0;  ///< route-inferred driver population
    double rate = 0.0;
    std::vector<std::string> warnings;
};

/// participation_rate plus data-quality warnings (rate above 1 means the two
/// surveys disagree; it is reported, not rejected).
ParticipationReport participation_report(double n, double n0);

}  // namespace carpool

#endif  // CARPOOL_PARTICIPATION_HPP
