#include "carpool/geo.hpp"

#include "carpool/error.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace carpool {

bool within_buffer(const GeoPoint& p, const GeoPoint& center, double radius_m) {
    if (!(radius_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("buffer radius must be positive, got {}", radius_m));
    }
    return planar_distance(p, center) <= radius_m;
}

double great_circle_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(s)));
}

GeoPoint great_circle_interpolate(const GeoPoint& a, const GeoPoint& b, double t) noexcept {
    const double delta = great_circle_distance(a, b) / kEarthRadiusMeters;
    if (delta < 1e-12) {
        return a;
    }
    const double phi1 = a.lat * kDegToRad, lambda1 = a.lon * kDegToRad;
    const double phi2 = b.lat * kDegToRad, lambda2 = b.lon * kDegToRad;
    const double wa = std::sin((1.0 - t) * delta) / std::sin(delta);
    const double wb = std::sin(t * delta) / std::sin(delta);
    const double x = wa * std::cos(phi1) * std::cos(lambda1) + wb * std::cos(phi2) * std::cos(lambda2);
    const double y = wa * std::cos(phi1) * std::sin(lambda1) + wb * std::cos(phi2) * std::sin(lambda2);
    const double z = wa * std::sin(phi1) + wb * std::sin(phi2);
    return GeoPoint{std::atan2(y, x) / kDegToRad, std::atan2(z, std::hypot(x, y)) / kDegToRad};
}

LocalProjection::LocalProjection(GeoPoint reference) noexcept
    : reference_(reference),
      meters_per_deg_lon_(kEarthRadiusMeters * std::cos(reference.lat * kDegToRad) * kDegToRad),
      meters_per_deg_lat_(kEarthRadiusMeters * kDegToRad) {}

PlanarXY LocalProjection::forward(const GeoPoint& p) const noexcept {
    return {(p.lon - reference_.lon) * meters_per_deg_lon_, (p.lat - reference_.lat) * meters_per_deg_lat_};
}

GeoPoint LocalProjection::inverse(const PlanarXY& xy) const noexcept {
    return {reference_.lon + xy.x / meters_per_deg_lon_, reference_.lat + xy.y / meters_per_deg_lat_};
}

Trace::Trace(std::string id, std::vector<GpsSample> samples) : id_(std::move(id)), samples_(std::move(samples)) {
    if (samples_.size() < 2) {
        throw Error(ErrorCode::InvariantViolation,
                    fmt::format("trace '{}' needs at least 2 samples, has {}", id_, samples_.size()));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!samples_[i].position.valid()) {
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("trace '{}' sample {} has out-of-range coordinates", id_, i));
        }
        if (i > 0 && samples_[i].timestamp < samples_[i - 1].timestamp) {
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("trace '{}' timestamps decrease at sample {}", id_, i));
        }
    }
}

}  // namespace carpool
