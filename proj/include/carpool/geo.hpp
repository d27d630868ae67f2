#ifndef CARPOOL_GEO_HPP
#define CARPOOL_GEO_HPP

#include "carpool/time.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace carpool {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

struct GeoPoint {
    double lon = 0.0;  ///< degrees, [-180, 180]
    double lat = 0.0;  ///< degrees, [-90, 90]

    bool valid() const noexcept {
        return std::isfinite(lon) && std::isfinite(lat) && lon >= -180.0 && lon <= 180.0 &&
               lat >= -90.0 && lat <= 90.0;
    }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct GpsSample {
    GeoPoint position;
    Instant timestamp;

    friend bool operator==(const GpsSample&, const GpsSample&) = default;
};

/// Equirectangular distance in meters, evaluated at the mean latitude.
/// Within 0.5% of the great-circle distance below ~50 km at |lat| < 60.
inline double planar_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double lat_mid = 0.5 * (a.lat + b.lat) * kDegToRad;
    const double dx = kEarthRadiusMeters * std::cos(lat_mid) * (b.lon - a.lon) * kDegToRad;
    const double dy = kEarthRadiusMeters * (b.lat - a.lat) * kDegToRad;
    return std::sqrt(dx * dx + dy * dy);
}

/// Inclusive: a point exactly `radius` away is inside.
bool within_buffer(const GeoPoint& p, const GeoPoint& center, double radius_m);

/// Great-circle distance on the spherical earth.
double great_circle_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Point at fraction `t` along the great circle from a to b.
GeoPoint great_circle_interpolate(const GeoPoint& a, const GeoPoint& b, double t) noexcept;

/// Local east/north coordinates in meters.
struct PlanarXY {
    double x = 0.0;
    double y = 0.0;
};

/// Equirectangular projection about a fixed reference point.
class LocalProjection {
public:
    explicit LocalProjection(GeoPoint reference) noexcept;

    PlanarXY forward(const GeoPoint& p) const noexcept;
    GeoPoint inverse(const PlanarXY& xy) const noexcept;
    const GeoPoint& reference() const noexcept { return reference_; }

private:
    GeoPoint reference_;
    double meters_per_deg_lon_;
    double meters_per_deg_lat_;
};

/// One driver journey: at least two samples with non-decreasing timestamps.
class Trace {
public:
    /// Throws InvariantViolation when the samples break the invariants.
    Trace(std::string id, std::vector<GpsSample> samples);

    const std::string& id() const noexcept { return id_; }
    std::span<const GpsSample> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const GpsSample& origin() const noexcept { return samples_.front(); }
    const GpsSample& destination() const noexcept { return samples_.back(); }

    friend bool operator==(const Trace&, const Trace&) = default;

private:
    std::string id_;
    std::vector<GpsSample> samples_;
};

}  // namespace carpool

#endif  // CARPOOL_GEO_HPP
