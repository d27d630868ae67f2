#ifndef CARPOOL_HTTP_ROUTER_HPP
#define CARPOOL_HTTP_ROUTER_HPP

#include "carpool/participation.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace carpool {

struct HttpRouterConfig {
    /// e.g. "https://router.example/route/{origin_lon},{origin_lat};{dest_lon},{dest_lat}?depart={departure}&key={key}"
    /// Placeholders: {origin_lon} {origin_lat} {dest_lon} {dest_lat} {departure} {key}.
    std::string url_template;
    std::string api_key;
    std::chrono::seconds timeout{10};
    /// Responses are cached here when set.
    std::optional<std::filesystem::path> cache_dir;

    /// Reads ROUTER_URL and ROUTER_API_KEY. Throws InvalidArgument when
    /// ROUTER_URL is unset.
    static HttpRouterConfig from_env();
};

/// Generic HTTP routing client. Understands two response shapes:
/// GeoJSON-style `routes[0].geometry.coordinates` ([lon, lat] pairs) and
/// `routes[0].legs[*].points[*]` objects with `latitude`/`longitude`.
class HttpRouter final : public RouterClient {
public:
    explicit HttpRouter(HttpRouterConfig config);

    std::vector<GeoPoint> route(const GeoPoint& from, const GeoPoint& to, Instant departure) const override;
    std::string name() const override { return "http"; }

    std::string request_url(const GeoPoint& from, const GeoPoint& to, Instant departure) const;
    static std::vector<GeoPoint> parse_response(const std::string& body);

private:
    std::optional<std::string> cached(const std::string& key) const;
    void store(const std::string& key, const std::string& body) const;

    HttpRouterConfig config_;
    mutable std::mutex cache_write_;
};

}  // namespace carpool

#endif  // CARPOOL_HTTP_ROUTER_HPP
