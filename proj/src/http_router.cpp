#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "carpool/http_router.hpp"

#include "carpool/error.hpp"

#include <httplib.h>
#include <json.hpp>
#include <openssl/sha.h>

#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace carpool {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

std::string sha256_hex(const std::string& text) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (const unsigned char c : digest) {
        out += fmt::format("{:02x}", c);
    }
    return out;
}

std::string cache_key(const GeoPoint& from, const GeoPoint& to, Instant departure) {
    return sha256_hex(fmt::format("{:.6f},{:.6f};{:.6f},{:.6f}@{}", from.lon, from.lat, to.lon, to.lat,
                                  format_iso8601(departure)));
}

}  // namespace

HttpRouterConfig HttpRouterConfig::from_env() {
    HttpRouterConfig c;
    const char* url = std::getenv("ROUTER_URL");
    if (url == nullptr || *url == '\0') {
        throw Error(ErrorCode::InvalidArgument, "ROUTER_URL is not set");
    }
    c.url_template = url;
    if (const char* key = std::getenv("ROUTER_API_KEY")) {
        c.api_key = key;
    }
    return c;
}

HttpRouter::HttpRouter(HttpRouterConfig config) : config_(std::move(config)) {
    if (config_.url_template.empty()) {
        throw Error(ErrorCode::InvalidArgument, "router URL template is empty");
    }
    if (config_.cache_dir) {
        std::filesystem::create_directories(*config_.cache_dir);
    }
}

std::string HttpRouter::request_url(const GeoPoint& from, const GeoPoint& to, Instant departure) const {
    std::string url = config_.url_template;
    replace_all(url, "{origin_lon}", fmt::format("{:.6f}", from.lon));
    replace_all(url, "{origin_lat}", fmt::format("{:.6f}", from.lat));
    replace_all(url, "{dest_lon}", fmt::format("{:.6f}", to.lon));
    replace_all(url, "{dest_lat}", fmt::format("{:.6f}", to.lat));
    replace_all(url, "{departure}", format_iso8601(departure));
    replace_all(url, "{key}", config_.api_key);
    return url;
}

std::vector<GeoPoint> HttpRouter::parse_response(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::RoutingFailed, fmt::format("router response is not JSON: {}", e.what()));
    }
    std::vector<GeoPoint> out;
    try {
        const auto& routes = doc.at("routes");
        if (routes.empty()) {
            throw Error(ErrorCode::RoutingFailed, "router returned no routes");
        }
        const auto& r = routes.at(0);
        if (r.contains("geometry")) {
            for (const auto& c : r.at("geometry").at("coordinates")) {
                out.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
            }
        } else {
            for (const auto& leg : r.at("legs")) {
                for (const auto& p : leg.at("points")) {
                    out.push_back({p.at("longitude").get<double>(), p.at("latitude").get<double>()});
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::RoutingFailed, fmt::format("unexpected router response: {}", e.what()));
    }
    for (const auto& p : out) {
        if (!p.valid()) {
            throw Error(ErrorCode::RoutingFailed, "router returned out-of-range coordinates");
        }
    }
    return out;
}

std::optional<std::string> HttpRouter::cached(const std::string& key) const {
    if (!config_.cache_dir) {
        return std::nullopt;
    }
    std::ifstream in(*config_.cache_dir / (key + ".json"), std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void HttpRouter::store(const std::string& key, const std::string& body) const {
    if (!config_.cache_dir) {
        return;
    }
    std::lock_guard lock(cache_write_);
    const auto final_path = *config_.cache_dir / (key + ".json");
    const auto tmp = *config_.cache_dir / (key + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << body;
        if (!out) {
            return;  // a cache miss next time is harmless
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, final_path, ec);
}

std::vector<GeoPoint> HttpRouter::route(const GeoPoint& from, const GeoPoint& to, Instant departure) const {
    const std::string key = cache_key(from, to, departure);
    if (auto body = cached(key)) {
        return parse_response(*body);
    }

    const std::string url = request_url(from, to, departure);
    static const std::regex split(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, split)) {
        throw Error(ErrorCode::RoutingFailed, fmt::format("cannot parse router URL '{}'", url));
    }
    httplib::Client client(m[1].str());
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    const std::string path = m[2].matched ? m[2].str() : "/";
    auto res = client.Get(path);
    if (!res) {
        throw Error(ErrorCode::RoutingFailed,
                    fmt::format("router request failed: {}", httplib::to_string(res.error())));
    }
    if (res->status != 200) {
        throw Error(ErrorCode::RoutingFailed, fmt::format("router answered HTTP {}", res->status));
    }
    auto polyline = parse_response(res->body);
    store(key, res->body);
    return polyline;
}

}  // namespace carpool
