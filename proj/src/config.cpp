#include "carpool/config.hpp"

#include "carpool/error.hpp"
#include "carpool/time.hpp"

#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <set>

namespace carpool {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, std::string_view where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("unknown config key '{}{}'", where, key));
        }
    }
}

template <typename T>
void get(const json& obj, const char* key, T& out) {
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

template <typename T>
void get(const json& obj, const char* key, std::optional<T>& out) {
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

void get_path(const json& obj, const char* key, const std::filesystem::path& base, std::filesystem::path& out) {
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        const std::filesystem::path p = it->get<std::string>();
        out = p.is_absolute() ? p : base / p;
    }
}

}  // namespace

std::pair<std::string, std::string> split_window(const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("window '{}' is not HH:MM-HH:MM", text));
    }
    std::pair<std::string, std::string> out{text.substr(0, dash), text.substr(dash + 1)};
    try {
        make_window(out.first, out.second);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("window '{}': {}", text, e.what()));
    }
    return out;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, fmt::format("cannot open config '{}'", path.string()));
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    if (!doc.is_object()) {
        throw ParseError(path.string(), 0, "config must be a JSON object");
    }
    const auto base = std::filesystem::absolute(path).parent_path();

    PipelineConfig c;
    try {
        reject_unknown(doc,
                       {"nodes", "edges", "traces", "od_matrix", "observed_waits", "line", "window", "match_window", "sub_window",
                        "bin_minutes", "buffer_radius_m", "operating_days", "day_count", "cut_height_m",
                        "output_dir", "departure", "router", "matchprob", "simulate", "seed", "threads"},
                       "");
        get_path(doc, "nodes", base, c.nodes);
        get_path(doc, "edges", base, c.edges);
        get_path(doc, "traces", base, c.traces);
        get_path(doc, "od_matrix", base, c.od_matrix);
        get_path(doc, "observed_waits", base, c.observed_waits);
        get_path(doc, "output_dir", base, c.output_dir);
        get(doc, "line", c.line);
        if (const auto it = doc.find("window"); it != doc.end()) {
            std::tie(c.window_begin, c.window_end) = split_window(it->get<std::string>());
        }
        if (const auto it = doc.find("match_window"); it != doc.end() && !it->is_null()) {
            const auto [b, e] = split_window(it->get<std::string>());
            c.match_window_begin = b;
            c.match_window_end = e;
        }
        if (const auto it = doc.find("sub_window"); it != doc.end() && !it->is_null()) {
            const auto [b, e] = split_window(it->get<std::string>());
            c.sub_window_begin = b;
            c.sub_window_end = e;
        }
        get(doc, "bin_minutes", c.bin_minutes);
        get(doc, "buffer_radius_m", c.buffer_radius_m);
        get(doc, "operating_days", c.operating_days);
        get(doc, "day_count", c.day_count);
        get(doc, "cut_height_m", c.cut_height_m);
        get(doc, "departure", c.departure);
        get(doc, "seed", c.seed);
        get(doc, "threads", c.threads);

        if (const auto it = doc.find("router"); it != doc.end()) {
            const json& r = *it;
            reject_unknown(r, {"kind", "spacing_m", "timeout_s", "cache_dir", "max_in_flight"}, "router.");
            get(r, "kind", c.router.kind);
            get(r, "spacing_m", c.router.spacing_m);
            get(r, "timeout_s", c.router.timeout_s);
            get(r, "max_in_flight", c.router.max_in_flight);
            std::filesystem::path cache;
            get_path(r, "cache_dir", base, cache);
            if (!cache.empty()) {
                c.router.cache_dir = cache;
            }
        }
        if (const auto it = doc.find("matchprob"); it != doc.end()) {
            reject_unknown(*it, {"n", "samples"}, "matchprob.");
            get(*it, "n", c.matchprob.n);
            get(*it, "samples", c.matchprob.samples);
        }
        if (const auto it = doc.find("simulate"); it != doc.end()) {
            const json& s = *it;
            reject_unknown(s,
                           {"target_flow", "route", "day_count", "first_day", "gps_noise_m", "sampling_period_s",
                            "speed_mps", "origin_offset_m", "origin_scatter_m", "destination_offset_m",
                            "destination_scatter_m", "requests_per_bin", "willingness"},
                           "simulate.");
            auto& m = c.simulate;
            get(s, "target_flow", m.target_flow);
            get(s, "route", m.route);
            get(s, "day_count", m.day_count);
            get(s, "first_day", m.first_day);
            get(s, "gps_noise_m", m.gps_noise_m);
            get(s, "sampling_period_s", m.sampling_period_s);
            get(s, "speed_mps", m.speed_mps);
            get(s, "origin_offset_m", m.origin_offset_m);
            get(s, "origin_scatter_m", m.origin_scatter_m);
            get(s, "destination_offset_m", m.destination_offset_m);
            get(s, "destination_scatter_m", m.destination_scatter_m);
            get(s, "requests_per_bin", m.requests_per_bin);
            get(s, "willingness", m.willingness);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("config '{}': {}", path.string(), e.what()));
    }
    return c;
}

}  // namespace carpool
