#include "carpool/simulate.hpp"

#include "carpool/error.hpp"
#include "carpool/random.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace carpool {

ArrivalModel ArrivalModel::from_flow(const FlowProfile& flow, std::uint64_t seed, double willingness) {
    ArrivalModel m{flow.grid, {}, seed, willingness};
    m.rate_per_minute.reserve(flow.counts.size());
    for (const double c : flow.counts) {
        m.rate_per_minute.push_back(c / flow.grid.bin_minutes());
    }
    return m;
}

namespace {

SimulatedWait simulate_one(const ArrivalModel& model, Instant request, std::optional<Minutes> horizon,
                           std::uint64_t index) {
    Xoshiro256 rng = Xoshiro256::stream(model.seed, index);
    const TimeGrid& grid = model.grid;
    // Work in minutes since midnight of the request's day.
    const double start = static_cast<double>(time_of_day(request).count()) / 60.0;
    const double window_end = static_cast<double>(grid.window().end().count()) / 60.0;
    const double cutoff = horizon ? start + static_cast<double>(horizon->count()) : window_end;
    const double bin = grid.bin_minutes();
    const double window_begin = static_cast<double>(grid.window().begin().count()) / 60.0;

    double t = start;
    while (t < cutoff && t < window_end) {
        const auto j = static_cast<std::size_t>((t - window_begin) / bin);
        const double bin_end = std::min(window_begin + bin * static_cast<double>(j + 1), window_end);
        const double rate = model.rate_per_minute[j] * model.willingness;
        const double segment_end = std::min(bin_end, cutoff);
        if (rate > 0.0) {
            // Memorylessness: a fresh draw at each boundary is exact.
            const double gap = rng.exponential(rate);
            if (t + gap < segment_end) {
                return {request, t + gap - start, false};
            }
        }
        t = segment_end;
    }
    return {request, cutoff - start, true};
}

}  // namespace

std::vector<SimulatedWait> simulate_waits(const ArrivalModel& model, std::span<const Instant> requests,
                                          std::optional<Minutes> horizon, Execution exec) {
    if (model.rate_per_minute.size() != model.grid.bin_count()) {
        throw Error(ErrorCode::InvalidArgument, "arrival model needs one rate per bin");
    }
    for (const double r : model.rate_per_minute) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw Error(ErrorCode::InvalidArgument, "arrival rates must be finite and non-negative");
        }
    }
    if (!(model.willingness >= 0.0 && model.willingness <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "willingness must lie in [0, 1]");
    }
    if (horizon && *horizon <= Minutes{0}) {
        throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    }
    for (const Instant r : requests) {
        if (!model.grid.window().contains(r)) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("request at {} is outside the modeled window", format_iso8601(r)));
        }
    }

    std::vector<SimulatedWait> out(requests.size());
    const auto n = static_cast<std::ptrdiff_t>(requests.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            out[k] = simulate_one(model, requests[k], horizon, k);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            out[k] = simulate_one(model, requests[k], horizon, k);
        }
    }
    return out;
}

namespace {

[[noreturn]] void infeasible(const std::string& why) {
    throw Error(ErrorCode::InfeasibleScenario, why);
}

double norm(const PlanarXY& v) { return std::hypot(v.x, v.y); }

PlanarXY unit_from(const PlanarXY& from, const PlanarXY& to) {
    const PlanarXY d{to.x - from.x, to.y - from.y};
    const double len = norm(d);
    return {d.x / len, d.y / len};
}

struct RouteGeometry {
    LocalProjection projection;
    std::vector<PlanarXY> nodes;        // route meeting points
    std::vector<double> segment_times;  // seconds between consecutive route nodes
    double shift_s = 0;                 // worst-case drift of an estimated arrival
    double margin_s = 0;                // distance kept from bin edges
    double travel_s = 0;                // first to last route node
};

std::vector<std::string> resolve_route(const SyntheticScenario& sc) {
    const auto variants = line_variants(sc.network, sc.line);
    if (variants.empty()) {
        infeasible(fmt::format("line '{}' has no path in the network", sc.line.label()));
    }
    if (sc.route.empty()) {
        auto best = std::max_element(variants.begin(), variants.end(),
                                     [](const CarpoolLine& a, const CarpoolLine& b) { return a.size() < b.size(); });
        return {best->node_ids().begin(), best->node_ids().end()};
    }
    const CarpoolLine wanted(sc.route);
    if (std::find(variants.begin(), variants.end(), wanted) == variants.end()) {
        infeasible(fmt::format("route '{}' is not a variant of line '{}'", wanted.label(), sc.line.label()));
    }
    return sc.route;
}

RouteGeometry analyse(const SyntheticScenario& sc, const std::vector<std::string>& route) {
    if (!(sc.buffer_radius_m > 0)) {
        infeasible("buffer radius must be positive");
    }
    if (!(sc.gps_noise_m >= 0)) {
        infeasible("GPS noise must be non-negative");
    }
    if (sc.gps_noise_m > sc.buffer_radius_m / 4) {
        infeasible(fmt::format("GPS noise {} m could push the closest sample out of a {} m buffer (limit radius/4)",
                               sc.gps_noise_m, sc.buffer_radius_m));
    }
    if (sc.sampling_period_s < 1 || !(sc.speed_mps > 0)) {
        infeasible("sampling period and speed must be positive");
    }
    RouteGeometry g{LocalProjection(sc.network.node(route.front()).location), {}, {}, 0, 0, 0};
    for (const auto& id : route) {
        g.nodes.push_back(g.projection.forward(sc.network.node(id).location));
    }
    const double clip = 3.0 * sc.gps_noise_m;
    const double step = sc.speed_mps * sc.sampling_period_s;
    // A sample k steps from the node pass can only look closer if k*step < 2*clip.
    g.shift_s = 2.0 * clip / sc.speed_mps;
    g.margin_s = std::ceil(g.shift_s) + sc.sampling_period_s;
    if (step / 2 + clip > sc.buffer_radius_m) {
        infeasible("sampling step too coarse for the buffer radius");
    }
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        const double dist = norm({g.nodes[i].x - g.nodes[i - 1].x, g.nodes[i].y - g.nodes[i - 1].y});
        const double secs = dist / sc.speed_mps;
        if (secs <= 2.0 * (g.shift_s + sc.sampling_period_s)) {
            infeasible(fmt::format("meeting points '{}' and '{}' are too close to order arrivals", route[i - 1],
                                   route[i]));
        }
        g.segment_times.push_back(secs);
        g.travel_s += secs;
    }
    if (2.0 * g.margin_s >= static_cast<double>(Seconds(sc.grid.bin_length()).count())) {
        infeasible("bins are too short for the arrival-time margin");
    }
    return g;
}

PlanarXY scattered(const PlanarXY& center, double radius, Xoshiro256& rng) {
    const double r = radius * std::sqrt(rng.uniform01());
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

PlanarXY endpoint(const SyntheticScenario& sc, const RouteGeometry& g, const PlanarXY& center, double scatter,
                  Xoshiro256& rng) {
    const double keep_out = sc.buffer_radius_m + 3.0 * sc.gps_noise_m;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const PlanarXY p = scattered(center, scatter, rng);
        const GeoPoint geo = g.projection.inverse(p);
        const bool clear = std::none_of(sc.network.nodes().begin(), sc.network.nodes().end(),
                                        [&](const MeetingPoint& m) {
                                            return planar_distance(geo, m.location) <= keep_out;
                                        });
        if (clear) {
            return p;
        }
    }
    infeasible("could not place an origin/destination outside every buffer");
}

Trace build_trace(const SyntheticScenario& sc, const RouteGeometry& g, std::string id, Instant first_arrival,
                  std::uint64_t index) {
    Xoshiro256 rng = Xoshiro256::stream(sc.seed, index);
    const PlanarXY back = unit_from(g.nodes[1], g.nodes[0]);
    const PlanarXY ahead = unit_from(g.nodes[g.nodes.size() - 2], g.nodes.back());
    const PlanarXY origin_center{g.nodes.front().x + back.x * sc.origin_offset_m,
                                 g.nodes.front().y + back.y * sc.origin_offset_m};
    const PlanarXY dest_center{g.nodes.back().x + ahead.x * sc.destination_offset_m,
                               g.nodes.back().y + ahead.y * sc.destination_offset_m};

    std::vector<PlanarXY> polyline;
    polyline.push_back(endpoint(sc, g, origin_center, sc.origin_scatter_m, rng));
    polyline.insert(polyline.end(), g.nodes.begin(), g.nodes.end());
    polyline.push_back(endpoint(sc, g, dest_center, sc.destination_scatter_m, rng));

    std::vector<double> cumulative{0.0};
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        cumulative.push_back(cumulative.back() +
                             norm({polyline[i].x - polyline[i - 1].x, polyline[i].y - polyline[i - 1].y}));
    }
    const double at_first = cumulative[1];
    const double total = cumulative.back();
    const double step = sc.speed_mps * sc.sampling_period_s;
    const auto k_min = -static_cast<long>(std::floor(at_first / step));
    const auto k_max = static_cast<long>(std::floor((total - at_first) / step));

    const double clip = 3.0 * sc.gps_noise_m;
    std::vector<GpsSample> samples;
    samples.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    std::size_t seg = 1;
    for (long k = k_min; k <= k_max; ++k) {
        const double along = at_first + static_cast<double>(k) * step;
        while (seg + 1 < cumulative.size() && cumulative[seg] < along) {
            ++seg;
        }
        const double seg_len = cumulative[seg] - cumulative[seg - 1];
        const double f = seg_len > 0 ? std::clamp((along - cumulative[seg - 1]) / seg_len, 0.0, 1.0) : 0.0;
        PlanarXY p{polyline[seg - 1].x + f * (polyline[seg].x - polyline[seg - 1].x),
                   polyline[seg - 1].y + f * (polyline[seg].y - polyline[seg - 1].y)};
        if (sc.gps_noise_m > 0) {
            auto [nx, ny] = rng.normal_pair();
            nx *= sc.gps_noise_m;
            ny *= sc.gps_noise_m;
            const double mag = std::hypot(nx, ny);
            if (mag > clip) {
                nx *= clip / mag;
                ny *= clip / mag;
            }
            p.x += nx;
            p.y += ny;
        }
        samples.push_back({g.projection.inverse(p), first_arrival + Seconds{k * sc.sampling_period_s}});
    }
    if (samples.size() < 2) {
        infeasible("route too short for the sampling period");
    }
    return Trace(std::move(id), std::move(samples));
}

}  // namespace

DailyWindow scenario_match_window(const SyntheticScenario& sc) {
    const RouteGeometry g = analyse(sc, resolve_route(sc));
    const double tail = g.travel_s + g.shift_s + sc.sampling_period_s;
    const auto end_s = sc.grid.window().end().count() + static_cast<long>(std::ceil(tail / 60.0)) * 60;
    if (end_s > 86400) {
        infeasible("arrivals would run past midnight");
    }
    return DailyWindow(sc.grid.window().begin(), Seconds{end_s});
}

std::vector<Trace> generate_traces(const SyntheticScenario& sc) {
    if (sc.target_flow.size() != sc.grid.bin_count()) {
        infeasible("target flow needs one entry per bin");
    }
    if (sc.day_count < 1) {
        infeasible("day_count must be at least 1");
    }
    std::vector<long> totals;
    for (const double f : sc.target_flow) {
        const double total = f * sc.day_count;
        if (!(f >= 0) || std::abs(total - std::round(total)) > 1e-6) {
            infeasible(fmt::format("flow {} over {} days is not a whole number of traces", f, sc.day_count));
        }
        totals.push_back(std::lround(total));
    }
    const auto route = resolve_route(sc);
    const RouteGeometry g = analyse(sc, route);
    (void)scenario_match_window(sc);  // validates the midnight bound

    const auto bin_s = static_cast<double>(Seconds(sc.grid.bin_length()).count());
    const double usable = bin_s - 2.0 * g.margin_s;

    std::vector<Trace> traces;
    std::uint64_t index = 0;
    for (int day = 0; day < sc.day_count; ++day) {
        const Instant midnight{sc.first_day + std::chrono::days{day}};
        for (std::size_t j = 0; j < totals.size(); ++j) {
            const long per_day = totals[j] / sc.day_count + (day < totals[j] % sc.day_count ? 1 : 0);
            const Instant bin_start = midnight + sc.grid.bin_begin(j);
            for (long i = 0; i < per_day; ++i) {
                const double offset = g.margin_s + std::floor((static_cast<double>(i) + 0.5) * usable /
                                                               static_cast<double>(per_day));
                const Instant arrival = bin_start + Seconds{static_cast<long>(offset)};
                traces.push_back(build_trace(sc, g, fmt::format("syn-{:06d}", index), arrival, index));
                ++index;
            }
        }
    }
    return traces;
}

}  // namespace carpool
