#include "carpool/simplify.hpp"

#include "carpool/error.hpp"

#include <fmt/format.h>
#include <limits>

namespace carpool {

namespace {

struct Closest {
    std::size_t sample = 0;
    double distance = std::numeric_limits<double>::infinity();
};

}  // namespace

std::map<std::string, std::vector<GpsSample>> intersect_buffers(const Trace& trace, const CarpoolNetwork& network,
                                                                double radius_m) {
    if (!(radius_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "buffer radius must be positive");
    }
    std::map<std::string, std::vector<GpsSample>> out;
    for (const auto& mp : network.nodes()) {
        std::vector<GpsSample> inside;
        for (const auto& s : trace.samples()) {
            if (planar_distance(s.position, mp.location) <= radius_m) {
                inside.push_back(s);
            }
        }
        if (!inside.empty()) {
            out.emplace(mp.id, std::move(inside));
        }
    }
    return out;
}

MeetingPointPass estimate_arrival(const Trace& trace, const MeetingPoint& point, double radius_m) {
    if (!(radius_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "buffer radius must be positive");
    }
    const auto samples = trace.samples();
    Closest best;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = planar_distance(samples[i].position, point.location);
        // Strict comparison keeps the earliest sample on ties.
        if (d < best.distance) {
            best = {i, d};
        }
    }
    if (best.distance > radius_m) {
        throw Error(ErrorCode::NoIntersection,
                    fmt::format("trace '{}' never enters the {} m buffer of '{}'", trace.id(), radius_m, point.id));
    }
    return MeetingPointPass{point.id, samples[best.sample], best.distance};
}

LineMatcher::LineMatcher(const CarpoolNetwork& network, CarpoolLine line, double radius_m, DailyWindow window)
    : network_(&network), line_(std::move(line)), radius_(radius_m), window_(window) {
    if (!(radius_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "buffer radius must be positive");
    }
    variants_ = line_variants(network, line_);
    std::vector<int> slot_of(network.size(), -1);
    for (const auto& v : variants_) {
        std::vector<std::size_t> slots;
        for (const auto& id : v.node_ids()) {
            const std::size_t idx = *network.index_of(id);
            if (slot_of[idx] < 0) {
                slot_of[idx] = static_cast<int>(nodes_.size());
                nodes_.push_back(idx);
            }
            slots.push_back(static_cast<std::size_t>(slot_of[idx]));
        }
        variant_slots_.push_back(std::move(slots));
    }
}

std::optional<SimplifiedTrace> LineMatcher::match(const Trace& trace) const {
    if (variants_.empty()) {
        return std::nullopt;
    }
    const auto samples = trace.samples();
    std::vector<GeoPoint> centers;
    centers.reserve(nodes_.size());
    for (const std::size_t idx : nodes_) {
        centers.push_back(network_->node(idx).location);
    }

    // One sweep over the samples updates the running argmin of every node.
    std::vector<Closest> closest(nodes_.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const GeoPoint& p = samples[i].position;
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const double d = planar_distance(p, centers[k]);
            if (d < closest[k].distance) {
                closest[k] = {i, d};
            }
        }
    }

    std::optional<std::size_t> chosen;
    Instant chosen_final{};
    for (std::size_t v = 0; v < variant_slots_.size(); ++v) {
        const auto& slots = variant_slots_[v];
        bool ok = true;
        for (std::size_t j = 0; j < slots.size() && ok; ++j) {
            const Closest& c = closest[slots[j]];
            if (c.distance > radius_) {
                ok = false;
                break;
            }
            const Instant t = samples[c.sample].timestamp;
            if (!window_.contains(t)) {
                ok = false;
            } else if (j > 0 && !(samples[closest[slots[j - 1]].sample].timestamp < t)) {
                ok = false;
            }
        }
        if (!ok) {
            continue;
        }
        const Instant final_arrival = samples[closest[slots.back()].sample].timestamp;
        if (!chosen || slots.size() > variant_slots_[*chosen].size() ||
            (slots.size() == variant_slots_[*chosen].size() && final_arrival < chosen_final)) {
            chosen = v;
            chosen_final = final_arrival;
        }
    }
    if (!chosen) {
        return std::nullopt;
    }

    SimplifiedTrace out;
    out.trace_id = trace.id();
    out.line = line_.label();
    out.variant = variants_[*chosen].label();
    out.origin = trace.origin();
    out.destination = trace.destination();
    out.source_length = samples.size();
    for (const std::size_t slot : variant_slots_[*chosen]) {
        const Closest& c = closest[slot];
        out.passes.push_back(MeetingPointPass{network_->node(nodes_[slot]).id, samples[c.sample], c.distance});
    }
    return out;
}

std::optional<SimplifiedTrace> simplify_trace(const Trace& trace, const CarpoolLine& line,
                                              const CarpoolNetwork& network, double radius_m,
                                              const DailyWindow& window) {
    return LineMatcher(network, line, radius_m, window).match(trace);
}

std::vector<SimplifiedTrace> simplify_batch(std::span<const Trace> traces, const LineMatcher& matcher,
                                            Execution exec) {
    std::vector<std::optional<SimplifiedTrace>> slots(traces.size());
    const auto n = static_cast<std::ptrdiff_t>(traces.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            slots[static_cast<std::size_t>(i)] = matcher.match(traces[static_cast<std::size_t>(i)]);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            slots[static_cast<std::size_t>(i)] = matcher.match(traces[static_cast<std::size_t>(i)]);
        }
    }
    std::vector<SimplifiedTrace> out;
    for (auto& s : slots) {
        if (s) {
            out.push_back(std::move(*s));
        }
    }
    return out;
}

double compression_rate(const SimplifiedTrace& simplified) {
    const std::size_t kept = simplified.point_count();
    if (simplified.source_length < kept) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("trace '{}' has fewer source samples ({}) than simplified points ({})",
                                simplified.trace_id, simplified.source_length, kept));
    }
    return 1.0 - static_cast<double>(kept) / static_cast<double>(simplified.source_length);
}

double mean_compression_rate(std::span<const SimplifiedTrace> simplified) {
    if (simplified.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& s : simplified) {
        sum += compression_rate(s);
    }
    return sum / static_cast<double>(simplified.size());
}

}  // namespace carpool
