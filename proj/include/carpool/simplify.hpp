#ifndef CARPOOL_SIMPLIFY_HPP
#define CARPOOL_SIMPLIFY_HPP

#include "carpool/execution.hpp"
#include "carpool/geo.hpp"
#include "carpool/network.hpp"
#include "carpool/time.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace carpool {

inline constexpr double kDefaultBufferRadius = 1000.0;

/// The sample of a trace closest to one meeting point.
struct MeetingPointPass {
    std::string meeting_point_id;
    GpsSample closest_sample;
    double distance = 0.0;  ///< meters, <= the buffer radius used

    Instant arrival_time() const noexcept { return closest_sample.timestamp; }

    friend bool operator==(const MeetingPointPass&, const MeetingPointPass&) = default;
};

/// A trace reduced to origin > passes > destination.
struct SimplifiedTrace {
    std::string trace_id;
    std::string line;     ///< label of the line it was matched against, e.g. "B>S"
    std::string variant;  ///< the variant that matched, e.g. "B>V>S"
    GpsSample origin;
    std::vector<MeetingPointPass> passes;
    GpsSample destination;
    std::size_t source_length = 0;

    std::size_t point_count() const noexcept { return passes.size() + 2; }
    /// Arrival at the line's first meeting point.
    Instant first_arrival() const { return passes.front().arrival_time(); }

    friend bool operator==(const SimplifiedTrace&, const SimplifiedTrace&) = default;
};

/// Samples inside each meeting point's buffer, in trace order. Points with no
/// sample inside are left out.
std::map<std::string, std::vector<GpsSample>> intersect_buffers(const Trace& trace, const CarpoolNetwork& network,
                                                                double radius_m = kDefaultBufferRadius);

/// Global closest sample to `point`, earliest on ties. Throws NoIntersection
/// when no sample lies within `radius_m`.
MeetingPointPass estimate_arrival(const Trace& trace, const MeetingPoint& point,
                                  double radius_m = kDefaultBufferRadius);

/// Matches traces against one line. Variants and node lookups are resolved
/// once, so a matcher is the unit to reuse across a batch. Holds a pointer to
/// the network, which must outlive it.
class LineMatcher {
public:
    LineMatcher(const CarpoolNetwork& network, CarpoolLine line, double radius_m, DailyWindow window);

    std::optional<SimplifiedTrace> match(const Trace& trace) const;

    const CarpoolLine& line() const noexcept { return line_; }
    std::span<const CarpoolLine> variants() const noexcept { return variants_; }
    double radius() const noexcept { return radius_; }
    const DailyWindow& window() const noexcept { return window_; }

private:
    const CarpoolNetwork* network_;
    CarpoolLine line_;
    std::vector<CarpoolLine> variants_;
    std::vector<std::vector<std::size_t>> variant_slots_;  // per variant, indices into nodes_
    std::vector<std::size_t> nodes_;                       // network indices used by any variant
    double radius_;
    DailyWindow window_;
};

/// Some iff the trace passes through the buffers of every node of some line
/// variant, with strictly increasing arrivals that all fall in `window`.
/// Among several matching variants the one with the most nodes wins, then the
/// earliest final arrival.
std::optional<SimplifiedTrace> simplify_trace(const Trace& trace, const CarpoolLine& line,
                                              const CarpoolNetwork& network, double radius_m,
                                              const DailyWindow& window);

/// Matches only, in input order.
std::vector<SimplifiedTrace> simplify_batch(std::span<const Trace> traces, const LineMatcher& matcher,
                                            Execution exec = Execution::parallel);

/// 1 - (2 + passes) / source_length.
double compression_rate(const SimplifiedTrace& simplified);

double mean_compression_rate(std::span<const SimplifiedTrace> simplified);

}  // namespace carpool

#endif  // CARPOOL_SIMPLIFY_HPP
