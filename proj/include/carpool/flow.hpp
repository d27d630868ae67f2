#ifndef CARPOOL_FLOW_HPP
#define CARPOOL_FLOW_HPP

#include "carpool/network.hpp"
#include "carpool/simplify.hpp"
#include "carpool/time.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace carpool {

/// A daily window cut into equal half-open bins [start, start + bin_length).
class TimeGrid {
public:
    /// Throws InvalidArgument unless the window is a whole number of bins.
    TimeGrid(DailyWindow window, Minutes bin_length);

    const DailyWindow& window() const noexcept { return window_; }
    Minutes bin_length() const noexcept { return bin_length_; }
    double bin_minutes() const noexcept { return static_cast<double>(bin_length_.count()); }
    double window_minutes() const noexcept;
    std::size_t bin_count() const noexcept { return bins_; }
    Seconds bin_begin(std::size_t j) const noexcept { return window_.begin() + bin_length_ * static_cast<long>(j); }
    /// Bin holding the time of day of `t`, if inside the window.
    std::optional<std::size_t> bin_of(Instant t) const noexcept;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    DailyWindow window_;
    Minutes bin_length_;
    std::size_t bins_;
};

/// Driver counts per bin, averaged over `day_count` days.
struct FlowProfile {
    TimeGrid grid;
    std::vector<double> counts;
    std::string line;
    int day_count = 1;

    double total() const noexcept;
};

/// Predicted minutes per bin; nullopt marks a bin with no drivers.
struct WaitProfile {
    TimeGrid grid;
    std::vector<std::optional<double>> waits;
};

struct ObservedWait {
    Instant request;
    double wait_minutes = 0.0;
};

/// Counts traces by the bin of their arrival at the line's first meeting
/// point, divided by `day_count`. Throws LineMismatch if a trace was matched
/// against another line.
FlowProfile driver_flow(std::span<const SimplifiedTrace> simplified, const CarpoolLine& line, const TimeGrid& grid,
                        int day_count = 1);

/// len(bin) / flow, or nullopt for zero flow.
WaitProfile wait_times(const FlowProfile& flow);

struct WeeklyComparison {
    double door_count = 0.0;     ///< weekly total
    double meeting_count = 0.0;  ///< weekly total
    std::optional<double> door_wait;
    std::optional<double> meeting_wait;
    std::optional<double> flow_increase;  ///< (meeting - door) / door
    std::optional<double> wait_change;    ///< (W_meeting - W_door) / W_door
};

/// Weekly totals over the whole grid window, turned into daily flows by
/// `operating_days` before applying len/flow. Throws GridMismatch.
WeeklyComparison weekly_comparison(const FlowProfile& door, const FlowProfile& meeting, int operating_days = 5);

/// Same computation from raw weekly counts over a window of `window_minutes`.
WeeklyComparison weekly_comparison(double door_count, double meeting_count, double window_minutes,
                                   int operating_days = 5);

struct BinRmse {
    std::size_t bin = 0;
    std::size_t observations = 0;
    double rmse = 0.0;
};

/// Per-bin root mean squared error of observed against predicted waits, for
/// bins with at least one observation and a defined prediction.
std::vector<BinRmse> rmse(std::span<const ObservedWait> observed, const WaitProfile& predicted);

struct ParticipationWait {
    double rate = 0.0;
    double mean_wait = 0.0;  ///< minutes, over bins with a defined wait
};

/// Rescales the flow by target/current and reports the mean predicted wait.
/// Throws ZeroRate for a non-positive current or target rate.
std::vector<ParticipationWait> wait_vs_participation(const FlowProfile& flow, double current_rate,
                                                     std::span<const double> target_rates);

}  // namespace carpool

#endif  // CARPOOL_FLOW_HPP
