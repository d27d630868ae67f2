#include "carpool/flow.hpp"

#include "carpool/error.hpp"

#include <cmath>
#include <fmt/format.h>
#include <map>
#include <numeric>

namespace carpool {

TimeGrid::TimeGrid(DailyWindow window, Minutes bin_length) : window_(window), bin_length_(bin_length), bins_(0) {
    if (bin_length <= Minutes{0}) {
        throw Error(ErrorCode::InvalidArgument, "bin length must be positive");
    }
    const Seconds len = window.length();
    if (len % bin_length != Seconds{0}) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("window {}-{} is not a whole number of {}-minute bins",
                                format_time_of_day(window.begin()), format_time_of_day(window.end()),
                                bin_length.count()));
    }
    bins_ = static_cast<std::size_t>(len / bin_length);
}

double TimeGrid::window_minutes() const noexcept {
    return static_cast<double>(window_.length().count()) / 60.0;
}

std::optional<std::size_t> TimeGrid::bin_of(Instant t) const noexcept {
    if (!window_.contains(t)) {
        return std::nullopt;
    }
    return static_cast<std::size_t>((time_of_day(t) - window_.begin()) / bin_length_);
}

double FlowProfile::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

FlowProfile driver_flow(std::span<const SimplifiedTrace> simplified, const CarpoolLine& line, const TimeGrid& grid,
                        int day_count) {
    if (day_count < 1) {
        throw Error(ErrorCode::InvalidArgument, "day_count must be at least 1");
    }
    const std::string label = line.label();
    std::vector<long> tally(grid.bin_count(), 0);
    for (const auto& s : simplified) {
        if (s.line != label || s.passes.empty() || s.passes.front().meeting_point_id != line.first()) {
            throw Error(ErrorCode::LineMismatch,
                        fmt::format("trace '{}' was matched against '{}', not '{}'", s.trace_id, s.line, label));
        }
        if (const auto bin = grid.bin_of(s.first_arrival())) {
            ++tally[*bin];
        }
    }
    FlowProfile out{grid, std::vector<double>(grid.bin_count()), label, day_count};
    for (std::size_t j = 0; j < tally.size(); ++j) {
        out.counts[j] = static_cast<double>(tally[j]) / day_count;
    }
    return out;
}

WaitProfile wait_times(const FlowProfile& flow) {
    WaitProfile out{flow.grid, {}};
    out.waits.reserve(flow.counts.size());
    for (const double f : flow.counts) {
        if (f > 0.0) {
            out.waits.emplace_back(flow.grid.bin_minutes() / f);
        } else {
            out.waits.emplace_back(std::nullopt);
        }
    }
    return out;
}

WeeklyComparison weekly_comparison(double door_count, double meeting_count, double window_minutes,
                                   int operating_days) {
    if (operating_days < 1) {
        throw Error(ErrorCode::InvalidArgument, "operating_days must be at least 1");
    }
    if (door_count < 0 || meeting_count < 0 || !(window_minutes > 0)) {
        throw Error(ErrorCode::InvalidArgument, "counts must be non-negative and the window positive");
    }
    WeeklyComparison out;
    out.door_count = door_count;
    out.meeting_count = meeting_count;
    const auto wait = [&](double weekly) -> std::optional<double> {
        if (weekly <= 0) {
            return std::nullopt;
        }
        return window_minutes / (weekly / operating_days);
    };
    out.door_wait = wait(door_count);
    out.meeting_wait = wait(meeting_count);
    if (door_count > 0) {
        out.flow_increase = (meeting_count - door_count) / door_count;
    }
    if (out.door_wait && out.meeting_wait) {
        out.wait_change = (*out.meeting_wait - *out.door_wait) / *out.door_wait;
    }
    return out;
}

WeeklyComparison weekly_comparison(const FlowProfile& door, const FlowProfile& meeting, int operating_days) {
    if (!(door.grid == meeting.grid)) {
        throw Error(ErrorCode::GridMismatch, "door-to-door and meeting-point profiles use different grids");
    }
    return weekly_comparison(door.total() * door.day_count, meeting.total() * meeting.day_count,
                             door.grid.window_minutes(), operating_days);
}

std::vector<BinRmse> rmse(std::span<const ObservedWait> observed, const WaitProfile& predicted) {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto& o : observed) {
        if (!(o.wait_minutes >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "observed waits must be non-negative");
        }
        const auto bin = predicted.grid.bin_of(o.request);
        if (!bin || !predicted.waits[*bin]) {
            continue;
        }
        const double e = o.wait_minutes - *predicted.waits[*bin];
        auto& [sum, n] = acc[*bin];
        sum += e * e;
        ++n;
    }
    std::vector<BinRmse> out;
    out.reserve(acc.size());
    for (const auto& [bin, sn] : acc) {
        out.push_back({bin, sn.second, std::sqrt(sn.first / static_cast<double>(sn.second))});
    }
    return out;
}

std::vector<ParticipationWait> wait_vs_participation(const FlowProfile& flow, double current_rate,
                                                     std::span<const double> target_rates) {
    if (!(current_rate > 0.0)) {
        throw Error(ErrorCode::ZeroRate, "current participation rate must be positive");
    }
    if (!(flow.total() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "flow profile is all zero");
    }
    std::vector<ParticipationWait> out;
    out.reserve(target_rates.size());
    for (const double r : target_rates) {
        if (!(r > 0.0)) {
            throw Error(ErrorCode::ZeroRate, fmt::format("target participation rate must be positive, got {}", r));
        }
        FlowProfile scaled = flow;
        for (double& c : scaled.counts) {
            c *= r / current_rate;
        }
        const WaitProfile w = wait_times(scaled);
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& x : w.waits) {
            if (x) {
                sum += *x;
                ++n;
            }
        }
        out.push_back({r, sum / static_cast<double>(n)});
    }
    return out;
}

}  // namespace carpool
