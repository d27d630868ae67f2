#ifndef CARPOOL_TIME_HPP
#define CARPOOL_TIME_HPP

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace carpool {

/// Absolute UTC instant at second resolution. Zone offsets are applied
/// when text is parsed; nothing downstream knows about time zones.
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Minutes = std::chrono::minutes;

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff][Z|±HH:MM|±HHMM]`. A space is accepted
/// in place of `T`; a missing zone designator means UTC. Fractional seconds
/// are truncated.
std::optional<Instant> parse_iso8601(std::string_view text);

/// Always `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Instant t);

/// `HH:MM` or `HH:MM:SS` to an offset from midnight.
std::optional<Seconds> parse_time_of_day(std::string_view text);
std::string format_time_of_day(Seconds since_midnight);

Seconds time_of_day(Instant t) noexcept;
std::chrono::sys_days day_of(Instant t) noexcept;

/// ISO-8601 week label, e.g. "2019W48".
std::string iso_week_label(std::chrono::sys_days day);

/// A half-open time-of-day interval [begin, end) that recurs every UTC day.
/// It must not wrap past midnight.
class DailyWindow {
public:
    DailyWindow(Seconds begin, Seconds end);

    Seconds begin() const noexcept { return begin_; }
    Seconds end() const noexcept { return end_; }
    Seconds length() const noexcept { return end_ - begin_; }

    bool contains(Instant t) const noexcept;
    bool contains(const DailyWindow& inner) const noexcept;

    friend bool operator==(const DailyWindow&, const DailyWindow&) = default;

private:
    Seconds begin_;
    Seconds end_;
};

/// Convenience for "06:30"-style literals; throws InvalidArgument on bad text.
DailyWindow make_window(std::string_view begin, std::string_view end);

}  // namespace carpool

#endif  // CARPOOL_TIME_HPP
