#include "carpool/time.hpp"

#include "carpool/error.hpp"

#include <charconv>
#include <fmt/format.h>

namespace carpool {

namespace {

constexpr Seconds kDay{86400};

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > text.size()) {
        return false;
    }
    const char* first = text.data() + pos;
    const char* last = first + width;
    for (const char* c = first; c != last; ++c) {
        if (*c < '0' || *c > '9') {
            return false;
        }
    }
    return std::from_chars(first, last, out).ec == std::errc{};
}

}  // namespace

std::optional<Instant> parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (text.size() < 19 || !read_int(text, 0, 4, y) || text[4] != '-' || !read_int(text, 5, 2, mo) ||
        text[7] != '-' || !read_int(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') ||
        !read_int(text, 11, 2, h) || text[13] != ':' || !read_int(text, 14, 2, mi) || text[16] != ':' ||
        !read_int(text, 17, 2, s)) {
        return std::nullopt;
    }
    if (h > 23 || mi > 59 || s > 59) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t digits = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            ++pos;
        }
        if (pos == digits) {
            return std::nullopt;
        }
    }

    Seconds offset{0};
    if (pos < text.size()) {
        const char z = text[pos];
        if (z == 'Z' || z == 'z') {
            ++pos;
        } else if (z == '+' || z == '-') {
            int oh = 0, om = 0;
            if (!read_int(text, pos + 1, 2, oh)) {
                return std::nullopt;
            }
            std::size_t mpos = pos + 3;
            if (mpos < text.size() && text[mpos] == ':') {
                ++mpos;
            }
            if (!read_int(text, mpos, 2, om) || oh > 23 || om > 59) {
                return std::nullopt;
            }
            offset = hours{oh} + minutes{om};
            if (z == '-') {
                offset = -offset;
            }
            pos = mpos + 2;
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) {
        return std::nullopt;
    }

    const Instant local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
    return local - offset;
}

std::string format_iso8601(Instant t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::optional<Seconds> parse_time_of_day(std::string_view text) {
    int h = 0, m = 0, s = 0;
    if (text.size() != 5 && text.size() != 8) {
        return std::nullopt;
    }
    if (!read_int(text, 0, 2, h) || text[2] != ':' || !read_int(text, 3, 2, m)) {
        return std::nullopt;
    }
    if (text.size() == 8 && (text[5] != ':' || !read_int(text, 6, 2, s))) {
        return std::nullopt;
    }
    // 24:00 is allowed as an end-of-day marker.
    if (m > 59 || s > 59 || h > 24 || (h == 24 && (m != 0 || s != 0))) {
        return std::nullopt;
    }
    return Seconds{h * 3600 + m * 60 + s};
}

std::string format_time_of_day(Seconds since_midnight) {
    const auto total = since_midnight.count();
    const auto h = total / 3600;
    const auto m = (total % 3600) / 60;
    const auto s = total % 60;
    if (s == 0) {
        return fmt::format("{:02d}:{:02d}", h, m);
    }
    return fmt::format("{:02d}:{:02d}:{:02d}", h, m, s);
}

Seconds time_of_day(Instant t) noexcept {
    return t - std::chrono::floor<std::chrono::days>(t);
}

std::chrono::sys_days day_of(Instant t) noexcept {
    return std::chrono::floor<std::chrono::days>(t);
}

std::string iso_week_label(std::chrono::sys_days day) {
    using namespace std::chrono;
    // The ISO week belongs to the year containing its Thursday.
    const weekday wd{day};
    const int iso_wd = wd.iso_encoding();  // Mon=1..Sun=7
    const sys_days thursday = day + days{4 - iso_wd};
    const year y = year_month_day{thursday}.year();
    const sys_days jan1{y / January / 1};
    const int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
    return fmt::format("{:04d}W{:02d}", static_cast<int>(y), week);
}

DailyWindow::DailyWindow(Seconds begin, Seconds end) : begin_(begin), end_(end) {
    if (begin < Seconds{0} || end > kDay || begin >= end) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("daily window must satisfy 00:00 <= begin < end <= 24:00, got {}-{}",
                                format_time_of_day(begin), format_time_of_day(end)));
    }
}

bool DailyWindow::contains(Instant t) const noexcept {
    const Seconds tod = time_of_day(t);
    return tod >= begin_ && tod < end_;
}

bool DailyWindow::contains(const DailyWindow& inner) const noexcept {
    return inner.begin_ >= begin_ && inner.end_ <= end_;
}

DailyWindow make_window(std::string_view begin, std::string_view end) {
    const auto b = parse_time_of_day(begin);
    const auto e = parse_time_of_day(end);
    if (!b || !e) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("bad time of day in window '{}-{}'", begin, end));
    }
    return DailyWindow(*b, *e);
}

}  // namespace carpool
