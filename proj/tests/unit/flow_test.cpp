#include "carpool/error.hpp"
#include "carpool/flow.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace carpool;
using namespace std::chrono_literals;

namespace {

const std::vector<double> kMorningFlow{1, 1.5, 2.5, 1.5, 3, 1.5, 2, 2, 2, 1};

Instant at(const std::string& text) { return *parse_iso8601(text); }

SimplifiedTrace matched(const std::string& id, Instant first, const std::string& line = "B>S") {
    SimplifiedTrace st;
    st.trace_id = id;
    st.line = line;
    st.variant = line;
    st.origin = {{5.3, 45.6}, first - 5min};
    st.passes = {{"B", {{5.235, 45.6}, first}, 0.0}, {"S", {{4.94, 45.7}, first + 20min}, 0.0}};
    st.destination = {{4.9, 45.72}, first + 25min};
    st.source_length = 300;
    return st;
}

TimeGrid lane_grid(int bin = 15) { return TimeGrid(make_window("06:30", "09:00"), Minutes{bin}); }

FlowProfile profile(std::vector<double> counts, int bin = 15) {
    return FlowProfile{lane_grid(bin), std::move(counts), "B>S", 1};
}

}  // namespace

TEST(TimeGrid, Bins) {
    const auto g = lane_grid();
    EXPECT_EQ(g.bin_count(), 10u);
    EXPECT_EQ(g.window_minutes(), 150.0);
    EXPECT_EQ(*g.bin_of(at("2019-11-26T08:30:00Z")), 8u);
    EXPECT_EQ(*g.bin_of(at("2019-11-26T08:29:59Z")), 7u);
    EXPECT_EQ(*g.bin_of(at("2019-11-26T06:30:00Z")), 0u);
    EXPECT_FALSE(g.bin_of(at("2019-11-26T09:00:00Z")));
    EXPECT_FALSE(g.bin_of(at("2019-11-26T06:29:59Z")));
    EXPECT_THROW(TimeGrid(make_window("06:30", "09:00"), 20min), Error);
    EXPECT_THROW(TimeGrid(make_window("06:30", "09:00"), 0min), Error);
}

TEST(DriverFlow, ThirtyOneArrivalsInOneBin) {
    const TimeGrid g(make_window("08:00", "08:30"), 30min);
    std::vector<SimplifiedTrace> st;
    for (int i = 0; i < 31; ++i) {
        st.push_back(matched(fmt::format("t{}", i), at("2019-11-26T08:00:00Z") + std::chrono::seconds{i * 58}));
    }
    const auto f = driver_flow(st, CarpoolLine::parse("B>S"), g);
    ASSERT_EQ(f.counts.size(), 1u);
    EXPECT_EQ(f.counts[0], 31.0);
}

TEST(DriverFlow, EmptyListIsZero) {
    const auto f = driver_flow({}, CarpoolLine::parse("B>S"), lane_grid());
    EXPECT_EQ(f.counts, std::vector<double>(10, 0.0));
}

TEST(DriverFlow, DailyAverageOverDays) {
    // Two days of arrivals with per-bin totals twice the morning profile.
    std::vector<SimplifiedTrace> st;
    const auto g = lane_grid();
    int id = 0;
    for (std::size_t j = 0; j < kMorningFlow.size(); ++j) {
        const int total = static_cast<int>(kMorningFlow[j] * 2);
        for (int k = 0; k < total; ++k) {
            const std::string day = k % 2 == 0 ? "2019-11-26" : "2019-11-27";
            const Instant midnight = at(day + "T00:00:00Z");
            st.push_back(matched(fmt::format("t{}", id++), midnight + g.bin_begin(j) + std::chrono::seconds{60 * k}));
        }
    }
    const auto f = driver_flow(st, CarpoolLine::parse("B>S"), g, 2);
    EXPECT_EQ(f.counts, kMorningFlow);
    EXPECT_EQ(f.total(), 18.0);
}

TEST(DriverFlow, FirstNodeCountsAndBoundaries) {
    std::vector<SimplifiedTrace> st{matched("a", at("2019-11-26T08:30:00Z")), matched("b", at("2019-11-26T06:15:00Z")),
                                    matched("c", at("2019-11-26T08:59:59Z"))};
    const auto f = driver_flow(st, CarpoolLine::parse("B>S"), lane_grid());
    EXPECT_EQ(f.counts[8], 1.0);
    EXPECT_EQ(f.counts[9], 1.0);
    EXPECT_EQ(f.total(), 2.0);
}

TEST(DriverFlow, LineMismatch) {
    std::vector<SimplifiedTrace> st{matched("a", at("2019-11-26T08:30:00Z"), "B>V")};
    try {
        driver_flow(st, CarpoolLine::parse("B>S"), lane_grid());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LineMismatch);
    }
}

TEST(WaitTimes, Examples) {
    const auto w = wait_times(profile({2, 1, 0, 1, 1, 1, 1, 1, 1, 1}));
    EXPECT_EQ(*w.waits[0], 7.5);
    EXPECT_EQ(*w.waits[1], 15.0);
    EXPECT_FALSE(w.waits[2].has_value());
}

TEST(WaitTimes, FifteenOverFlow) {
    const auto w = wait_times(profile(kMorningFlow));
    const std::vector<double> expected{15, 10, 6, 10, 5, 10, 7.5, 7.5, 7.5, 15};
    for (std::size_t j = 0; j < expected.size(); ++j) {
        EXPECT_DOUBLE_EQ(*w.waits[j], expected[j]) << j;
    }
}

TEST(WeeklyComparison, WeeklyRows) {
    const auto full = weekly_comparison(76, 121, 150, 5);
    EXPECT_NEAR(*full.door_wait, 9.9, 0.05);
    EXPECT_NEAR(*full.meeting_wait, 6.2, 0.05);
    EXPECT_NEAR(*full.wait_change * 100, -37, 1);
    const auto sub = weekly_comparison(17, 31, 30, 5);
    EXPECT_NEAR(*sub.door_wait, 8.8, 0.05);
    EXPECT_NEAR(*sub.meeting_wait, 4.8, 0.05);
    EXPECT_NEAR(*sub.wait_change * 100, -45, 1);
}

TEST(WeeklyComparison, ProfilesAndIdentity) {
    const auto p = profile(kMorningFlow);
    const auto same = weekly_comparison(p, p, 5);
    EXPECT_EQ(*same.wait_change, 0.0);
    EXPECT_EQ(*same.flow_increase, 0.0);
    EXPECT_EQ(same.door_count, 18.0);
    EXPECT_THROW(weekly_comparison(p, profile(std::vector<double>(5, 1.0), 30), 5), Error);
    const auto none = weekly_comparison(0, 3, 150, 5);
    EXPECT_FALSE(none.door_wait.has_value());
    EXPECT_FALSE(none.wait_change.has_value());
}

TEST(WeeklyComparison, MoreMeetingMatchesMeansShorterWaits) {
    gen::Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double door = 1 + static_cast<double>(gen::below(rng, 200));
        const double meeting = door + 1 + static_cast<double>(gen::below(rng, 200));
        EXPECT_LT(*weekly_comparison(door, meeting, gen::uniform(rng, 15, 300), 5).wait_change, 0.0);
    }
}

TEST(Rmse, Examples) {
    const auto w = wait_times(profile({2, 1, 0, 1, 1, 1, 1, 1, 1, 1}));
    const Instant bin0 = at("2019-11-26T06:35:00Z");
    std::vector<ObservedWait> exact{{bin0, 7.5}, {at("2019-11-26T06:50:00Z"), 15.0}};
    for (const auto& r : rmse(exact, w)) {
        EXPECT_EQ(r.rmse, 0.0);
    }
    const auto two = rmse(std::vector<ObservedWait>{{bin0, 9.5}, {bin0, 5.5}}, w);
    ASSERT_EQ(two.size(), 1u);
    EXPECT_EQ(two[0].bin, 0u);
    EXPECT_EQ(two[0].observations, 2u);
    EXPECT_DOUBLE_EQ(two[0].rmse, 2.0);
    EXPECT_TRUE(rmse({}, w).empty());
    // Observations in an NA bin are ignored.
    EXPECT_TRUE(rmse(std::vector<ObservedWait>{{at("2019-11-26T07:05:00Z"), 3.0}}, w).empty());
}

TEST(Rmse, MatchesPerObservationOracle) {
    gen::Rng rng(32);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> counts(10);
        for (auto& c : counts) {
            c = static_cast<double>(gen::below(rng, 4)) * 0.5;
        }
        const auto w = wait_times(profile(counts));
        std::vector<ObservedWait> obs;
        for (std::size_t k = 0, n = gen::below(rng, 51); k < n; ++k) {
            const auto offset = std::chrono::seconds{static_cast<long>(gen::uniform(rng, 6.0, 9.5) * 3600)};
            obs.push_back({at("2019-11-26T00:00:00Z") + offset, gen::uniform(rng, 0, 30)});
        }
        const auto got = rmse(obs, w);
        const auto want = oracle::rmse(obs, w);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            EXPECT_EQ(got[k].bin, want[k].bin);
            EXPECT_EQ(got[k].observations, want[k].observations);
            EXPECT_NEAR(got[k].rmse, want[k].rmse, 1e-9);
        }
    }
}

TEST(FlowProperties, ConservationAndAntitone) {
    gen::Rng rng(33);
    const auto g = lane_grid();
    const CarpoolLine line = CarpoolLine::parse("B>S");
    for (int iter = 0; iter < 100; ++iter) {
        const int days = 1 + static_cast<int>(gen::below(rng, 5));
        std::vector<SimplifiedTrace> st;
        std::size_t inside = 0;
        for (std::size_t k = 0, n = gen::below(rng, 60); k < n; ++k) {
            const auto offset = std::chrono::seconds{static_cast<long>(gen::uniform(rng, 6.0, 9.5) * 3600)};
            const Instant t = at("2019-11-26T00:00:00Z") + std::chrono::days{gen::below(rng, 5)} + offset;
            inside += g.bin_of(t) ? 1 : 0;
            st.push_back(matched(fmt::format("t{}", k), t));
        }
        const auto f = driver_flow(st, line, g, days);
        EXPECT_NEAR(f.total() * days, static_cast<double>(inside), 1e-9);

        const auto before = wait_times(f);
        st.push_back(matched("extra", at("2019-11-26T00:00:00Z") +
                                          std::chrono::seconds{static_cast<long>(gen::uniform(rng, 6.5, 9.0) * 3600)}));
        const auto after = wait_times(driver_flow(st, line, g, days));
        for (std::size_t j = 0; j < before.waits.size(); ++j) {
            if (before.waits[j]) {
                EXPECT_LE(*after.waits[j], *before.waits[j]);
            }
        }
    }
}

TEST(WaitVsParticipation, ScalingLaw) {
    const auto f = profile(kMorningFlow);
    const auto base = wait_times(f);
    double mean = 0;
    for (const auto& w : base.waits) {
        mean += *w;
    }
    mean /= 10;
    const std::vector<double> rates{0.0052, 0.0104, 0.01, 0.05};
    const auto curve = wait_vs_participation(f, 0.0052, rates);
    ASSERT_EQ(curve.size(), 4u);
    EXPECT_NEAR(curve[0].mean_wait, mean, 1e-12);
    EXPECT_NEAR(curve[1].mean_wait, mean / 2, 1e-12);
    EXPECT_NEAR(curve[2].mean_wait, mean * 0.52, 1e-12);
    EXPECT_NEAR(curve[3].mean_wait, mean * 0.104, 1e-12);
    EXPECT_THROW(wait_vs_participation(f, 0.0, rates), Error);
    EXPECT_THROW(wait_vs_participation(f, 0.01, std::vector<double>{0.0}), Error);
    EXPECT_THROW(wait_vs_participation(profile(std::vector<double>(10, 0.0)), 0.01, rates), Error);
}
