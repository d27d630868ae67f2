// Acceptance checks. One line per criterion: "criterion N: PASS|FAIL - detail".
#include "carpool/cluster.hpp"
#include "carpool/flow.hpp"
#include "carpool/matchprob.hpp"
#include "carpool/participation.hpp"
#include "carpool/random.hpp"
#include "carpool/simplify.hpp"
#include "carpool/simulate.hpp"

#include "generators.hpp"
#include "lane.hpp"
#include "oracles.hpp"
#include "scenario.hpp"
#include "tempdir.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

using namespace carpool;
using namespace std::chrono_literals;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const std::vector<double> kMorningFlow{1, 1.5, 2.5, 1.5, 3, 1.5, 2, 2, 2, 1};
// Waits as printed in the published table, cell for cell.
const std::vector<double> kListedWaits{15, 10, 6.0, 10, 6.0, 5.0, 7.5, 7.5, 7.5, 15};

TimeGrid morning_grid() { return TimeGrid(make_window("06:30", "09:00"), 15min); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome table_waits() {
    const auto w = wait_times(FlowProfile{morning_grid(), kMorningFlow, "B>S", 1});
    bool exact = true;
    std::vector<std::string> flagged;
    for (std::size_t j = 0; j < kMorningFlow.size(); ++j) {
        exact = exact && w.waits[j] && *w.waits[j] == 15.0 / kMorningFlow[j];
        if (!w.waits[j] || *w.waits[j] != kListedWaits[j]) {
            flagged.push_back(fmt::format("{}:{} listed {} computed {}", j + 1,
                                          format_time_of_day(w.grid.bin_begin(j)), kListedWaits[j],
                                          w.waits[j] ? *w.waits[j] : -1.0));
        }
    }
    const bool ok = exact && flagged.size() == 2 && kMorningFlow.size() - flagged.size() == 8;
    return {ok, fmt::format("15/f exact={}, {} of 10 cells agree with the listed table, flagged [{}]", exact,
                            10 - flagged.size(), fmt::join(flagged, "; "))};
}

Outcome weekly_table() {
    const auto full = weekly_comparison(76, 121, 150, 5);
    const auto sub = weekly_comparison(17, 31, 30, 5);
    const bool ok = std::abs(*full.door_wait - 9.9) <= 0.05 && std::abs(*full.meeting_wait - 6.2) <= 0.05 &&
                    std::abs(*full.wait_change * 100 + 37) <= 1.0 && std::abs(*sub.door_wait - 8.8) <= 0.05 &&
                    std::abs(*sub.meeting_wait - 4.8) <= 0.05;
    return {ok, fmt::format("150 min: {:.3f} -> {:.3f} min ({:+.2f}%); 30 min: {:.3f} -> {:.3f} min", *full.door_wait,
                            *full.meeting_wait, *full.wait_change * 100, *sub.door_wait, *sub.meeting_wait)};
}

Outcome participation() {
    const double pct = participation_rate(20, 3821) * 100;
    return {std::abs(pct - 0.52) <= 0.005, fmt::format("rate {:.4f}%", pct)};
}

Outcome poisson_oracle() {
    const TimeGrid g(make_window("00:00", "23:45"), 15min);
    std::vector<Instant> requests;
    const Instant midnight{std::chrono::sys_days{std::chrono::year{2019} / 11 / 26}};
    for (long i = 0; i < 100000; ++i) {
        requests.push_back(midnight + Seconds{i % 3600});
    }
    bool ok = true;
    std::vector<std::string> parts;
    for (const double per_bin : {2.0, 1.0, 3.0}) {
        const ArrivalModel m{g, std::vector<double>(g.bin_count(), per_bin / 15.0), 4000 + static_cast<std::uint64_t>(per_bin)};
        const auto w = simulate_waits(m, requests);
        double sum = 0;
        for (const auto& x : w) {
            sum += x.wait_minutes;
        }
        const double mean = sum / static_cast<double>(w.size());
        const double expected = 15.0 / per_bin;
        const double rel = std::abs(mean - expected) / expected;
        ok = ok && rel <= 0.05;
        parts.push_back(fmt::format("lambda={}/15: mean {:.3f} vs {:.3f} ({:.2f}%)", per_bin, mean, expected, rel * 100));
    }
    return {ok, fmt::format("{}", fmt::join(parts, "; "))};
}

Outcome monte_carlo() {
    bool ok = true;
    std::vector<std::string> parts;
    for (const std::uint64_t n : {1u, 2u, 3u, 27u, 125u}) {
        const SubCubeModel m{n, 1000000, 5000 + n};
        const double p_hat = match_probability_mc(m);
        const double p = match_probability_exact(n);
        const double sigma = std::sqrt(p * (1 - p) / 1e6);
        const double z = sigma > 0 ? (p_hat - p) / sigma : (p_hat == p ? 0.0 : INFINITY);
        ok = ok && std::abs(z) <= 3;
        parts.push_back(fmt::format("n={}: {:.6g} vs {:.6g} (z={:+.2f})", n, p_hat, p, z));
    }
    return {ok, fmt::format("{}", fmt::join(parts, "; "))};
}

Outcome round_trip() {
    // 28 days at 18 drivers a day gives 504 traces.
    SyntheticScenario sc{lane::network(), CarpoolLine::parse("B>S"), {}, morning_grid(), kMorningFlow, 28,
                         std::chrono::sys_days{std::chrono::year{2019} / 11 / 25}};
    sc.seed = 6006;
    const auto t0 = std::chrono::steady_clock::now();
    const auto traces = generate_traces(sc);
    const LineMatcher matcher(sc.network, sc.line, sc.buffer_radius_m, scenario_match_window(sc));
    const auto simplified = simplify_batch(traces, matcher);
    const auto flow = driver_flow(simplified, sc.line, sc.grid, sc.day_count);
    const double elapsed = seconds_since(t0);

    std::vector<SimplifiedTrace> long_ones;
    for (const auto& s : simplified) {
        if (s.source_length >= 250) {
            long_ones.push_back(s);
        }
    }
    const bool exact = flow.counts == kMorningFlow;
    const double mean = long_ones.empty() ? 0.0 : mean_compression_rate(long_ones);
    const bool ok = exact && simplified.size() == traces.size() && !long_ones.empty() && mean >= 0.98 &&
                    traces.size() >= 500 && elapsed < 10;
    return {ok, fmt::format("{} traces, {} matched, flows exact={}, mean compression {:.4f} over {} traces of >=250 "
                            "samples, {:.2f} s",
                            traces.size(), simplified.size(), exact, mean, long_ones.size(), elapsed)};
}

Outcome linkage_oracle() {
    gen::Rng rng(7007);
    std::size_t agree = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const auto pts = gen::random_vectors(rng, 1 + gen::below(rng, 8));
        agree += complete_linkage(pts).merges == oracle::linkage(pts).merges;
    }
    std::size_t refined = 0;
    for (int iter = 0; iter < 100; ++iter) {
        const auto pts = gen::random_vectors(rng, 1 + gen::below(rng, 40));
        const auto d = complete_linkage(pts);
        const double h1 = gen::uniform(rng, 0, 40000);
        const double h2 = h1 + gen::uniform(rng, 0, 20000);
        const auto fine = cut(d, h1);
        const auto coarse = cut(d, h2);
        bool ok = fine.cluster_count() >= coarse.cluster_count();
        for (std::size_t i = 0; i < pts.size() && ok; ++i) {
            for (std::size_t j = 0; j < pts.size() && ok; ++j) {
                ok = fine.labels[i] != fine.labels[j] || coarse.labels[i] == coarse.labels[j];
            }
        }
        refined += ok;
    }
    return {agree == 200 && refined == 100,
            fmt::format("{}/200 dendrograms equal the brute force, {}/100 cuts refine", agree, refined)};
}

Outcome simplify_oracle() {
    gen::Rng rng(8008);
    std::size_t agree = 0;
    std::size_t matched = 0;
    std::size_t window_rejects = 0;
    for (int iter = 0; iter < 500; ++iter) {
        const auto c = gen::random_line_case(rng);
        const auto t = gen::random_line_trace(rng, c, "t", 100);
        const auto w = gen::random_window(rng);
        const auto got = simplify_trace(t, c.line, c.network, 1000, w);
        const auto want = oracle::simplify(t, c.line, c.network, 1000, w);
        agree += got == want;
        matched += got.has_value();
        // Would have matched with an all-day window.
        window_rejects += !got && oracle::simplify(t, c.line, c.network, 1000, make_window("00:00", "24:00"));
    }
    const std::size_t rejected = 500 - matched;
    return {agree == 500 && matched > 0 && window_rejects > 0 && rejected > window_rejects,
            fmt::format("{}/500 agree; {} matched, {} rejected ({} by the window)", agree, matched, rejected,
                        window_rejects)};
}

Outcome rmse_band() {
    const auto grid = morning_grid();
    const FlowProfile flow{grid, kMorningFlow, "B>S", 1};
    const auto predicted = wait_times(flow);
    std::vector<double> pooled;
    std::vector<double> per_replication;
    const Instant day{std::chrono::sys_days{std::chrono::year{2019} / 11 / 26}};
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        // 150 requests per bin at random times.
        auto rng = Xoshiro256::stream(9009, rep);
        std::vector<Instant> requests;
        for (std::size_t j = 0; j < grid.bin_count(); ++j) {
            for (int k = 0; k < 150; ++k) {
                requests.push_back(day + grid.bin_begin(j) + Seconds{static_cast<long>(rng.uniform_below(900))});
            }
        }
        const auto waits = simulate_waits(ArrivalModel::from_flow(flow, 9100 + rep), requests);
        std::vector<ObservedWait> observed;
        for (const auto& w : waits) {
            observed.push_back({w.request, w.wait_minutes});
        }
        std::vector<double> bins;
        for (const auto& r : rmse(observed, predicted)) {
            bins.push_back(r.rmse);
            pooled.push_back(r.rmse);
        }
        std::sort(bins.begin(), bins.end());
        per_replication.push_back((bins[4] + bins[5]) / 2);
    }
    std::sort(pooled.begin(), pooled.end());
    std::sort(per_replication.begin(), per_replication.end());
    const double median = (pooled[pooled.size() / 2 - 1] + pooled[pooled.size() / 2]) / 2;
    return {median >= 2 && median <= 6,
            fmt::format("median per-bin RMSE {:.2f} min over {} bins (replication medians {:.2f}..{:.2f}); "
                        "band 2..6",
                        median, pooled.size(), per_replication.front(), per_replication.back())};
}

Outcome determinism() {
    TempDir a;
    TempDir b;
    scenario::run_all(scenario::lane_config(a.path()));
    scenario::run_all(scenario::lane_config(b.path()));
    std::size_t files = 0;
    std::size_t same = 0;
    std::vector<std::string> differing;
    for (const auto& e : std::filesystem::directory_iterator(a.path() / "out")) {
        const auto ext = e.path().extension();
        if (ext != ".csv" && ext != ".geojson") {
            continue;
        }
        ++files;
        const auto other = b.path() / "out" / e.path().filename();
        if (std::filesystem::exists(other) && io::read_file(e.path()) == io::read_file(other)) {
            ++same;
        } else {
            differing.push_back(e.path().filename().string());
        }
    }
    return {files > 0 && same == files,
            fmt::format("{}/{} CSV/GeoJSON outputs byte-identical{}", same, files,
                        differing.empty() ? "" : fmt::format(", differing: {}", fmt::join(differing, ", ")))};
}

struct Criterion {
    int id;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> selected;
    app.add_option("--criterion", selected, "criterion number(s); all when omitted")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, 1, table_waits},      {2, 1, weekly_table},     {3, 1, participation},   {4, 30, poisson_oracle},
        {5, 10, monte_carlo},     {6, 10, round_trip},      {7, 30, linkage_oracle}, {8, 30, simplify_oracle},
        {9, 60, rmse_band},       {10, 120, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        const double elapsed = seconds_since(t0);
        if (elapsed > c.budget_s) {
            o.pass = false;
            o.detail += fmt::format("; over the {} s budget", c.budget_s);
        }
        fmt::print("criterion {}: {} - {} [{:.2f} s]\n", c.id, o.pass ? "PASS" : "FAIL", o.detail, elapsed);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
