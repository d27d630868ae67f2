// Serial reference paths against the OpenMP kernels.
#include "carpool/cluster.hpp"
#include "carpool/matchprob.hpp"
#include "carpool/participation.hpp"
#include "carpool/random.hpp"
#include "carpool/simplify.hpp"
#include "carpool/simulate.hpp"

#include "lane.hpp"

#include <benchmark/benchmark.h>

using namespace carpool;
using namespace std::chrono_literals;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

const std::vector<double> kFlow{1, 1.5, 2.5, 1.5, 3, 1.5, 2, 2, 2, 1};

SyntheticScenario scenario(int days) {
    SyntheticScenario sc{lane::network(), CarpoolLine::parse("B>S"), {}, TimeGrid(make_window("06:30", "09:00"), 15min),
                         kFlow, days, std::chrono::sys_days{std::chrono::year{2019} / 11 / 25}};
    sc.seed = 1;
    return sc;
}

void BM_SimplifyBatch(benchmark::State& state) {
    const auto sc = scenario(60);
    const auto traces = generate_traces(sc);
    const LineMatcher matcher(sc.network, sc.line, sc.buffer_radius_m, scenario_match_window(sc));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simplify_batch(traces, matcher, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(traces.size()));
}

void BM_CompleteLinkage(benchmark::State& state) {
    Xoshiro256 rng(2);
    std::vector<OdVector> pts(static_cast<std::size_t>(state.range(1)));
    for (auto& v : pts) {
        for (auto& c : v) {
            c = (rng.uniform01() - 0.5) * 40000;
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(complete_linkage(pts, mode(state)));
    }
}

void BM_MatchHits(benchmark::State& state) {
    const SubCubeModel m{27, 4000000, 3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(match_hits(m, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(m.sample_count));
}

void BM_SimulateWaits(benchmark::State& state) {
    const TimeGrid g(make_window("06:30", "09:00"), 15min);
    const FlowProfile flow{g, kFlow, "B>S", 1};
    const auto model = ArrivalModel::from_flow(flow, 4);
    std::vector<Instant> requests;
    const Instant start = Instant{std::chrono::sys_days{std::chrono::year{2019} / 11 / 26}} + 6h + 30min;
    for (long i = 0; i < 200000; ++i) {
        requests.push_back(start + Seconds{i % 9000});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_waits(model, requests, std::nullopt, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(requests.size()));
}

void BM_CoincidentFlow(benchmark::State& state) {
    const auto net = lane::network();
    const auto line = CarpoolLine::parse("B>S");
    const StraightLineRouter router;
    Xoshiro256 rng(5);
    std::vector<OdEntry> entries;
    std::vector<RoutePlan> routes;
    const Instant departure{std::chrono::sys_days{std::chrono::year{2019} / 11 / 25}};
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a{5.2 + 0.1 * rng.uniform01(), 45.55 + 0.1 * rng.uniform01()};
        const GeoPoint b{4.85 + 0.15 * rng.uniform01(), 45.65 + 0.1 * rng.uniform01()};
        const auto id = "o" + std::to_string(i);
        entries.push_back({id, "d", 10, a, b});
        routes.push_back({id, "d", router.route(a, b, departure), router.name()});
    }
    const OdMatrix od(entries);
    for (auto _ : state) {
        benchmark::DoNotOptimize(coincident_flow(routes, od, line, net, 1000, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(routes.size()));
}

}  // namespace

// Argument 0 selects the path: 0 serial, 1 OpenMP.
BENCHMARK(BM_SimplifyBatch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CompleteLinkage)->ArgNames({"parallel", "n"})->ArgsProduct({{0, 1}, {500, 1500}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MatchHits)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SimulateWaits)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoincidentFlow)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
