#ifndef CARPOOL_SIMULATE_HPP
#define CARPOOL_SIMULATE_HPP

#include "carpool/execution.hpp"
#include "carpool/flow.hpp"
#include "carpool/geo.hpp"
#include "carpool/network.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace carpool {

/// Piecewise-constant Poisson driver arrivals over a daily grid.
struct ArrivalModel {
    TimeGrid grid;
    std::vector<double> rate_per_minute;  ///< one per bin, >= 0
    std::uint64_t seed = 0;
    /// Probability that an arriving driver responds; thins the process.
    double willingness = 1.0;

    /// rate_j = counts_j / len(bin_j).
    static ArrivalModel from_flow(const FlowProfile& flow, std::uint64_t seed, double willingness = 1.0);
};

struct SimulatedWait {
    Instant request;
    double wait_minutes = 0.0;
    bool censored = false;  ///< no driver before the horizon; wait_minutes is the censoring time
};

/// Time from each request to the first driver arrival. Waits are censored at
/// `horizon` after the request, or at the end of the daily window when no
/// horizon is given. Request i draws from its own stream of the model seed.
/// Throws InvalidArgument for requests outside the window.
std::vector<SimulatedWait> simulate_waits(const ArrivalModel& model, std::span<const Instant> requests,
                                          std::optional<Minutes> horizon = std::nullopt,
                                          Execution exec = Execution::parallel);

/// Inputs for synthetic driver traces that reproduce a target flow profile.
struct SyntheticScenario {
    CarpoolNetwork network;
    CarpoolLine line;
    /// Node sequence the drivers actually follow; must be a variant of `line`.
    /// Empty means the variant with the most nodes.
    std::vector<std::string> route;
    TimeGrid grid;
    std::vector<double> target_flow;  ///< daily average per bin
    int day_count = 1;
    std::chrono::sys_days first_day{};

    double buffer_radius_m = 1000.0;
    double gps_noise_m = 20.0;  ///< sigma; noise is clipped at 3 sigma
    int sampling_period_s = 5;
    double speed_mps = 20.0;
    double origin_offset_m = 5000.0;  ///< distance behind the first node
    double origin_scatter_m = 1500.0;
    double destination_offset_m = 5000.0;  ///< distance beyond the last node
    double destination_scatter_m = 1500.0;
    std::uint64_t seed = 0;
};

/// Daily window wide enough to contain every meeting-point arrival of the
/// generated traces; pass it to the matcher when round-tripping.
DailyWindow scenario_match_window(const SyntheticScenario& scenario);

/// Traces whose first-node arrivals reproduce target_flow * day_count exactly
/// (the simplified flows then average back to target_flow). Deterministic per
/// seed. Throws InfeasibleScenario when sigma > radius / 4, a flow total is
/// not whole, or the geometry cannot guarantee the arrival bins.
std::vector<Trace> generate_traces(const SyntheticScenario& scenario);

}  // namespace carpool

#endif  // CARPOOL_SIMULATE_HPP
