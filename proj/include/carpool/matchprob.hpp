#ifndef CARPOOL_MATCHPROB_HPP
#define CARPOOL_MATCHPROB_HPP

#include "carpool/execution.hpp"

#include <cstdint>

namespace carpool {

/// Driver and passenger origins/destinations drawn independently and
/// uniformly over `n` sub-cubes.
struct SubCubeModel {
    std::uint64_t n = 1;
    std::uint64_t sample_count = 1000;
    std::uint64_t seed = 0;
};

/// Samples are drawn in fixed strata of this size, each with its own
/// generator stream; the estimate is therefore independent of thread count.
inline constexpr std::uint64_t kMatchStratumSize = 1u << 16;

/// Number of draws with passenger origin == driver origin and passenger
/// destination == driver destination.
std::uint64_t match_hits(const SubCubeModel& model, Execution exec = Execution::parallel);

/// Monte Carlo estimate hits / sample_count. Throws InvalidArgument for
/// n == 0 or sample_count == 0.
double match_probability_mc(const SubCubeModel& model, Execution exec = Execution::parallel);

/// Closed form 1/n^2 for independent uniform origin and destination.
double match_probability_exact(std::uint64_t n);

}  // namespace carpool

#endif  // CARPOOL_MATCHPROB_HPP
