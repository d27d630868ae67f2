#include "carpool/matchprob.hpp"

#include "carpool/error.hpp"
#include "carpool/random.hpp"

#include <algorithm>

namespace carpool {

namespace {

void validate(const SubCubeModel& model) {
    if (model.n == 0) {
        throw Error(ErrorCode::InvalidArgument, "sub-cube count must be at least 1");
    }
    if (model.sample_count == 0) {
        throw Error(ErrorCode::InvalidArgument, "sample_count must be at least 1");
    }
}

std::uint64_t stratum_hits(const SubCubeModel& model, std::uint64_t stratum) {
    Xoshiro256 rng = Xoshiro256::stream(model.seed, stratum);
    const std::uint64_t begin = stratum * kMatchStratumSize;
    const std::uint64_t end = std::min(model.sample_count, begin + kMatchStratumSize);
    std::uint64_t hits = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
        const std::uint64_t driver_origin = rng.uniform_below(model.n);
        const std::uint64_t driver_destination = rng.uniform_below(model.n);
        const std::uint64_t passenger_origin = rng.uniform_below(model.n);
        const std::uint64_t passenger_destination = rng.uniform_below(model.n);
        hits += (passenger_origin == driver_origin && passenger_destination == driver_destination) ? 1 : 0;
    }
    return hits;
}

}  // namespace

std::uint64_t match_hits(const SubCubeModel& model, Execution exec) {
    validate(model);
    const auto strata = static_cast<std::ptrdiff_t>((model.sample_count + kMatchStratumSize - 1) / kMatchStratumSize);
    std::uint64_t hits = 0;
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static) reduction(+ : hits)
        for (std::ptrdiff_t s = 0; s < strata; ++s) {
            hits += stratum_hits(model, static_cast<std::uint64_t>(s));
        }
    } else {
        for (std::ptrdiff_t s = 0; s < strata; ++s) {
            hits += stratum_hits(model, static_cast<std::uint64_t>(s));
        }
    }
    return hits;
}

double match_probability_mc(const SubCubeModel& model, Execution exec) {
    return static_cast<double>(match_hits(model, exec)) / static_cast<double>(model.sample_count);
}

double match_probability_exact(std::uint64_t n) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "sub-cube count must be at least 1");
    }
    const double nd = static_cast<double>(n);
    return 1.0 / (nd * nd);
}

}  // namespace carpool
