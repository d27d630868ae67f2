#ifndef CARPOOL_EXECUTION_HPP
#define CARPOOL_EXECUTION_HPP

namespace carpool {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Execution { serial, parallel };

}  // namespace carpool

#endif  // CARPOOL_EXECUTION_HPP
