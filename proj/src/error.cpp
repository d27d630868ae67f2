#include "carpool/error.hpp"

namespace carpool {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidLine: return "InvalidLine";
    case ErrorCode::NetworkTooLarge: return "NetworkTooLarge";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::LineMismatch: return "LineMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ZeroRate: return "ZeroRate";
    case ErrorCode::ZeroPopulation: return "ZeroPopulation";
    case ErrorCode::RoutingFailed: return "RoutingFailed";
    case ErrorCode::InfeasibleScenario: return "InfeasibleScenario";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace carpool
