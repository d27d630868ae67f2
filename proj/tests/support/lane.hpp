// The five-node Lane network used across tests.
#ifndef CARPOOL_TESTS_LANE_HPP
#define CARPOOL_TESTS_LANE_HPP

#include "carpool/network.hpp"

namespace lane {

inline std::vector<carpool::MeetingPoint> points() {
    return {{"L", "Lyon Mermoz", {4.87, 45.73}},
            {"S", "St-Priest Parc Techno", {4.94, 45.70}},
            {"A", "Aeroport Lyon-St Exupery", {5.08, 45.72}},
            {"V", "Villefontaine The Village", {5.149, 45.614}},
            {"B", "Bourgoin La Grive Sortie 7", {5.235, 45.6}}};
}

inline std::vector<carpool::EdgeSpec> edges() { return {{"B", "V"}, {"V", "S"}, {"B", "S"}, {"S", "L"}, {"V", "A"}}; }

inline carpool::CarpoolNetwork network() { return carpool::build_network(points(), edges()); }

}  // namespace lane

#endif  // CARPOOL_TESTS_LANE_HPP
