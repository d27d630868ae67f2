#ifndef CARPOOL_IO_HPP
#define CARPOOL_IO_HPP

#include "carpool/cluster.hpp"
#include "carpool/flow.hpp"
#include "carpool/geo.hpp"
#include "carpool/matchprob.hpp"
#include "carpool/network.hpp"
#include "carpool/participation.hpp"
#include "carpool/simplify.hpp"
#include "carpool/simulate.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace carpool::io {

/// A rejected row or record. Ingestion keeps going past these.
struct Issue {
    std::string file;
    std::size_t line = 0;  ///< 1-based; 0 when the issue is not tied to one row
    std::string code;
    std::string message;
};

template <typename T>
struct Loaded {
    T value;
    std::vector<Issue> issues;
};

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

// ---- readers --------------------------------------------------------------
// All readers throw Error(Io) when the file cannot be opened and
// Error(EmptyInput) when no valid row survives. ParseError is thrown for a
// wrong header.

/// `trace_id,timestamp_iso8601_utc,lon,lat` (`timestamp` is accepted as the
/// second header name). Bad rows are dropped with an Issue; a trace that
/// breaks the Trace invariants is dropped whole. Traces come back sorted by id.
Loaded<std::vector<Trace>> read_traces(const std::filesystem::path& path);

/// Nodes `id,name,lon,lat` and edges `from_id,to_id`. Any bad row is fatal.
CarpoolNetwork read_network(const std::filesystem::path& nodes, const std::filesystem::path& edges);

/// `origin_id,dest_id,count,origin_lon,origin_lat,dest_lon,dest_lat`.
Loaded<OdMatrix> read_od_matrix(const std::filesystem::path& path);

/// `request_timestamp,wait_minutes`, optionally followed by the `censored`
/// column of simulated_waits_csv (ignored).
Loaded<std::vector<ObservedWait>> read_observed_waits(const std::filesystem::path& path);

/// Inverse of simplified_csv.
Loaded<std::vector<SimplifiedTrace>> read_simplified(const std::filesystem::path& path);

// ---- writers (return the file content) -------------------------------------

std::string traces_csv(std::span<const Trace> traces);
std::string nodes_csv(const CarpoolNetwork& network);
std::string edges_csv(const CarpoolNetwork& network);
std::string od_matrix_csv(const OdMatrix& od);
/// One row per skeleton point: origin, each pass, destination.
std::string simplified_csv(std::span<const SimplifiedTrace> simplified);
std::string flow_csv(const FlowProfile& flow);
/// Zero-flow bins carry the literal NA.
std::string wait_csv(const WaitProfile& waits, std::string_view line);
std::string labels_csv(const ClusterLabels& labels);
std::string simulated_waits_csv(std::span<const SimulatedWait> waits);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

/// GeoJSON FeatureCollection: a LineString per simplified trace (origin,
/// passes, destination) and a Point per meeting point.
nlohmann::ordered_json export_flow_map(std::span<const SimplifiedTrace> simplified,
                                       const ClusterLabels* labels, const CarpoolNetwork& network);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace carpool::io

#endif  // CARPOOL_IO_HPP
