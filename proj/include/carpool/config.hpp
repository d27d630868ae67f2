#ifndef CARPOOL_CONFIG_HPP
#define CARPOOL_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace carpool {

struct RouterSettings {
    std::string kind = "straight-line";  ///< "straight-line" or "http"
    double spacing_m = 100.0;            ///< straight-line densification
    int timeout_s = 10;
    std::optional<std::filesystem::path> cache_dir;
    std::size_t max_in_flight = 4;
};

struct MatchProbSettings {
    std::vector<std::uint64_t> n{1, 2, 3, 27, 125};
    std::uint64_t samples = 1000000;
};

/// Synthetic scenario knobs for the `simulate` command.
struct SimulateSettings {
    std::vector<double> target_flow;  ///< daily drivers per bin
    std::vector<std::string> route;   ///< empty: longest variant
    int day_count = 1;
    std::string first_day = "2019-11-25";
    double gps_noise_m = 20.0;
    int sampling_period_s = 5;
    double speed_mps = 20.0;
    double origin_offset_m = 5000.0;
    double origin_scatter_m = 1500.0;
    double destination_offset_m = 5000.0;
    double destination_scatter_m = 1500.0;
    std::size_t requests_per_bin = 100;
    double willingness = 1.0;
};

/// Everything a pipeline run needs. Paths are absolute once loaded.
struct PipelineConfig {
    std::filesystem::path nodes;
    std::filesystem::path edges;
    std::filesystem::path traces;
    std::filesystem::path od_matrix;
    std::filesystem::path observed_waits;
    std::string line;
    std::string window_begin = "06:30";
    std::string window_end = "09:00";
    /// Window the meeting-point arrivals must fall in; defaults to the
    /// operating window.
    std::optional<std::string> match_window_begin;
    std::optional<std::string> match_window_end;
    std::optional<std::string> sub_window_begin;
    std::optional<std::string> sub_window_end;
    int bin_minutes = 15;
    double buffer_radius_m = 1000.0;
    int operating_days = 5;
    std::optional<int> day_count;  ///< default: distinct days among matched traces
    double cut_height_m = 6000.0;
    std::filesystem::path output_dir = "out";
    std::string departure = "2019-11-25T07:00:00Z";
    RouterSettings router;
    MatchProbSettings matchprob;
    SimulateSettings simulate;
    std::uint64_t seed = 0;
    int threads = 0;  ///< 0 leaves the OpenMP default
};

/// Reads a JSON config. Relative paths are taken relative to the file's
/// directory. Unknown keys are rejected. Throws ParseError or InvalidArgument.
PipelineConfig load_config(const std::filesystem::path& path);

/// Parses "HH:MM-HH:MM" into begin/end strings; throws InvalidArgument.
std::pair<std::string, std::string> split_window(const std::string& text);

}  // namespace carpool

#endif  // CARPOOL_CONFIG_HPP
