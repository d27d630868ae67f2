#ifndef CARPOOL_PIPELINE_HPP
#define CARPOOL_PIPELINE_HPP

#include "carpool/config.hpp"
#include "carpool/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string_view>
#include <vector>

namespace carpool {

enum class Command { simplify, flow, wait, compare, cluster, matchprob, participation, simulate, map };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command) noexcept;
std::vector<std::string_view> command_names();

struct RunReport {
    std::vector<std::filesystem::path> artifacts;
    std::vector<io::Issue> issues;
    nlohmann::ordered_json summary;
};

/// Runs one command and writes its artifacts under config.output_dir.
/// Throws Error on failure.
RunReport run_command(const PipelineConfig& config, Command command);

/// run_command with reporting: a JSON summary on `out`, rejected rows and
/// errors as JSON lines on `err`. Returns the process exit status
/// (0 ok, 2 parse or empty input, 3 anything else).
int run_pipeline(const PipelineConfig& config, Command command, std::ostream& out, std::ostream& err);

nlohmann::ordered_json error_report(const std::exception& e);
int exit_status(const std::exception& e) noexcept;

}  // namespace carpool

#endif  // CARPOOL_PIPELINE_HPP
