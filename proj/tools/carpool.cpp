#include "carpool/error.hpp"
#include "carpool/pipeline.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <omp.h>

namespace {

struct Overrides {
    std::optional<std::string> nodes, edges, traces, od_matrix, observed_waits, out;
    std::optional<std::string> line, window, match_window, sub_window, router, departure;
    std::optional<int> bin_minutes, operating_days, day_count, threads;
    std::optional<double> radius, cut_height;
    std::optional<std::uint64_t> seed, samples;
    std::vector<std::uint64_t> n;
};

void apply(const Overrides& o, carpool::PipelineConfig& c) {
    auto path = [](const std::optional<std::string>& v, std::filesystem::path& dst) {
        if (v) {
            dst = std::filesystem::absolute(*v);
        }
    };
    path(o.nodes, c.nodes);
    path(o.edges, c.edges);
    path(o.traces, c.traces);
    path(o.od_matrix, c.od_matrix);
    path(o.observed_waits, c.observed_waits);
    path(o.out, c.output_dir);
    if (o.line) c.line = *o.line;
    if (o.window) std::tie(c.window_begin, c.window_end) = carpool::split_window(*o.window);
    if (o.match_window) {
        const auto [b, e] = carpool::split_window(*o.match_window);
        c.match_window_begin = b;
        c.match_window_end = e;
    }
    if (o.sub_window) {
        const auto [b, e] = carpool::split_window(*o.sub_window);
        c.sub_window_begin = b;
        c.sub_window_end = e;
    }
    if (o.router) c.router.kind = *o.router;
    if (o.departure) c.departure = *o.departure;
    if (o.bin_minutes) c.bin_minutes = *o.bin_minutes;
    if (o.operating_days) c.operating_days = *o.operating_days;
    if (o.day_count) c.day_count = *o.day_count;
    if (o.threads) c.threads = *o.threads;
    if (o.radius) c.buffer_radius_m = *o.radius;
    if (o.cut_height) c.cut_height_m = *o.cut_height;
    if (o.seed) c.seed = *o.seed;
    if (o.samples) c.matchprob.samples = *o.samples;
    if (!o.n.empty()) c.matchprob.n = o.n;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carpooling line analysis: trace simplification, driver flows and waiting times"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;
    app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--nodes", o.nodes, "meeting points CSV");
    app.add_option("--edges", o.edges, "edges CSV");
    app.add_option("--traces", o.traces, "GPS traces CSV");
    app.add_option("--od-matrix", o.od_matrix, "OD matrix CSV");
    app.add_option("--observed-waits", o.observed_waits, "observed waits CSV");
    app.add_option("-o,--out", o.out, "output directory");
    app.add_option("--line", o.line, "line, e.g. B>S");
    app.add_option("--window", o.window, "operating window HH:MM-HH:MM");
    app.add_option("--match-window", o.match_window, "window for meeting-point arrivals");
    app.add_option("--sub-window", o.sub_window, "second comparison window");
    app.add_option("--bin-minutes", o.bin_minutes, "time bin length");
    app.add_option("--radius", o.radius, "buffer radius in meters");
    app.add_option("--operating-days", o.operating_days, "operating days per week");
    app.add_option("--day-count", o.day_count, "days the flow is averaged over");
    app.add_option("--cut-height", o.cut_height, "clustering cut height in meters");
    app.add_option("--router", o.router, "straight-line or http");
    app.add_option("--departure", o.departure, "departure instant for route requests");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--samples", o.samples, "Monte Carlo samples per n");
    app.add_option("--n", o.n, "sub-cube counts");
    app.add_option("--threads", o.threads, "OpenMP threads");

    static const std::map<std::string_view, std::string> about{
        {"simplify", "match traces to the line and reduce them to meeting-point passes"},
        {"flow", "driver flow per time bin"},
        {"wait", "predicted waits per bin, and RMSE against observed waits"},
        {"compare", "weekly door-to-door against meeting-point flows and waits"},
        {"cluster", "complete-linkage clusters of OD vectors"},
        {"matchprob", "Monte Carlo match probability for the sub-cube model"},
        {"participation", "driver participation rate from the OD matrix"},
        {"simulate", "synthetic traces and simulated passenger waits"},
        {"map", "GeoJSON of simplified traces and meeting points"},
    };
    std::optional<carpool::Command> command;
    for (const auto name : carpool::command_names()) {
        auto* sub = app.add_subcommand(std::string(name), about.at(name));
        sub->fallthrough();
        sub->callback([&command, name] { command = carpool::parse_command(name); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc != 0) {
            std::cerr << app.help();
            return 1;
        }
        return 0;
    }

    carpool::PipelineConfig config;
    try {
        if (!config_path.empty()) {
            config = carpool::load_config(config_path);
        }
        apply(o, config);
    } catch (const std::exception& e) {
        std::cerr << carpool::error_report(e).dump() << '\n';
        return carpool::exit_status(e);
    }
    if (config.threads > 0) {
        omp_set_num_threads(config.threads);
    }
    return carpool::run_pipeline(config, *command, std::cout, std::cerr);
}
