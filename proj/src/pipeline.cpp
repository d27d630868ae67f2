#include "carpool/pipeline.hpp"

#include "carpool/cluster.hpp"
#include "carpool/error.hpp"
#include "carpool/flow.hpp"
#include "carpool/http_router.hpp"
#include "carpool/matchprob.hpp"
#include "carpool/participation.hpp"
#include "carpool/simplify.hpp"
#include "carpool/simulate.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>
#include <map>
#include <ostream>
#include <set>

namespace carpool {

namespace {

constexpr std::array kCommands{
    std::pair{Command::simplify, std::string_view{"simplify"}},
    std::pair{Command::flow, std::string_view{"flow"}},
    std::pair{Command::wait, std::string_view{"wait"}},
    std::pair{Command::compare, std::string_view{"compare"}},
    std::pair{Command::cluster, std::string_view{"cluster"}},
    std::pair{Command::matchprob, std::string_view{"matchprob"}},
    std::pair{Command::participation, std::string_view{"participation"}},
    std::pair{Command::simulate, std::string_view{"simulate"}},
    std::pair{Command::map, std::string_view{"map"}},
};

const std::filesystem::path& require(const std::filesystem::path& p, std::string_view key) {
    if (p.empty()) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("config value '{}' is required", key));
    }
    return p;
}

std::string na_or(const std::optional<double>& v, double scale = 1.0) {
    return v ? io::format_number(*v * scale) : std::string("NA");
}

nlohmann::ordered_json json_or_null(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

/// Loads inputs on first use so each command reads only what it needs.
class Run {
public:
    explicit Run(const PipelineConfig& config) : config_(config) {}

    RunReport report;

    const PipelineConfig& config() const { return config_; }

    const CarpoolNetwork& network() {
        if (!network_) {
            network_ = io::read_network(require(config_.nodes, "nodes"), require(config_.edges, "edges"));
        }
        return *network_;
    }

    const CarpoolLine& line() {
        if (!line_) {
            if (config_.line.empty()) {
                throw Error(ErrorCode::InvalidArgument, "config value 'line' is required");
            }
            line_ = CarpoolLine::parse(config_.line);
        }
        return *line_;
    }

    TimeGrid grid() const {
        return TimeGrid(make_window(config_.window_begin, config_.window_end), Minutes{config_.bin_minutes});
    }

    std::optional<DailyWindow> sub_window() const {
        if (!config_.sub_window_begin) {
            return std::nullopt;
        }
        return make_window(*config_.sub_window_begin, *config_.sub_window_end);
    }

    DailyWindow match_window() const {
        if (config_.match_window_begin) {
            return make_window(*config_.match_window_begin, *config_.match_window_end);
        }
        return grid().window();
    }

    const std::vector<Trace>& traces() {
        if (!traces_) {
            auto loaded = io::read_traces(require(config_.traces, "traces"));
            absorb(loaded.issues);
            traces_ = std::move(loaded.value);
        }
        return *traces_;
    }

    const std::vector<SimplifiedTrace>& simplified() {
        if (!simplified_) {
            const LineMatcher matcher(network(), line(), config_.buffer_radius_m, match_window());
            simplified_ = simplify_batch(traces(), matcher);
        }
        return *simplified_;
    }

    /// Matched traces whose first arrival falls in the operating window.
    std::vector<SimplifiedTrace> in_window() {
        const TimeGrid g = grid();
        std::vector<SimplifiedTrace> out;
        for (const auto& st : simplified()) {
            if (g.bin_of(st.first_arrival())) {
                out.push_back(st);
            }
        }
        return out;
    }

    int day_count() {
        if (config_.day_count) {
            if (*config_.day_count < 1) {
                throw Error(ErrorCode::InvalidArgument, "day_count must be at least 1");
            }
            return *config_.day_count;
        }
        std::set<std::chrono::sys_days> days;
        for (const auto& st : in_window()) {
            days.insert(day_of(st.first_arrival()));
        }
        return std::max<int>(1, static_cast<int>(days.size()));
    }

    FlowProfile flow() { return driver_flow(simplified(), line(), grid(), day_count()); }

    GeoPoint reference() { return network().node(line().first()).location; }

    void write(const std::string& name, std::string_view content) {
        const auto path = config_.output_dir / name;
        io::write_file_atomic(path, content);
        report.artifacts.push_back(path);
    }

    void absorb(const std::vector<io::Issue>& issues) {
        report.issues.insert(report.issues.end(), issues.begin(), issues.end());
    }

private:
    const PipelineConfig& config_;
    std::optional<CarpoolNetwork> network_;
    std::optional<CarpoolLine> line_;
    std::optional<std::vector<Trace>> traces_;
    std::optional<std::vector<SimplifiedTrace>> simplified_;
};

void do_simplify(Run& run) {
    const auto& simplified = run.simplified();
    run.write("simplified.csv", io::simplified_csv(simplified));
    std::string csv = "trace_id,source_length,point_count,compression_rate\n";
    for (const auto& st : simplified) {
        csv += fmt::format("{},{},{},{}\n", io::csv_field(st.trace_id), st.source_length, st.point_count(),
                           io::format_number(compression_rate(st)));
    }
    run.write("compression.csv", csv);
    run.report.summary["traces"] = run.traces().size();
    run.report.summary["matched"] = simplified.size();
    run.report.summary["mean_compression_rate"] =
        simplified.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(mean_compression_rate(simplified));
}

void do_flow(Run& run) {
    const FlowProfile flow = run.flow();
    run.write("flow.csv", io::flow_csv(flow));
    run.report.summary["matched"] = run.simplified().size();
    run.report.summary["day_count"] = flow.day_count;
    run.report.summary["daily_total"] = flow.total();
}

void do_wait(Run& run) {
    const FlowProfile flow = run.flow();
    const WaitProfile waits = wait_times(flow);
    run.write("wait.csv", io::wait_csv(waits, flow.line));
    std::size_t unavailable = 0;
    for (const auto& w : waits.waits) {
        unavailable += w ? 0 : 1;
    }
    run.report.summary["unavailable_bins"] = unavailable;
    if (!run.config().observed_waits.empty()) {
        auto observed = io::read_observed_waits(run.config().observed_waits);
        run.absorb(observed.issues);
        std::string csv = "bin_start,bin_end,observations,rmse_minutes\n";
        for (const auto& r : rmse(observed.value, waits)) {
            const Seconds b = flow.grid.bin_begin(r.bin);
            csv += fmt::format("{},{},{},{}\n", format_time_of_day(b), format_time_of_day(b + flow.grid.bin_length()),
                               r.observations, io::format_number(r.rmse));
        }
        run.write("rmse.csv", csv);
    }
}

void do_cluster(Run& run) {
    const auto simplified = run.in_window();
    const ClusterLabels labels = cluster_traces(simplified, run.reference(), run.config().cut_height_m);
    run.write("labels.csv", io::labels_csv(labels));
    const auto door = door_to_door_matches(labels);
    std::size_t largest = labels.cluster_count();
    if (!door.empty()) {
        const auto it = std::find(labels.trace_ids.begin(), labels.trace_ids.end(), door.front());
        largest = labels.labels[static_cast<std::size_t>(it - labels.trace_ids.begin())];
    }
    std::string csv = "cluster_label,size,door_to_door\n";
    for (std::size_t c = 0; c < labels.cluster_count(); ++c) {
        csv += fmt::format("{},{},{}\n", c, labels.sizes[c], c == largest ? "true" : "false");
    }
    run.write("clusters.csv", csv);
    run.report.summary["traces"] = simplified.size();
    run.report.summary["clusters"] = labels.cluster_count();
    run.report.summary["door_to_door"] = door.size();
}

void do_compare(Run& run) {
    const TimeGrid grid = run.grid();
    std::vector<DailyWindow> windows{grid.window()};
    if (const auto sub = run.sub_window()) {
        if (!grid.window().contains(*sub)) {
            throw Error(ErrorCode::InvalidArgument, "sub_window must lie inside the operating window");
        }
        windows.push_back(*sub);
    }
    std::map<std::string, std::vector<SimplifiedTrace>> weeks;
    for (auto& st : run.in_window()) {
        weeks[iso_week_label(day_of(st.first_arrival()))].push_back(std::move(st));
    }
    std::string csv =
        "week,window_start,window_end,door_count,meeting_count,flow_increase_pct,door_wait_min,meeting_wait_min,"
        "wait_change_pct\n";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& [week, traces] : weeks) {
        const auto labels = cluster_traces(traces, run.reference(), run.config().cut_height_m);
        const auto members = door_to_door_matches(labels);
        const std::set<std::string> door(members.begin(), members.end());
        for (const auto& w : windows) {
            double door_count = 0;
            double meeting_count = 0;
            for (const auto& st : traces) {
                if (w.contains(st.first_arrival())) {
                    meeting_count += 1;
                    door_count += door.contains(st.trace_id) ? 1 : 0;
                }
            }
            const double minutes = std::chrono::duration<double, std::ratio<60>>(w.length()).count();
            const auto cmp = weekly_comparison(door_count, meeting_count, minutes, run.config().operating_days);
            csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", week, format_time_of_day(w.begin()),
                               format_time_of_day(w.end()), io::format_number(cmp.door_count),
                               io::format_number(cmp.meeting_count), na_or(cmp.flow_increase, 100.0),
                               na_or(cmp.door_wait), na_or(cmp.meeting_wait), na_or(cmp.wait_change, 100.0));
            rows.push_back({{"week", week},
                            {"window", format_time_of_day(w.begin()) + "-" + format_time_of_day(w.end())},
                            {"door_wait", json_or_null(cmp.door_wait)},
                            {"meeting_wait", json_or_null(cmp.meeting_wait)}});
        }
    }
    run.write("compare.csv", csv);
    run.report.summary["weeks"] = weeks.size();
    run.report.summary["rows"] = std::move(rows);
}

void do_matchprob(Run& run) {
    const auto& mp = run.config().matchprob;
    std::string csv = "n,p_hat,exact,samples,seed\n";
    for (const auto n : mp.n) {
        const SubCubeModel model{n, mp.samples, run.config().seed};
        csv += fmt::format("{},{},{},{},{}\n", n, io::format_number(match_probability_mc(model)),
                           io::format_number(match_probability_exact(n)), mp.samples, run.config().seed);
    }
    run.write("matchprob.csv", csv);
    run.report.summary["cases"] = mp.n.size();
}

std::unique_ptr<RouterClient> make_router(const RouterSettings& settings) {
    if (settings.kind == "straight-line") {
        return std::make_unique<StraightLineRouter>(settings.spacing_m);
    }
    if (settings.kind == "http") {
        auto cfg = HttpRouterConfig::from_env();
        cfg.timeout = std::chrono::seconds{settings.timeout_s};
        cfg.cache_dir = settings.cache_dir;
        return std::make_unique<HttpRouter>(std::move(cfg));
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown router kind '{}'", settings.kind));
}

void do_participation(Run& run) {
    auto od = io::read_od_matrix(require(run.config().od_matrix, "od_matrix"));
    run.absorb(od.issues);
    const auto departure = parse_iso8601(run.config().departure);
    if (!departure) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bad departure '{}'", run.config().departure));
    }
    const auto router = make_router(run.config().router);
    const auto routes = infer_routes(od.value, *router, *departure, run.config().router.max_in_flight);
    const double n0 = coincident_flow(routes.plans, od.value, run.line(), run.network(), run.config().buffer_radius_m);
    const FlowProfile flow = run.flow();
    const auto rep = participation_report(flow.total(), n0);

    nlohmann::ordered_json doc;
    doc["line"] = run.line().label();
    doc["n"] = rep.n;
    doc["n0"] = rep.n0;
    doc["rate"] = rep.rate;
    doc["rate_percent"] = rep.rate * 100.0;
    doc["day_count"] = flow.day_count;
    doc["router"] = router->name();
    doc["routed"] = routes.plans.size();
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& f : routes.failures) {
        failures.push_back({{"origin_id", f.origin_id}, {"destination_id", f.destination_id}, {"message", f.message}});
    }
    doc["routing_failures"] = std::move(failures);
    doc["warnings"] = rep.warnings;
    doc["assumptions"] = {{"od_treated_as_morning_peak", true}};
    run.write("participation.json", doc.dump(2) + "\n");
    run.report.summary["rate"] = rep.rate;
    for (const auto& w : rep.warnings) {
        run.report.issues.push_back({"", 0, "DataQuality", w});
    }
}

void do_simulate(Run& run) {
    const auto& s = run.config().simulate;
    const TimeGrid grid = run.grid();
    const auto first = parse_iso8601(s.first_day + "T00:00:00Z");
    if (!first) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bad simulate.first_day '{}'", s.first_day));
    }
    SyntheticScenario sc{run.network(), run.line(), s.route, grid, s.target_flow};
    sc.day_count = s.day_count;
    sc.first_day = day_of(*first);
    sc.buffer_radius_m = run.config().buffer_radius_m;
    sc.gps_noise_m = s.gps_noise_m;
    sc.sampling_period_s = s.sampling_period_s;
    sc.speed_mps = s.speed_mps;
    sc.origin_offset_m = s.origin_offset_m;
    sc.origin_scatter_m = s.origin_scatter_m;
    sc.destination_offset_m = s.destination_offset_m;
    sc.destination_scatter_m = s.destination_scatter_m;
    sc.seed = run.config().seed;
    const auto traces = generate_traces(sc);
    run.write("traces.csv", io::traces_csv(traces));

    const FlowProfile target{grid, s.target_flow, run.line().label(), 1};
    const auto model = ArrivalModel::from_flow(target, run.config().seed, s.willingness);
    std::vector<Instant> requests;
    const Instant midnight{sc.first_day};
    for (std::size_t j = 0; j < grid.bin_count(); ++j) {
        const auto len = Seconds{grid.bin_length()}.count();
        for (std::size_t k = 0; k < s.requests_per_bin; ++k) {
            const auto offset = static_cast<long>((static_cast<double>(k) + 0.5) * static_cast<double>(len) /
                                                  static_cast<double>(s.requests_per_bin));
            requests.push_back(midnight + grid.bin_begin(j) + Seconds{offset});
        }
    }
    const auto waits = simulate_waits(model, requests);
    run.write("waits.csv", io::simulated_waits_csv(waits));
    const DailyWindow mw = scenario_match_window(sc);
    run.report.summary["traces"] = traces.size();
    run.report.summary["requests"] = requests.size();
    run.report.summary["match_window"] = format_time_of_day(mw.begin()) + "-" + format_time_of_day(mw.end());
}

void do_map(Run& run) {
    const auto simplified = run.in_window();
    const ClusterLabels labels = cluster_traces(simplified, run.reference(), run.config().cut_height_m);
    const auto doc = io::export_flow_map(simplified, &labels, run.network());
    run.write("flow_map.geojson", doc.dump(2) + "\n");
    run.report.summary["features"] = doc["features"].size();
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& [c, n] : kCommands) {
        if (n == name) {
            return c;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Command command) noexcept {
    for (const auto& [c, n] : kCommands) {
        if (c == command) {
            return n;
        }
    }
    return "?";
}

std::vector<std::string_view> command_names() {
    std::vector<std::string_view> out;
    for (const auto& [c, n] : kCommands) {
        out.push_back(n);
    }
    return out;
}

RunReport run_command(const PipelineConfig& config, Command command) {
    Run run(config);
    run.report.summary["command"] = std::string(to_string(command));
    switch (command) {
        case Command::simplify: do_simplify(run); break;
        case Command::flow: do_flow(run); break;
        case Command::wait: do_wait(run); break;
        case Command::compare: do_compare(run); break;
        case Command::cluster: do_cluster(run); break;
        case Command::matchprob: do_matchprob(run); break;
        case Command::participation: do_participation(run); break;
        case Command::simulate: do_simulate(run); break;
        case Command::map: do_map(run); break;
    }
    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    for (const auto& a : run.report.artifacts) {
        artifacts.push_back(a.string());
    }
    run.report.summary["artifacts"] = std::move(artifacts);
    return std::move(run.report);
}

nlohmann::ordered_json error_report(const std::exception& e) {
    nlohmann::ordered_json err;
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        err["code"] = std::string(to_string(pe->code()));
        err["file"] = pe->file();
        err["line"] = pe->line();
    } else if (const auto* ce = dynamic_cast<const Error*>(&e)) {
        err["code"] = std::string(to_string(ce->code()));
    } else {
        err["code"] = "Internal";
    }
    err["message"] = e.what();
    return {{"error", std::move(err)}};
}

int exit_status(const std::exception& e) noexcept {
    if (const auto* ce = dynamic_cast<const Error*>(&e)) {
        if (ce->code() == ErrorCode::ParseError || ce->code() == ErrorCode::EmptyInput) {
            return 2;
        }
    }
    return 3;
}

int run_pipeline(const PipelineConfig& config, Command command, std::ostream& out, std::ostream& err) {
    try {
        const RunReport report = run_command(config, command);
        for (const auto& i : report.issues) {
            nlohmann::ordered_json w{{"code", i.code}, {"message", i.message}};
            if (!i.file.empty()) {
                w["file"] = i.file;
                w["line"] = i.line;
            }
            err << nlohmann::ordered_json{{"warning", std::move(w)}}.dump() << '\n';
        }
        out << report.summary.dump() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << error_report(e).dump() << '\n';
        return exit_status(e);
    }
}

}  // namespace carpool
