#include "carpool/io.hpp"

#include "carpool/error.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace carpool::io {

namespace {

struct CsvFile {
    std::string name;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

CsvFile load_csv(const std::filesystem::path& path, std::initializer_list<std::vector<std::string_view>> headers) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path.string()));
    }
    CsvFile f{path.string(), {}};
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv_line(line);
        if (!header_seen) {
            bool ok = false;
            for (const auto& h : headers) {
                ok = ok || std::equal(fields.begin(), fields.end(), h.begin(), h.end());
            }
            if (!ok) {
                throw ParseError(f.name, lineno, fmt::format("unexpected header '{}'", line));
            }
            header_seen = true;
            continue;
        }
        f.rows.emplace_back(lineno, std::move(fields));
    }
    if (!header_seen) {
        throw Error(ErrorCode::EmptyInput, fmt::format("'{}' is empty", f.name));
    }
    return f;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<std::size_t> to_size(std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

// Row-level failure; caught by the readers and turned into an Issue.
struct RowError {
    std::string code;
    std::string message;
};

double need_double(std::string_view s, std::string_view what) {
    const auto v = to_double(s);
    if (!v) {
        throw RowError{"ParseError", fmt::format("bad {} '{}'", what, s)};
    }
    return *v;
}

GeoPoint need_point(std::string_view lon, std::string_view lat) {
    const GeoPoint p{need_double(lon, "longitude"), need_double(lat, "latitude")};
    if (!p.valid()) {
        throw RowError{"InvariantViolation", fmt::format("coordinates ({}, {}) out of range", lon, lat)};
    }
    return p;
}

Instant need_instant(std::string_view s) {
    const auto t = parse_iso8601(s);
    if (!t) {
        throw RowError{"ParseError", fmt::format("bad timestamp '{}'", s)};
    }
    return *t;
}

void need_fields(const std::vector<std::string>& fields, std::size_t n) {
    if (fields.size() != n) {
        throw RowError{"ParseError", fmt::format("expected {} fields, got {}", n, fields.size())};
    }
}

void require_rows(const std::string& file, std::size_t valid) {
    if (valid == 0) {
        throw Error(ErrorCode::EmptyInput, fmt::format("'{}' has no valid rows", file));
    }
}

std::string bin_label(const TimeGrid& grid, std::size_t j) {
    return format_time_of_day(grid.bin_begin(j));
}

std::string bin_end_label(const TimeGrid& grid, std::size_t j) {
    return format_time_of_day(grid.bin_begin(j) + grid.bin_length());
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double value) {
    return fmt::format("{}", value);
}

Loaded<std::vector<Trace>> read_traces(const std::filesystem::path& path) {
    const CsvFile f = load_csv(path, {{"trace_id", "timestamp_iso8601_utc", "lon", "lat"},
                                      {"trace_id", "timestamp", "lon", "lat"}});
    Loaded<std::vector<Trace>> out;
    std::map<std::string, std::pair<std::size_t, std::vector<GpsSample>>> grouped;  // id -> (first line, samples)
    for (const auto& [lineno, fields] : f.rows) {
        try {
            need_fields(fields, 4);
            if (fields[0].empty()) {
                throw RowError{"ParseError", "empty trace_id"};
            }
            const GpsSample s{need_point(fields[2], fields[3]), need_instant(fields[1])};
            auto [it, inserted] = grouped.try_emplace(fields[0], lineno, std::vector<GpsSample>{});
            it->second.second.push_back(s);
        } catch (const RowError& e) {
            out.issues.push_back({f.name, lineno, e.code, e.message});
        }
    }
    for (auto& [id, entry] : grouped) {
        try {
            out.value.emplace_back(id, std::move(entry.second));
        } catch (const Error& e) {
            out.issues.push_back({f.name, entry.first, std::string(to_string(e.code())), e.what()});
        }
    }
    require_rows(f.name, out.value.size());
    return out;
}

CarpoolNetwork read_network(const std::filesystem::path& nodes, const std::filesystem::path& edges) {
    const CsvFile nf = load_csv(nodes, {{"id", "name", "lon", "lat"}});
    std::vector<MeetingPoint> points;
    for (const auto& [lineno, fields] : nf.rows) {
        try {
            need_fields(fields, 4);
            points.push_back({fields[0], fields[1], need_point(fields[2], fields[3])});
        } catch (const RowError& e) {
            throw ParseError(nf.name, lineno, e.message);
        }
    }
    require_rows(nf.name, points.size());
    const CsvFile ef = load_csv(edges, {{"from_id", "to_id"}});
    std::vector<EdgeSpec> edge_list;
    for (const auto& [lineno, fields] : ef.rows) {
        if (fields.size() != 2) {
            throw ParseError(ef.name, lineno, fmt::format("expected 2 fields, got {}", fields.size()));
        }
        edge_list.emplace_back(fields[0], fields[1]);
    }
    return build_network(std::move(points), std::move(edge_list));
}

Loaded<OdMatrix> read_od_matrix(const std::filesystem::path& path) {
    const CsvFile f =
        load_csv(path, {{"origin_id", "dest_id", "count", "origin_lon", "origin_lat", "dest_lon", "dest_lat"}});
    Loaded<OdMatrix> out;
    std::vector<OdEntry> entries;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [lineno, fields] : f.rows) {
        try {
            need_fields(fields, 7);
            OdEntry e{fields[0], fields[1], need_double(fields[2], "count"), need_point(fields[3], fields[4]),
                      need_point(fields[5], fields[6])};
            if (e.count < 0) {
                throw RowError{"InvariantViolation", "negative count"};
            }
            if (!seen.emplace(e.origin_id, e.destination_id).second) {
                throw RowError{"DuplicateId", fmt::format("duplicate pair {} -> {}", e.origin_id, e.destination_id)};
            }
            entries.push_back(std::move(e));
        } catch (const RowError& e) {
            out.issues.push_back({f.name, lineno, e.code, e.message});
        }
    }
    require_rows(f.name, entries.size());
    out.value = OdMatrix(std::move(entries));
    return out;
}

Loaded<std::vector<ObservedWait>> read_observed_waits(const std::filesystem::path& path) {
    const CsvFile f =
        load_csv(path, {{"request_timestamp", "wait_minutes"}, {"request_timestamp", "wait_minutes", "censored"}});
    Loaded<std::vector<ObservedWait>> out;
    for (const auto& [lineno, fields] : f.rows) {
        try {
            if (fields.size() != 2 && fields.size() != 3) {
                need_fields(fields, 2);
            }
            const ObservedWait w{need_instant(fields[0]), need_double(fields[1], "wait")};
            if (w.wait_minutes < 0) {
                throw RowError{"InvariantViolation", "negative wait"};
            }
            out.value.push_back(w);
        } catch (const RowError& e) {
            out.issues.push_back({f.name, lineno, e.code, e.message});
        }
    }
    require_rows(f.name, out.value.size());
    return out;
}

Loaded<std::vector<SimplifiedTrace>> read_simplified(const std::filesystem::path& path) {
    const CsvFile f = load_csv(path, {{"trace_id", "line", "variant", "source_length", "seq", "kind",
                                       "meeting_point_id", "timestamp", "lon", "lat", "distance_m"}});
    Loaded<std::vector<SimplifiedTrace>> out;
    // Rows of one trace are contiguous; a malformed row poisons its trace.
    std::size_t i = 0;
    while (i < f.rows.size()) {
        const std::string id = f.rows[i].second.empty() ? std::string{} : f.rows[i].second[0];
        const std::size_t first_line = f.rows[i].first;
        std::size_t j = i;
        while (j < f.rows.size() && !f.rows[j].second.empty() && f.rows[j].second[0] == id) {
            ++j;
        }
        if (j == i) {
            ++j;
        }
        try {
            SimplifiedTrace st;
            st.trace_id = id;
            for (std::size_t k = i; k < j; ++k) {
                const auto& fields = f.rows[k].second;
                need_fields(fields, 11);
                const auto seq = to_size(fields[4]);
                const auto len = to_size(fields[3]);
                if (!seq || *seq != k - i || !len) {
                    throw RowError{"ParseError", "bad seq/source_length"};
                }
                st.line = fields[1];
                st.variant = fields[2];
                st.source_length = *len;
                const GpsSample s{need_point(fields[8], fields[9]), need_instant(fields[7])};
                const std::string& kind = fields[5];
                const bool first = k == i;
                const bool last = k + 1 == j;
                if (kind == "origin" && first) {
                    st.origin = s;
                } else if (kind == "destination" && last) {
                    st.destination = s;
                } else if (kind == "pass" && !first && !last) {
                    st.passes.push_back({fields[6], s, need_double(fields[10], "distance")});
                } else {
                    throw RowError{"ParseError", fmt::format("unexpected '{}' row", kind)};
                }
            }
            if (st.passes.empty()) {
                throw RowError{"ParseError", "simplified trace without passes"};
            }
            out.value.push_back(std::move(st));
        } catch (const RowError& e) {
            out.issues.push_back({f.name, first_line, e.code, e.message});
        }
        i = j;
    }
    require_rows(f.name, out.value.size());
    return out;
}

std::string traces_csv(std::span<const Trace> traces) {
    std::vector<const Trace*> sorted;
    for (const auto& t : traces) {
        sorted.push_back(&t);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const Trace* a, const Trace* b) { return a->id() < b->id(); });
    std::string out = "trace_id,timestamp_iso8601_utc,lon,lat\n";
    for (const Trace* t : sorted) {
        const std::string id = csv_field(t->id());
        for (const auto& s : t->samples()) {
            out += fmt::format("{},{},{},{}\n", id, format_iso8601(s.timestamp), format_number(s.position.lon),
                               format_number(s.position.lat));
        }
    }
    return out;
}

std::string nodes_csv(const CarpoolNetwork& network) {
    std::string out = "id,name,lon,lat\n";
    for (const auto& n : network.nodes()) {
        out += fmt::format("{},{},{},{}\n", csv_field(n.id), csv_field(n.name), format_number(n.location.lon),
                           format_number(n.location.lat));
    }
    return out;
}

std::string edges_csv(const CarpoolNetwork& network) {
    std::string out = "from_id,to_id\n";
    for (const auto& [a, b] : network.edges()) {
        out += fmt::format("{},{}\n", csv_field(a), csv_field(b));
    }
    return out;
}

std::string od_matrix_csv(const OdMatrix& od) {
    std::string out = "origin_id,dest_id,count,origin_lon,origin_lat,dest_lon,dest_lat\n";
    for (const auto& e : od.entries()) {
        out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(e.origin_id), csv_field(e.destination_id),
                           format_number(e.count), format_number(e.origin.lon), format_number(e.origin.lat),
                           format_number(e.destination.lon), format_number(e.destination.lat));
    }
    return out;
}

std::string simplified_csv(std::span<const SimplifiedTrace> simplified) {
    std::string out = "trace_id,line,variant,source_length,seq,kind,meeting_point_id,timestamp,lon,lat,distance_m\n";
    for (const auto& st : simplified) {
        const std::string prefix =
            fmt::format("{},{},{},{}", csv_field(st.trace_id), csv_field(st.line), csv_field(st.variant),
                        st.source_length);
        std::size_t seq = 0;
        auto row = [&](std::string_view kind, std::string_view mp, const GpsSample& s, std::string_view dist) {
            out += fmt::format("{},{},{},{},{},{},{},{}\n", prefix, seq++, kind, csv_field(mp),
                               format_iso8601(s.timestamp), format_number(s.position.lon),
                               format_number(s.position.lat), dist);
        };
        row("origin", "", st.origin, "");
        for (const auto& p : st.passes) {
            row("pass", p.meeting_point_id, p.closest_sample, format_number(p.distance));
        }
        row("destination", "", st.destination, "");
    }
    return out;
}

std::string flow_csv(const FlowProfile& flow) {
    std::string out = "line,bin_start,bin_end,flow,day_count\n";
    for (std::size_t j = 0; j < flow.counts.size(); ++j) {
        out += fmt::format("{},{},{},{},{}\n", csv_field(flow.line), bin_label(flow.grid, j),
                           bin_end_label(flow.grid, j), format_number(flow.counts[j]), flow.day_count);
    }
    return out;
}

std::string wait_csv(const WaitProfile& waits, std::string_view line) {
    std::string out = "line,bin_start,bin_end,wait_minutes\n";
    for (std::size_t j = 0; j < waits.waits.size(); ++j) {
        out += fmt::format("{},{},{},{}\n", csv_field(line), bin_label(waits.grid, j), bin_end_label(waits.grid, j),
                           waits.waits[j] ? format_number(*waits.waits[j]) : std::string("NA"));
    }
    return out;
}

std::string labels_csv(const ClusterLabels& labels) {
    std::string out = "trace_id,cluster_label\n";
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        out += fmt::format("{},{}\n", csv_field(labels.trace_ids[i]), labels.labels[i]);
    }
    return out;
}

std::string simulated_waits_csv(std::span<const SimulatedWait> waits) {
    std::string out = "request_timestamp,wait_minutes,censored\n";
    for (const auto& w : waits) {
        out += fmt::format("{},{},{}\n", format_iso8601(w.request), format_number(w.wait_minutes),
                           w.censored ? "true" : "false");
    }
    return out;
}

nlohmann::ordered_json export_flow_map(std::span<const SimplifiedTrace> simplified, const ClusterLabels* labels,
                                       const CarpoolNetwork& network) {
    std::map<std::string, std::size_t> label_of;
    if (labels != nullptr) {
        for (std::size_t i = 0; i < labels->trace_ids.size(); ++i) {
            label_of.emplace(labels->trace_ids[i], labels->labels[i]);
        }
    }
    auto position = [](const GeoPoint& p) { return nlohmann::ordered_json::array({p.lon, p.lat}); };

    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const auto& st : simplified) {
        nlohmann::ordered_json coords = nlohmann::ordered_json::array();
        nlohmann::ordered_json pass_times = nlohmann::ordered_json::array();
        nlohmann::ordered_json pass_ids = nlohmann::ordered_json::array();
        coords.push_back(position(st.origin.position));
        for (const auto& p : st.passes) {
            coords.push_back(position(p.closest_sample.position));
            pass_times.push_back(format_iso8601(p.arrival_time()));
            pass_ids.push_back(p.meeting_point_id);
        }
        coords.push_back(position(st.destination.position));

        nlohmann::ordered_json props;
        props["trace_id"] = st.trace_id;
        props["line"] = st.line;
        props["variant"] = st.variant;
        if (const auto it = label_of.find(st.trace_id); it != label_of.end()) {
            props["cluster_label"] = it->second;
        }
        props["pass_ids"] = std::move(pass_ids);
        props["pass_times"] = std::move(pass_times);

        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
        f["properties"] = std::move(props);
        features.push_back(std::move(f));
    }
    for (const auto& mp : network.nodes()) {
        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"}, {"coordinates", position(mp.location)}};
        f["properties"] = {{"id", mp.id}, {"name", mp.name}};
        features.push_back(std::move(f));
    }
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    return doc;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::Io, fmt::format("cannot rename into '{}': {}", path.string(), ec.message()));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace carpool::io
