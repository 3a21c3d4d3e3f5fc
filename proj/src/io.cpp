#include "migprop/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "migprop/errors.hpp"
#include "migprop/math_util.hpp"

namespace migprop {

namespace {

constexpr double km_per_degree = 111.32;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

double parse_field(const std::string& raw, const char* name, const std::string& where) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw data_error(where + ": cannot parse " + name);
    return v;
}

}  // namespace

IngestResult ingest_tracks(std::istream& in, const std::string& source_name,
                           const IngestOptions& opts) {
    std::string line;
    std::size_t line_no = 0;

    // header (comments allowed before it)
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t != "path_id,t,x,y")
            throw data_error(source_name + ": line " + std::to_string(line_no) +
                             ": expected header 'path_id,t,x,y'");
        have_header = true;
        break;
    }
    if (!have_header) throw data_error(source_name + ": missing header 'path_id,t,x,y'");

    struct Row {
        double t, x, y;
        std::size_t line;
    };
    std::vector<std::string> path_order;
    std::map<std::string, std::vector<Row>> by_path;
    neumaier_sum lat_sum;
    std::size_t n_rows = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::string where = source_name + ": line " + std::to_string(line_no);
        const auto fields = split_csv(t);
        if (fields.size() != 4) throw data_error(where + ": expected 4 fields");
        const std::string id = trim(fields[0]);
        if (id.empty()) throw data_error(where + ": empty path_id");
        Row row;
        row.t = parse_field(fields[1], "t", where);
        row.x = parse_field(fields[2], "x", where);
        row.y = parse_field(fields[3], "y", where);
        row.line = line_no;
        if (by_path.find(id) == by_path.end()) path_order.push_back(id);
        by_path[id].push_back(row);
        lat_sum.add(row.y);
        ++n_rows;
    }

    IngestResult out;
    out.mean_latitude_deg = n_rows > 0 ? lat_sum.value() / static_cast<double>(n_rows) : 0.0;
    const double x_scale =
        opts.project_lonlat
            ? std::cos(out.mean_latitude_deg * M_PI / 180.0) * km_per_degree
            : 1.0;
    const double y_scale = opts.project_lonlat ? km_per_degree : 1.0;

    for (const auto& id : path_order) {
        auto& rows = by_path[id];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.t < b.t; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].t == rows[i - 1].t)
                throw data_error(source_name + ": line " + std::to_string(rows[i].line) +
                                 ": duplicate (path_id, t) for path '" + id + "'");
        if (rows.size() < 2) {
            out.warnings.push_back("path '" + id + "' skipped: fewer than 2 observations");
            continue;
        }
        std::vector<TrackObservation> obs;
        obs.reserve(rows.size());
        for (const auto& r : rows)
            obs.push_back({id, r.t, r.x * x_scale - opts.origin_x,
                           r.y * y_scale - opts.origin_y});
        out.tracks.emplace_back(id, std::move(obs));
    }
    return out;
}

IngestResult ingest_tracks_file(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    return ingest_tracks(in, path, opts);
}

std::string format_double(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_tracks_csv(std::ostream& out, const std::vector<TrackSeries>& tracks,
                      const std::vector<std::string>& comment_lines) {
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    out << "path_id,t,x,y\n";
    for (const auto& track : tracks)
        for (const auto& o : track.observations())
            out << o.path_id << ',' << format_double(o.t) << ',' << format_double(o.x)
                << ',' << format_double(o.y) << "\n";
}

void write_tracks_csv_file(const std::string& path, const std::vector<TrackSeries>& tracks,
                           const std::vector<std::string>& comment_lines) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    write_tracks_csv(out, tracks, comment_lines);
    if (!out) throw data_error("write failed for '" + path + "'");
}

}  // namespace migprop
