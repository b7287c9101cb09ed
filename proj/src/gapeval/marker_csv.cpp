#include "gapeval/marker_csv.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gapeval/error.hpp"
#include "gapeval/stats.hpp"

namespace gapeval {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw_data("read failed: " + path);
    return buf.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::size_t len = end - start;
        if (len > 0 && text[start + len - 1] == '\r') --len;
        lines.emplace_back(text, start, len);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) {
            fields.emplace_back(line, start);
            return fields;
        }
        fields.emplace_back(line, start, end - start);
        start = end + 1;
    }
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw_data(path + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
    if (!std::isfinite(value))
        throw_data(path + ":" + std::to_string(line_no) + ": non-finite value: '" + field + "'");
    return value;
}

long parse_long(const std::string& field, const std::string& path, std::size_t line_no) {
    long value = 0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw_data(path + ":" + std::to_string(line_no) + ": not an integer: '" + field + "'");
    return value;
}

void check_id(const std::string& id, const char* what) {
    if (id.empty()) throw_data(std::string(what) + " must not be empty");
    if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos ||
        id.find('\r') != std::string::npos)
        throw_data(std::string(what) + " contains a separator character: '" + id + "'");
}

} // namespace

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    std::string tmp = path + ".tmp-" + std::to_string(tick);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw_data("cannot open file for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignore;
            std::filesystem::remove(tmp, ignore);
            throw_data("write failed: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        std::filesystem::remove(tmp, ignore);
        throw_data("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

MarkerSequence read_markers(const std::string& path, std::optional<double> fps_override) {
    auto lines = split_lines(read_file(path));
    if (lines.empty()) throw_data(path + ": empty file");

    auto header = split_fields(lines[0]);
    if (header.size() < 5 || header[0] != "frame" || header[1] != "time")
        throw_data(path + ":1: header must start with 'frame,time' followed by marker columns");
    if ((header.size() - 2) % 3 != 0)
        throw_data(path + ":1: marker columns must come in x,y,z triples");

    std::size_t marker_count = (header.size() - 2) / 3;
    std::vector<std::string> ids(marker_count);
    static const char* axes[3] = {"x", "y", "z"};
    for (std::size_t m = 0; m < marker_count; ++m) {
        for (int c = 0; c < 3; ++c) {
            const std::string& col = header[2 + m * 3 + c];
            std::size_t sep = col.rfind(':');
            if (sep == std::string::npos || sep == 0 || sep + 1 >= col.size())
                throw_data(path + ":1: malformed marker column '" + col + "'");
            std::string id = col.substr(0, sep);
            std::string axis = col.substr(sep + 1);
            if (axis != axes[c])
                throw_data(path + ":1: column '" + col + "' out of order, expected axis '" +
                           axes[c] + "'");
            if (c == 0)
                ids[m] = id;
            else if (ids[m] != id)
                throw_data(path + ":1: column '" + col + "' does not match marker '" + ids[m] + "'");
        }
    }

    std::size_t frames = lines.size() - 1;
    if (frames == 0) throw_data(path + ": no data rows");

    std::vector<double> times(frames);
    MarkerSequence seq(frames, ids, 1.0);
    for (std::size_t t = 0; t < frames; ++t) {
        std::size_t line_no = t + 2;
        auto fields = split_fields(lines[t + 1]);
        if (fields.size() != header.size())
            throw_data(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
        long frame = parse_long(fields[0], path, line_no);
        if (frame != static_cast<long>(t))
            throw_data(path + ":" + std::to_string(line_no) + ": expected frame " +
                       std::to_string(t) + ", got " + std::to_string(frame));
        times[t] = parse_double(fields[1], path, line_no);
        if (t > 0 && times[t] <= times[t - 1])
            throw_data(path + ":" + std::to_string(line_no) + ": time must be strictly increasing");
        for (std::size_t m = 0; m < marker_count; ++m) {
            const std::string* f = &fields[2 + m * 3];
            int empty = static_cast<int>(f[0].empty()) + static_cast<int>(f[1].empty()) +
                        static_cast<int>(f[2].empty());
            if (empty == 3) {
                seq.set_present(t, m, false);
            } else if (empty == 0) {
                Vec3 p;
                for (int c = 0; c < 3; ++c) p[c] = parse_double(f[c], path, line_no);
                seq.set_position(t, m, p);
            } else {
                throw_data(path + ":" + std::to_string(line_no) + ": marker '" + ids[m] +
                           "' has a partially empty x,y,z triple");
            }
        }
    }

    double fps;
    if (fps_override) {
        if (*fps_override <= 0.0) throw_usage("fps override must be positive");
        fps = *fps_override;
    } else {
        if (frames < 2)
            throw_data(path + ": cannot infer frame rate from a single frame, pass fps explicitly");
        fps = static_cast<double>(frames - 1) / (times[frames - 1] - times[0]);
        double snapped = std::round(fps);
        if (snapped > 0.0 && std::abs(fps - snapped) < 1e-3) fps = snapped;
    }
    seq.set_fps(fps);
    return seq;
}

void write_markers(const MarkerSequence& seq, const std::string& path) {
    std::string out;
    out.reserve(seq.frames() * seq.markers() * 24 + 256);
    out += "frame,time";
    for (const auto& id : seq.marker_ids()) {
        check_id(id, "marker id");
        out += ',';
        out += id;
        out += ":x,";
        out += id;
        out += ":y,";
        out += id;
        out += ":z";
    }
    out += '\n';
    for (std::size_t t = 0; t < seq.frames(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_value(static_cast<double>(t) / seq.fps());
        for (std::size_t m = 0; m < seq.markers(); ++m) {
            if (seq.present(t, m)) {
                Vec3 p = seq.position(t, m);
                for (int c = 0; c < 3; ++c) {
                    out += ',';
                    out += format_value(p[c]);
                }
            } else {
                out += ",,,";
            }
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

ObservationMask read_mask(const std::string& path, std::vector<std::string>* marker_ids) {
    auto lines = split_lines(read_file(path));
    if (lines.empty()) throw_data(path + ": empty file");

    auto header = split_fields(lines[0]);
    if (header.size() < 2 || header[0] != "frame")
        throw_data(path + ":1: header must start with 'frame' followed by marker columns");
    std::size_t marker_count = header.size() - 1;

    std::size_t frames = lines.size() - 1;
    if (frames == 0) throw_data(path + ": no data rows");

    ObservationMask mask(frames, marker_count);
    for (std::size_t t = 0; t < frames; ++t) {
        std::size_t line_no = t + 2;
        auto fields = split_fields(lines[t + 1]);
        if (fields.size() != header.size())
            throw_data(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
        long frame = parse_long(fields[0], path, line_no);
        if (frame != static_cast<long>(t))
            throw_data(path + ":" + std::to_string(line_no) + ": expected frame " +
                       std::to_string(t) + ", got " + std::to_string(frame));
        for (std::size_t m = 0; m < marker_count; ++m) {
            const std::string& f = fields[m + 1];
            if (f == "1")
                mask.set(t, m, true);
            else if (f == "0")
                mask.set(t, m, false);
            else
                throw_data(path + ":" + std::to_string(line_no) + ": mask cell must be 0 or 1, got '" +
                           f + "'");
        }
    }
    if (marker_ids) marker_ids->assign(header.begin() + 1, header.end());
    return mask;
}

void write_mask(const ObservationMask& mask, const std::vector<std::string>& marker_ids,
                const std::string& path) {
    if (marker_ids.size() != mask.markers())
        throw_usage("mask has " + std::to_string(mask.markers()) + " markers but " +
                    std::to_string(marker_ids.size()) + " ids were given");
    std::string out = "frame";
    for (const auto& id : marker_ids) {
        check_id(id, "marker id");
        out += ',';
        out += id;
    }
    out += '\n';
    for (std::size_t t = 0; t < mask.frames(); ++t) {
        out += std::to_string(t);
        for (std::size_t m = 0; m < mask.markers(); ++m)
            out += mask.observed(t, m) ? ",1" : ",0";
        out += '\n';
    }
    write_file_atomic(path, out);
}

MetricReport read_metric_report(const std::string& path) {
    auto lines = split_lines(read_file(path));
    if (lines.empty()) throw_data(path + ": empty file");
    if (lines[0] != "stimulus_id,metric,value,norm_mode")
        throw_data(path + ":1: expected header 'stimulus_id,metric,value,norm_mode'");

    MetricReport report;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::size_t line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 4)
            throw_data(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
        if (!is_known_metric(fields[1]))
            throw_data(path + ":" + std::to_string(line_no) + ": unknown metric '" + fields[1] + "'");
        double value = parse_double(fields[2], path, line_no);
        report.add(fields[0], fields[1], value, fields[3]);
    }
    return report;
}

namespace {

std::string render_metric_rows(const MetricReport& report) {
    std::string out;
    for (const auto& row : report.rows) {
        check_id(row.stimulus_id, "stimulus id");
        out += row.stimulus_id;
        out += ',';
        out += row.metric;
        out += ',';
        out += format_value(row.value);
        out += ',';
        out += row.norm_mode;
        out += '\n';
    }
    return out;
}

} // namespace

void write_metric_report(const MetricReport& report, const std::string& path) {
    write_file_atomic(path, "stimulus_id,metric,value,norm_mode\n" + render_metric_rows(report));
}

void append_metric_report(const MetricReport& report, const std::string& path) {
    if (!std::filesystem::exists(path)) {
        write_metric_report(report, path);
        return;
    }
    MetricReport merged = read_metric_report(path);
    for (const auto& row : report.rows)
        merged.add(row.stimulus_id, row.metric, row.value, row.norm_mode);
    write_metric_report(merged, path);
}

RatingsTable read_ratings(const std::string& path) {
    auto lines = split_lines(read_file(path));
    if (lines.empty()) throw_data(path + ": empty file");
    if (lines[0] != "stimulus_id,rater_id,rating")
        throw_data(path + ":1: expected header 'stimulus_id,rater_id,rating'");

    RatingsTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::size_t line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 3)
            throw_data(path + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
        long rating = parse_long(fields[2], path, line_no);
        try {
            table.add(fields[0], fields[1], static_cast<int>(rating));
        } catch (const Error& e) {
            throw_data(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

void write_ratings(const RatingsTable& table, const std::string& path) {
    std::string out = "stimulus_id,rater_id,rating\n";
    for (const auto& row : table.rows()) {
        check_id(row.stimulus_id, "stimulus id");
        check_id(row.rater_id, "rater id");
        out += row.stimulus_id;
        out += ',';
        out += row.rater_id;
        out += ',';
        out += std::to_string(row.rating);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_correlation_csv(const std::vector<CorrelationRow>& rows, const std::string& path) {
    std::string out = "metric,tau,p_value,ci_lo,ci_hi,n_stimuli\n";
    for (const auto& row : rows) {
        out += row.metric;
        out += ',';
        out += format_value(row.tau);
        out += ',';
        out += format_value(row.p_value);
        out += ',';
        out += format_value(row.ci_lo);
        out += ',';
        out += format_value(row.ci_hi);
        out += ',';
        out += std::to_string(row.n_stimuli);
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace gapeval
